#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/auditor.hpp"
#include "proofloop/logic.hpp"

namespace proofloop {

struct OutcomeRecord {
  std::string problem_id;
  int depth = 0;
  bool truth = false;
  bool predicted = false;
};

// Exact non-negative ratio. Division by zero is the caller's business; the
// formatter treats 0/0 as 0.
struct Fraction {
  int64_t num = 0;
  int64_t den = 1;

  double value() const noexcept {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Renders num/den * scale with `decimals` digits the way the result tables
// print numbers: an exact integer prints as "7."; otherwise the value is
// rounded half-to-even, except that a value just short of an integer prints
// as the largest decimal below it (0.9996 -> "0.999"), so "1." always means
// exactly one.
std::string format_table_number(Fraction value, int64_t scale, int decimals);

struct Tally {
  int64_t correct = 0;
  int64_t total = 0;

  Fraction accuracy() const noexcept { return {correct, total}; }
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct AccuracyTable {
  std::map<int, Tally> by_depth;
  Tally overall;  // micro average over all records
};

// Throws EmptyInput.
AccuracyTable accuracy_by_depth(std::span<const OutcomeRecord> records);

// Confusion counts; all rates are fractions of the whole set.
struct Confusion {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  int64_t total() const noexcept { return tp + fp + tn + fn; }
  Fraction tpr() const noexcept { return {tp, total()}; }
  Fraction fpr() const noexcept { return {fp, total()}; }
  Fraction tnr() const noexcept { return {tn, total()}; }
  Fraction fnr() const noexcept { return {fn, total()}; }
  // 0/0 counts as 1.
  Fraction precision() const noexcept;
  Fraction recall() const noexcept;
  Fraction f1() const noexcept;

  void add(bool truth, bool predicted) noexcept;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct RatesTable {
  std::map<int, Confusion> by_depth;
  Confusion overall;
};

// Throws EmptyInput.
RatesTable confusion_and_prf1(std::span<const OutcomeRecord> records);

// Pearson correlation between a numeric variable and a 0/1 one. 0 when either
// has zero variance.
double point_biserial(std::span<const int> values, std::span<const int> labels);

struct LabelStats {
  int64_t problems = 0;
  std::map<int, int64_t> rules_histogram;
  std::map<int, int64_t> facts_histogram;
  double mean_rules = 0.0;
  double mean_facts = 0.0;
  // Rules whose conclusion is derivable, per derivable literal, averaged over
  // problems.
  double mean_branching = 0.0;
};

struct DatasetStats {
  LabelStats true_label;
  LabelStats false_label;
  double rules_label_correlation = 0.0;
};

// Problems must carry labels (computed when absent).
DatasetStats dataset_stats(std::span<const Problem> problems);
double correlation_rules_label(std::span<const Problem> problems);

// ---------------------------------------------------------------------------

struct AccuracyRow {
  std::string train;
  std::string test;
  AccuracyTable table;
};

struct RatesSection {
  std::string title;
  RatesTable table;
};

struct ConsistencyRow {
  std::string train;
  std::string test;
  ConsistencyTable table;
};

struct ReportTables {
  int max_depth = 6;
  int accuracy_decimals = 1;
  std::vector<AccuracyRow> accuracy;
  std::vector<RatesSection> rates;
  std::vector<ConsistencyRow> consistency;
  std::optional<DatasetStats> dataset;
};

// "markdown", "csv" or "json". Deterministic. Throws UnsupportedFormat.
std::string render_report(const ReportTables& tables, std::string_view format);

}  // namespace proofloop
