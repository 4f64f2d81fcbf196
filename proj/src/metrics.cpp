#include "proofloop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace proofloop {
namespace {

__extension__ typedef __int128 i128;

int64_t pow10(int n) {
  int64_t p = 1;
  while (n-- > 0) p *= 10;
  return p;
}

std::string to_decimal(i128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

std::string format_table_number(Fraction value, int64_t scale, int decimals) {
  if (value.den == 0 || value.num == 0) return "0.";
  const i128 unit = pow10(decimals);
  const i128 scaled = static_cast<i128>(value.num) * scale * unit;
  i128 q = scaled / value.den;
  const i128 r = scaled % value.den;
  if (r == 0 && q % unit == 0) return to_decimal(q / unit) + ".";
  const i128 twice = 2 * r;
  if (twice > value.den || (twice == value.den && q % 2 == 1)) {
    ++q;
    if (q % unit == 0) --q;  // rounded up onto an integer it does not equal
  }
  std::string frac = to_decimal(q % unit);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return to_decimal(q / unit) + "." + frac;
}

AccuracyTable accuracy_by_depth(std::span<const OutcomeRecord> records) {
  if (records.empty()) throw EmptyInput("no outcome records");
  AccuracyTable table;
  for (const auto& r : records) {
    const bool ok = r.truth == r.predicted;
    auto& t = table.by_depth[r.depth];
    ++t.total;
    ++table.overall.total;
    if (ok) {
      ++t.correct;
      ++table.overall.correct;
    }
  }
  return table;
}

Fraction Confusion::precision() const noexcept {
  return tp + fp ? Fraction{tp, tp + fp} : Fraction{1, 1};
}

Fraction Confusion::recall() const noexcept {
  return tp + fn ? Fraction{tp, tp + fn} : Fraction{1, 1};
}

Fraction Confusion::f1() const noexcept {
  const int64_t den = 2 * tp + fp + fn;
  return den ? Fraction{2 * tp, den} : Fraction{1, 1};
}

void Confusion::add(bool truth, bool predicted) noexcept {
  if (truth) {
    ++(predicted ? tp : fn);
  } else {
    ++(predicted ? fp : tn);
  }
}

RatesTable confusion_and_prf1(std::span<const OutcomeRecord> records) {
  if (records.empty()) throw EmptyInput("no outcome records");
  RatesTable table;
  for (const auto& r : records) {
    table.by_depth[r.depth].add(r.truth, r.predicted);
    table.overall.add(r.truth, r.predicted);
  }
  return table;
}

double point_biserial(std::span<const int> values, std::span<const int> labels) {
  const std::size_t n = std::min(values.size(), labels.size());
  if (n == 0) return 0.0;
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += values[i];
    my += labels[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = values[i] - mx;
    const double dy = labels[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

double branching_factor(const Problem& problem) {
  const ClosureResult closure = forward_closure(problem.rules, problem.facts);
  if (closure.derived.empty()) return 0.0;
  std::size_t rules = 0;
  for (const auto& rule : problem.rules) {
    if (closure.derived.contains(rule.conclusion)) ++rules;
  }
  return static_cast<double>(rules) / static_cast<double>(closure.derived.size());
}

bool label_of(const Problem& problem) {
  return problem.label ? *problem.label : label_and_depth(problem).label;
}

}  // namespace

double correlation_rules_label(std::span<const Problem> problems) {
  std::vector<int> rules;
  std::vector<int> labels;
  rules.reserve(problems.size());
  labels.reserve(problems.size());
  for (const auto& p : problems) {
    rules.push_back(static_cast<int>(p.rules.size()));
    labels.push_back(label_of(p) ? 1 : 0);
  }
  return point_biserial(rules, labels);
}

DatasetStats dataset_stats(std::span<const Problem> problems) {
  DatasetStats stats;
  double branching[2] = {0, 0};
  for (const auto& p : problems) {
    LabelStats& s = label_of(p) ? stats.true_label : stats.false_label;
    ++s.problems;
    ++s.rules_histogram[static_cast<int>(p.rules.size())];
    ++s.facts_histogram[static_cast<int>(p.facts.size())];
    s.mean_rules += static_cast<double>(p.rules.size());
    s.mean_facts += static_cast<double>(p.facts.size());
    branching[label_of(p) ? 1 : 0] += branching_factor(p);
  }
  for (int l = 0; l < 2; ++l) {
    LabelStats& s = l ? stats.true_label : stats.false_label;
    if (s.problems == 0) continue;
    const double n = static_cast<double>(s.problems);
    s.mean_rules /= n;
    s.mean_facts /= n;
    s.mean_branching = branching[l] / n;
  }
  stats.rules_label_correlation = correlation_rules_label(problems);
  return stats;
}

// ---------------------------------------------------------------------------

namespace {

using Row = std::vector<std::string>;

struct Section {
  std::string name;
  std::string title;
  Row header;
  std::vector<Row> rows;
};

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << v;
  return out.str();
}

std::vector<Section> build_sections(const ReportTables& tables) {
  std::vector<Section> out;
  if (!tables.accuracy.empty()) {
    Section s{"accuracy", "Accuracy (%) by proof depth", {"TRAIN", "TEST"}, {}};
    for (int d = 0; d <= tables.max_depth; ++d) s.header.push_back(std::to_string(d));
    s.header.push_back("TOT");
    for (const auto& row : tables.accuracy) {
      Row r{row.train, row.test};
      for (int d = 0; d <= tables.max_depth; ++d) {
        auto it = row.table.by_depth.find(d);
        r.push_back(it == row.table.by_depth.end()
                        ? "-"
                        : format_table_number(it->second.accuracy(), 100,
                                              tables.accuracy_decimals));
      }
      r.push_back(format_table_number(row.table.overall.accuracy(), 100,
                                      tables.accuracy_decimals));
      s.rows.push_back(std::move(r));
    }
    out.push_back(std::move(s));
  }
  for (const auto& section : tables.rates) {
    Section s{"rates", section.title,
              {"Depth", "TPR", "FPR", "TNR", "FNR", "Precision", "Recall",
               "F1-Score"},
              {}};
    auto add = [&](std::string label, const Confusion& c) {
      s.rows.push_back({std::move(label), format_table_number(c.tpr(), 1, 3),
                        format_table_number(c.fpr(), 1, 3),
                        format_table_number(c.tnr(), 1, 3),
                        format_table_number(c.fnr(), 1, 3),
                        format_table_number(c.precision(), 1, 3),
                        format_table_number(c.recall(), 1, 3),
                        format_table_number(c.f1(), 1, 3)});
    };
    for (const auto& [depth, c] : section.table.by_depth) add(std::to_string(depth), c);
    add("Total", section.table.overall);
    out.push_back(std::move(s));
  }
  if (!tables.consistency.empty()) {
    Section s{"consistency", "Consistency errors (% of proofs)",
              {"Train", "Test", "NonExR", "InappR", "SpMatch", "UnexhS",
               "Error Rate", "Tot. Consistency"},
              {}};
    for (const auto& row : tables.consistency) {
      const auto& t = row.table;
      Row r{row.train, row.test};
      for (ErrorType type : kAllErrorTypes) {
        r.push_back(format_table_number({t.count(type), t.traces}, 100, 3));
      }
      r.push_back(format_table_number({t.inconsistent, t.traces}, 100, 3));
      r.push_back(format_table_number({t.traces - t.inconsistent, t.traces}, 100, 3));
      s.rows.push_back(std::move(r));
    }
    out.push_back(std::move(s));
  }
  if (tables.dataset) {
    const auto& d = *tables.dataset;
    Section s{"dataset", "Dataset statistics",
              {"Label", "Problems", "Rules (mean)", "Facts (mean)",
               "Branching (mean)"},
              {}};
    for (bool label : {true, false}) {
      const LabelStats& l = label ? d.true_label : d.false_label;
      s.rows.push_back({label ? "True" : "False", std::to_string(l.problems),
                        fixed(l.mean_rules, 3), fixed(l.mean_facts, 3),
                        fixed(l.mean_branching, 3)});
    }
    out.push_back(std::move(s));
    out.push_back({"correlation", "Point-biserial r(#rules, label)", {"r"},
                   {{fixed(d.rules_label_correlation, 4)}}});
  }
  return out;
}

std::string render_markdown(const std::vector<Section>& sections) {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections) {
    if (!first) out << "\n";
    first = false;
    out << "### " << s.title << "\n\n";
    std::vector<std::size_t> width(s.header.size(), 0);
    for (std::size_t c = 0; c < s.header.size(); ++c) {
      width[c] = std::max<std::size_t>(3, s.header[c].size());
      for (const auto& r : s.rows) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const Row& r) {
      out << "|";
      for (std::size_t c = 0; c < r.size(); ++c) {
        out << " " << r[c] << std::string(width[c] - r[c].size(), ' ') << " |";
      }
      out << "\n";
    };
    line(s.header);
    out << "|";
    for (std::size_t w : width) out << std::string(w + 2, '-') << "|";
    out << "\n";
    for (const auto& r : s.rows) line(r);
  }
  return out.str();
}

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string render_csv(const std::vector<Section>& sections) {
  std::ostringstream out;
  for (const auto& s : sections) {
    out << "section," << csv_cell(s.name) << "\n";
    auto line = [&](const Row& r) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        out << (c ? "," : "") << csv_cell(r[c]);
      }
      out << "\n";
    };
    line(s.header);
    for (const auto& r : s.rows) line(r);
  }
  return out.str();
}

nlohmann::ordered_json fraction_json(Fraction f) {
  return {{"num", f.num}, {"den", f.den}, {"value", f.value()}};
}

nlohmann::ordered_json confusion_json(const Confusion& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"tn", c.tn},
          {"fn", c.fn},
          {"tpr", fraction_json(c.tpr())},
          {"fpr", fraction_json(c.fpr())},
          {"tnr", fraction_json(c.tnr())},
          {"fnr", fraction_json(c.fnr())},
          {"precision", fraction_json(c.precision())},
          {"recall", fraction_json(c.recall())},
          {"f1", fraction_json(c.f1())}};
}

std::string render_json(const ReportTables& tables,
                        const std::vector<Section>& sections) {
  nlohmann::ordered_json doc;
  auto& acc = doc["accuracy"] = nlohmann::ordered_json::array();
  for (const auto& row : tables.accuracy) {
    nlohmann::ordered_json depths = nlohmann::ordered_json::object();
    for (const auto& [d, t] : row.table.by_depth) {
      depths[std::to_string(d)] = {{"correct", t.correct}, {"total", t.total}};
    }
    acc.push_back({{"train", row.train},
                   {"test", row.test},
                   {"by_depth", depths},
                   {"total",
                    {{"correct", row.table.overall.correct},
                     {"total", row.table.overall.total}}}});
  }
  auto& rates = doc["rates"] = nlohmann::ordered_json::array();
  for (const auto& section : tables.rates) {
    nlohmann::ordered_json depths = nlohmann::ordered_json::object();
    for (const auto& [d, c] : section.table.by_depth) {
      depths[std::to_string(d)] = confusion_json(c);
    }
    rates.push_back({{"title", section.title},
                     {"by_depth", depths},
                     {"total", confusion_json(section.table.overall)}});
  }
  auto& cons = doc["consistency"] = nlohmann::ordered_json::array();
  for (const auto& row : tables.consistency) {
    const auto& t = row.table;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (ErrorType type : kAllErrorTypes) {
      counts[std::string(to_string(type))] = t.count(type);
    }
    cons.push_back({{"train", row.train},
                    {"test", row.test},
                    {"traces", t.traces},
                    {"inconsistent", t.inconsistent},
                    {"errors", counts}});
  }
  if (tables.dataset) {
    const auto& d = *tables.dataset;
    auto label_json = [](const LabelStats& l) {
      nlohmann::ordered_json rules = nlohmann::ordered_json::object();
      for (const auto& [k, v] : l.rules_histogram) rules[std::to_string(k)] = v;
      nlohmann::ordered_json facts = nlohmann::ordered_json::object();
      for (const auto& [k, v] : l.facts_histogram) facts[std::to_string(k)] = v;
      return nlohmann::ordered_json{{"problems", l.problems},
                                    {"mean_rules", l.mean_rules},
                                    {"mean_facts", l.mean_facts},
                                    {"mean_branching", l.mean_branching},
                                    {"rules_histogram", rules},
                                    {"facts_histogram", facts}};
    };
    doc["dataset"] = {{"true", label_json(d.true_label)},
                      {"false", label_json(d.false_label)},
                      {"rules_label_correlation", d.rules_label_correlation}};
  }
  // The printed cells, exactly as the text formats show them.
  auto& shown = doc["display"] = nlohmann::ordered_json::array();
  for (const auto& s : sections) {
    shown.push_back({{"section", s.name},
                     {"title", s.title},
                     {"header", s.header},
                     {"rows", s.rows}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(const ReportTables& tables, std::string_view format) {
  if (format != "markdown" && format != "csv" && format != "json") {
    throw UnsupportedFormat(std::string(format));
  }
  const auto sections = build_sections(tables);
  if (format == "markdown") return render_markdown(sections);
  if (format == "csv") return render_csv(sections);
  return render_json(tables, sections);
}

}  // namespace proofloop
