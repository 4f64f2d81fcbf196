#pragma once

// Synthetic problem sets.
//
//   RP    rules, facts and query sampled at random, label computed afterwards.
//   LP    label and depth fixed first, problem sampled around a planted
//         chain of that depth.
//   RP_b  RP with rule count decorrelated from the label by rejection.
//
// Every set is stratified by depth. Candidate i is sampled from its own seed
// derived from (config.seed, kind, i) and candidates are accepted in index
// order, so the output does not depend on the number of worker threads.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/logic.hpp"
#include "proofloop/textwire.hpp"

namespace proofloop {

enum class SubsetKind { rp, lp, rp_balanced };

std::string_view to_string(SubsetKind kind) noexcept;  // "RP", "LP", "RP_b"
// Accepts the display names and the lowercase forms "rp", "lp", "rp_b".
std::optional<SubsetKind> parse_subset_kind(std::string_view name);

struct Range {
  int lo = 0;
  int hi = 0;

  friend bool operator==(const Range&, const Range&) = default;
};

struct GenConfig {
  std::vector<std::string> vocabulary;  // empty: the built-in word list
  int num_problems = 7000;
  Range depth_range{0, 6};
  Range rules_range{10, 40};
  Range facts_range{3, 8};
  Range literals_range{18, 26};  // distinct literals drawn per problem
  uint64_t seed = 0;
  std::array<int, 3> split{80, 10, 10};
  // Gives up after budget_factor * num_problems + 10000 candidates.
  int budget_factor = 400;
  unsigned jobs = 1;

  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

// Throws ConfigError.
void validate_config(const GenConfig& config);

// "key = value" lines; '#' starts a comment. Keys: num_problems, seed,
// min_depth, max_depth, rules_min, rules_max, facts_min, facts_max,
// literals_min, literals_max, split (e.g. 80,10,10), budget_factor, jobs.
// Unset keys keep the values of `base`. Throws ConfigError.
GenConfig parse_gen_config(std::string_view text, GenConfig base = {});
std::string format_gen_config(const GenConfig& config);

struct DatasetEntry {
  std::string id;
  Problem problem;  // label and depth always set
};

struct Dataset {
  SubsetKind kind = SubsetKind::rp;
  GenConfig config;
  std::vector<DatasetEntry> entries;
};

// Throw ExhaustedSampling when the candidate budget runs out before every
// stratum is full, ConfigError on an invalid config.
Dataset generate_rp(const GenConfig& config);
Dataset generate_lp(const GenConfig& config);
Dataset generate_rp_balanced(const GenConfig& config);
Dataset generate(SubsetKind kind, const GenConfig& config);

// Canonical text used for duplicate suppression: query, then rules with
// sorted premises, then facts, each group sorted.
std::string canonical_key(const Problem& problem);

struct StepRecord {
  std::string problem_id;
  int step_index = 0;
  StepInstance instance;
};

// One instance per oracle step plus the terminal instance, per problem.
std::vector<StepRecord> expand_steps(const DatasetEntry& entry,
                                     OrderPolicy order = OrderPolicy::canonical());
std::vector<StepRecord> expand_steps(const Dataset& dataset,
                                     OrderPolicy order = OrderPolicy::canonical());

struct SplitDatasets {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Stratified by (depth, label); sizes follow the percentages by largest
// remainder. Throws ConfigError unless the percentages sum to 100.
SplitDatasets split(const Dataset& dataset, std::array<int, 3> percentages,
                    uint64_t seed);

}  // namespace proofloop
