#pragma once

// Integer-indexed Horn-clause kernel. Literals are dense ids in
// [0, num_literals); the public string-keyed API in logic.hpp compiles down to
// this form, and the dataset generator samples directly in it.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace proofloop::horn {

inline constexpr int kUnreached = std::numeric_limits<int>::max();

struct IndexedRule {
  std::array<int32_t, 3> premise_ids{};
  uint8_t arity = 0;
  int32_t conclusion = 0;

  std::span<const int32_t> premises() const {
    return {premise_ids.data(), arity};
  }
};

struct IndexedProblem {
  int32_t num_literals = 0;
  std::vector<IndexedRule> rules;
  std::vector<int32_t> facts;
  int32_t query = 0;
};

struct LabelDepth {
  bool label = false;
  int depth = 0;

  friend bool operator==(const LabelDepth&, const LabelDepth&) = default;
};

// Minimum derivation depth of every literal (0 for facts), kUnreached for
// literals outside the forward closure.
std::vector<int> derivation_depths(const IndexedProblem& problem);

// Least solution of the failing-branch recursion for every literal outside
// the closure, saturated at `cap`. Entries for derivable literals hold their
// derivation depth. A literal whose every failing branch loops gets `cap`.
std::vector<int> failure_depths(const IndexedProblem& problem,
                                std::span<const int> derivation, int cap);

LabelDepth label_and_depth(const IndexedProblem& problem, int cap);

// Rule indices in the order the forward-chaining oracle fires them: the first
// rule (in problem order) that is applicable and concludes a new literal,
// repeatedly. Stops after the query is derived when `stop_at_query` is set.
std::vector<std::size_t> oracle_schedule(const IndexedProblem& problem,
                                         bool stop_at_query);

}  // namespace proofloop::horn
