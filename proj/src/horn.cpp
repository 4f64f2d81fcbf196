#include "proofloop/horn.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

namespace proofloop::horn {
namespace {

// Solves v(l) = min(seed(l), min over enabled rules r => l of 1 + max v(p))
// for the least solution. Every rule adds exactly one level, so literals can
// be finalised in nondecreasing order of value (Knuth's generalisation of
// Dijkstra to superior functions).
std::vector<int> least_levels(const IndexedProblem& problem,
                              std::vector<int> value,
                              const std::vector<char>& rule_enabled) {
  const auto n = static_cast<std::size_t>(problem.num_literals);
  std::vector<std::vector<uint32_t>> uses(n);
  std::vector<int> remaining(problem.rules.size());
  std::vector<int> max_premise(problem.rules.size(), 0);
  for (std::size_t r = 0; r < problem.rules.size(); ++r) {
    if (!rule_enabled[r]) continue;
    const auto& rule = problem.rules[r];
    remaining[r] = rule.arity;
    for (int32_t p : rule.premises()) uses[p].push_back(static_cast<uint32_t>(r));
  }

  using Entry = std::pair<int, int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t l = 0; l < n; ++l) {
    if (value[l] != kUnreached) heap.emplace(value[l], static_cast<int32_t>(l));
  }
  std::vector<char> done(n, 0);
  while (!heap.empty()) {
    auto [v, l] = heap.top();
    heap.pop();
    if (done[l] || v != value[l]) continue;
    done[l] = 1;
    for (uint32_t r : uses[l]) {
      max_premise[r] = std::max(max_premise[r], v);
      if (--remaining[r] != 0) continue;
      const int32_t c = problem.rules[r].conclusion;
      const int candidate = max_premise[r] + 1;
      if (!done[c] && candidate < value[c]) {
        value[c] = candidate;
        heap.emplace(candidate, c);
      }
    }
  }
  return value;
}

}  // namespace

std::vector<int> derivation_depths(const IndexedProblem& problem) {
  std::vector<int> seed(problem.num_literals, kUnreached);
  for (int32_t f : problem.facts) seed[f] = 0;
  std::vector<char> enabled(problem.rules.size(), 1);
  return least_levels(problem, std::move(seed), enabled);
}

std::vector<int> failure_depths(const IndexedProblem& problem,
                                std::span<const int> derivation, int cap) {
  const auto n = static_cast<std::size_t>(problem.num_literals);
  std::vector<char> concluded(n, 0);
  for (const auto& rule : problem.rules) concluded[rule.conclusion] = 1;

  std::vector<int> seed(n, kUnreached);
  for (std::size_t l = 0; l < n; ++l) {
    if (derivation[l] != kUnreached) {
      seed[l] = derivation[l];
    } else if (!concluded[l]) {
      seed[l] = 0;
    }
  }
  std::vector<char> enabled(problem.rules.size(), 0);
  for (std::size_t r = 0; r < problem.rules.size(); ++r) {
    enabled[r] = derivation[problem.rules[r].conclusion] == kUnreached;
  }
  auto value = least_levels(problem, std::move(seed), enabled);
  for (std::size_t l = 0; l < n; ++l) {
    if (derivation[l] == kUnreached) value[l] = std::min(value[l], cap);
  }
  return value;
}

LabelDepth label_and_depth(const IndexedProblem& problem, int cap) {
  const auto depths = derivation_depths(problem);
  if (depths[problem.query] != kUnreached) {
    return {true, depths[problem.query]};
  }
  const auto failing = failure_depths(problem, depths, cap);
  return {false, failing[problem.query]};
}

std::vector<std::size_t> oracle_schedule(const IndexedProblem& problem,
                                         bool stop_at_query) {
  std::vector<char> derived(problem.num_literals, 0);
  for (int32_t f : problem.facts) derived[f] = 1;
  std::vector<char> applied(problem.rules.size(), 0);
  std::vector<std::size_t> order;
  for (;;) {
    if (stop_at_query && derived[problem.query]) break;
    bool fired = false;
    for (std::size_t r = 0; r < problem.rules.size(); ++r) {
      const auto& rule = problem.rules[r];
      if (applied[r] || derived[rule.conclusion]) continue;
      const auto premises = rule.premises();
      if (!std::all_of(premises.begin(), premises.end(),
                       [&](int32_t p) { return derived[p] != 0; })) {
        continue;
      }
      applied[r] = 1;
      derived[rule.conclusion] = 1;
      order.push_back(r);
      fired = true;
      break;
    }
    if (!fired) break;
  }
  return order;
}

}  // namespace proofloop::horn
