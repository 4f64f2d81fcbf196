#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "proofloop/error.hpp"
#include "proofloop/horn.hpp"

namespace proofloop {

inline constexpr int kDefaultDepthCap = 64;

// A propositional atom. Identity is exact string equality: synonyms are
// distinct literals.
class Literal {
 public:
  Literal() = default;
  explicit Literal(std::string name) : name_(std::move(name)) {}

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  std::string name_;
};

// Nonempty and made of lowercase ASCII letters only, so it can never collide
// with a demarcation character.
bool is_valid_literal(std::string_view name) noexcept;

struct Rule {
  std::vector<Literal> premises;
  Literal conclusion;

  friend auto operator<=>(const Rule&, const Rule&) = default;
  friend bool operator==(const Rule&, const Rule&) = default;
};

// 1-3 pairwise distinct premises, conclusion not among them.
bool is_well_formed(const Rule& rule) noexcept;

// Two rules are the same rule when they share the conclusion and the premise
// set; premise order inside a conjunction is not significant.
bool same_rule(const Rule& a, const Rule& b);

// Human-readable "a, b => c" rendering for diagnostics. The wire form lives
// in textwire.hpp.
std::string describe(const Rule& rule);

struct Problem {
  std::vector<Rule> rules;
  std::vector<Literal> facts;
  Literal query;
  std::optional<bool> label;
  std::optional<int> depth;
};

// Throws InvalidProblem on duplicate rules or facts, malformed rules, or
// illegal literals.
void validate_problem(const Problem& problem);

// Rules and facts compared as sets, queries exactly. Label/depth ignored.
bool equal_as_sets(const Problem& a, const Problem& b);

struct ClosureResult {
  std::set<Literal> derived;
  std::map<Literal, int> derivation_depth;
  std::vector<Rule> applied_order;
};

ClosureResult forward_closure(std::span<const Rule> rules,
                              std::span<const Literal> facts);

horn::LabelDepth label_and_depth(const Problem& problem,
                                 int depth_cap = kDefaultDepthCap);

// Rules not in `applied` whose premises are all in `derived`, in problem order.
std::vector<Rule> applicable_rules(std::span<const Rule> rules,
                                   const std::set<Literal>& derived,
                                   std::span<const Rule> applied);

class NotInProblem : public Error {
 public:
  explicit NotInProblem(Rule rule)
      : Error("NotInProblem",
              "rule '" + describe(rule) + "' is not in the problem"),
        rule_(std::move(rule)) {}
  const Rule& rule() const noexcept { return rule_; }

 private:
  Rule rule_;
};

class NotApplicable : public Error {
 public:
  explicit NotApplicable(Rule rule)
      : Error("NotApplicable",
              "rule '" + describe(rule) + "' has unmet premises"),
        rule_(std::move(rule)) {}
  const Rule& rule() const noexcept { return rule_; }

 private:
  Rule rule_;
};

// A validated problem compiled to dense literal ids, shared by every proof
// state derived from it.
class ProblemIndex {
 public:
  explicit ProblemIndex(Problem problem);

  const Problem& problem() const noexcept { return problem_; }
  const horn::IndexedProblem& indexed() const noexcept { return indexed_; }
  const Literal& literal(int32_t id) const { return literals_[id]; }
  std::optional<int32_t> literal_id(const Literal& literal) const;
  // Index of the problem rule equal to `rule` under same_rule().
  std::optional<std::size_t> find_rule(const Rule& rule) const;
  // Ground-truth label/depth: the stored values when present, otherwise
  // computed.
  horn::LabelDepth truth() const { return truth_; }

 private:
  Problem problem_;
  horn::IndexedProblem indexed_;
  std::vector<Literal> literals_;
  std::unordered_map<std::string, int32_t> ids_;
  std::multimap<std::string, std::size_t> rules_by_conclusion_;
  horn::LabelDepth truth_;
};

// Derived facts and applied rules at one point of a proof. Immutable: apply()
// returns a new state.
class ProofState {
 public:
  explicit ProofState(std::shared_ptr<const ProblemIndex> index);
  explicit ProofState(Problem problem);

  const Problem& problem() const noexcept { return index_->problem(); }
  const ProblemIndex& index() const noexcept { return *index_; }
  const std::shared_ptr<const ProblemIndex>& shared_index() const noexcept {
    return index_;
  }

  bool is_derived(const Literal& literal) const;
  bool is_derived(int32_t id) const noexcept { return derived_[id] != 0; }
  bool query_derived() const noexcept {
    return is_derived(index_->indexed().query);
  }
  std::set<Literal> derived_set() const;
  // Conclusions added by accepted steps, in derivation order; initial facts
  // are not repeated here.
  const std::vector<Literal>& appended_facts() const noexcept {
    return appended_;
  }

  bool is_applied(std::size_t rule) const noexcept { return applied_[rule] != 0; }
  bool is_applicable(std::size_t rule) const noexcept;
  // Applicable, not yet applied, and concluding a literal not yet derived.
  bool is_productive(std::size_t rule) const noexcept;
  bool has_productive_rule() const noexcept;
  // Accepted steps as problem rule indices, in order.
  const std::vector<std::size_t>& steps() const noexcept { return steps_; }

  // Precondition: is_applicable(rule).
  ProofState apply(std::size_t rule) const;

 private:
  std::shared_ptr<const ProblemIndex> index_;
  std::vector<char> derived_;
  std::vector<char> applied_;
  std::vector<Literal> appended_;
  std::vector<std::size_t> steps_;
};

// Throws NotInProblem or NotApplicable. Re-applying an already applied rule is
// valid and adds nothing.
ProofState apply_rule(const ProofState& state, const Rule& rule);

}  // namespace proofloop

template <>
struct std::hash<proofloop::Literal> {
  std::size_t operator()(const proofloop::Literal& l) const noexcept {
    return std::hash<std::string>{}(l.str());
  }
};
