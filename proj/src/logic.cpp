#include "proofloop/logic.hpp"

#include <algorithm>
#include <utility>

namespace proofloop {
namespace {

std::vector<Literal> sorted_premises(const Rule& rule) {
  auto premises = rule.premises;
  std::sort(premises.begin(), premises.end());
  return premises;
}

// Dense-id compilation shared by forward_closure and ProblemIndex.
class Compiler {
 public:
  int32_t intern(const Literal& literal) {
    auto [it, inserted] =
        ids_.emplace(literal.str(), static_cast<int32_t>(literals_.size()));
    if (inserted) literals_.push_back(literal);
    return it->second;
  }

  horn::IndexedRule compile(const Rule& rule) {
    horn::IndexedRule out;
    out.arity = static_cast<uint8_t>(rule.premises.size());
    for (std::size_t i = 0; i < rule.premises.size(); ++i) {
      out.premise_ids[i] = intern(rule.premises[i]);
    }
    out.conclusion = intern(rule.conclusion);
    return out;
  }

  std::vector<Literal>& literals() { return literals_; }
  std::unordered_map<std::string, int32_t>& ids() { return ids_; }

 private:
  std::vector<Literal> literals_;
  std::unordered_map<std::string, int32_t> ids_;
};

}  // namespace

bool is_valid_literal(std::string_view name) noexcept {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
}

bool is_well_formed(const Rule& rule) noexcept {
  const auto& ps = rule.premises;
  if (ps.empty() || ps.size() > 3) return false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] == rule.conclusion) return false;
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (ps[i] == ps[j]) return false;
    }
  }
  return true;
}

bool same_rule(const Rule& a, const Rule& b) {
  return a.conclusion == b.conclusion &&
         a.premises.size() == b.premises.size() &&
         sorted_premises(a) == sorted_premises(b);
}

std::string describe(const Rule& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.premises.size(); ++i) {
    if (i != 0) out += ", ";
    out += rule.premises[i].str();
  }
  out += " => ";
  out += rule.conclusion.str();
  return out;
}

void validate_problem(const Problem& problem) {
  auto check = [](const Literal& l) {
    if (!is_valid_literal(l.str())) {
      throw InvalidProblem("illegal literal '" + l.str() + "'");
    }
  };
  check(problem.query);
  std::set<std::pair<Literal, std::vector<Literal>>> seen_rules;
  for (const auto& rule : problem.rules) {
    for (const auto& p : rule.premises) check(p);
    check(rule.conclusion);
    if (!is_well_formed(rule)) {
      throw InvalidProblem("malformed rule '" + describe(rule) + "'");
    }
    if (!seen_rules.emplace(rule.conclusion, sorted_premises(rule)).second) {
      throw InvalidProblem("duplicate rule '" + describe(rule) + "'");
    }
  }
  std::set<Literal> seen_facts;
  for (const auto& f : problem.facts) {
    check(f);
    if (!seen_facts.insert(f).second) {
      throw InvalidProblem("duplicate fact '" + f.str() + "'");
    }
  }
  if (problem.depth && *problem.depth < 0) {
    throw InvalidProblem("negative depth");
  }
}

bool equal_as_sets(const Problem& a, const Problem& b) {
  if (!(a.query == b.query)) return false;
  if (a.rules.size() != b.rules.size() || a.facts.size() != b.facts.size()) {
    return false;
  }
  std::set<Literal> fa(a.facts.begin(), a.facts.end());
  std::set<Literal> fb(b.facts.begin(), b.facts.end());
  if (fa != fb) return false;
  std::set<std::pair<Literal, std::vector<Literal>>> ra;
  std::set<std::pair<Literal, std::vector<Literal>>> rb;
  for (const auto& r : a.rules) ra.emplace(r.conclusion, sorted_premises(r));
  for (const auto& r : b.rules) rb.emplace(r.conclusion, sorted_premises(r));
  return ra == rb;
}

ClosureResult forward_closure(std::span<const Rule> rules,
                              std::span<const Literal> facts) {
  Compiler compiler;
  horn::IndexedProblem indexed;
  for (const auto& f : facts) indexed.facts.push_back(compiler.intern(f));
  for (const auto& r : rules) indexed.rules.push_back(compiler.compile(r));
  indexed.num_literals = static_cast<int32_t>(compiler.literals().size());
  indexed.query = 0;

  ClosureResult result;
  if (indexed.num_literals == 0) return result;
  const auto depths = horn::derivation_depths(indexed);
  for (int32_t l = 0; l < indexed.num_literals; ++l) {
    if (depths[l] == horn::kUnreached) continue;
    result.derived.insert(compiler.literals()[l]);
    result.derivation_depth.emplace(compiler.literals()[l], depths[l]);
  }
  for (std::size_t r : horn::oracle_schedule(indexed, false)) {
    result.applied_order.push_back(rules[r]);
  }
  return result;
}

horn::LabelDepth label_and_depth(const Problem& problem, int depth_cap) {
  Compiler compiler;
  horn::IndexedProblem indexed;
  indexed.query = compiler.intern(problem.query);
  for (const auto& f : problem.facts) indexed.facts.push_back(compiler.intern(f));
  for (const auto& r : problem.rules) indexed.rules.push_back(compiler.compile(r));
  indexed.num_literals = static_cast<int32_t>(compiler.literals().size());
  return horn::label_and_depth(indexed, depth_cap);
}

std::vector<Rule> applicable_rules(std::span<const Rule> rules,
                                   const std::set<Literal>& derived,
                                   std::span<const Rule> applied) {
  std::vector<Rule> out;
  for (const auto& rule : rules) {
    const bool done = std::any_of(applied.begin(), applied.end(),
                                  [&](const Rule& a) { return same_rule(a, rule); });
    if (done) continue;
    const bool ready =
        std::all_of(rule.premises.begin(), rule.premises.end(),
                    [&](const Literal& p) { return derived.contains(p); });
    if (ready) out.push_back(rule);
  }
  return out;
}

ProblemIndex::ProblemIndex(Problem problem) : problem_(std::move(problem)) {
  validate_problem(problem_);
  Compiler compiler;
  indexed_.query = compiler.intern(problem_.query);
  for (const auto& f : problem_.facts) indexed_.facts.push_back(compiler.intern(f));
  for (std::size_t i = 0; i < problem_.rules.size(); ++i) {
    const auto& rule = problem_.rules[i];
    indexed_.rules.push_back(compiler.compile(rule));
    rules_by_conclusion_.emplace(rule.conclusion.str(), i);
  }
  indexed_.num_literals = static_cast<int32_t>(compiler.literals().size());
  literals_ = std::move(compiler.literals());
  ids_ = std::move(compiler.ids());

  if (problem_.label && problem_.depth) {
    truth_ = {*problem_.label, *problem_.depth};
  } else {
    truth_ = horn::label_and_depth(indexed_, kDefaultDepthCap);
  }
}

std::optional<int32_t> ProblemIndex::literal_id(const Literal& literal) const {
  auto it = ids_.find(literal.str());
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ProblemIndex::find_rule(const Rule& rule) const {
  auto [lo, hi] = rules_by_conclusion_.equal_range(rule.conclusion.str());
  for (auto it = lo; it != hi; ++it) {
    if (same_rule(problem_.rules[it->second], rule)) return it->second;
  }
  return std::nullopt;
}

ProofState::ProofState(std::shared_ptr<const ProblemIndex> index)
    : index_(std::move(index)),
      derived_(index_->indexed().num_literals, 0),
      applied_(index_->indexed().rules.size(), 0) {
  for (int32_t f : index_->indexed().facts) derived_[f] = 1;
}

ProofState::ProofState(Problem problem)
    : ProofState(std::make_shared<const ProblemIndex>(std::move(problem))) {}

bool ProofState::is_derived(const Literal& literal) const {
  auto id = index_->literal_id(literal);
  return id && derived_[*id];
}

std::set<Literal> ProofState::derived_set() const {
  std::set<Literal> out;
  for (std::size_t l = 0; l < derived_.size(); ++l) {
    if (derived_[l]) out.insert(index_->literal(static_cast<int32_t>(l)));
  }
  return out;
}

bool ProofState::is_applicable(std::size_t rule) const noexcept {
  const auto premises = index_->indexed().rules[rule].premises();
  return std::all_of(premises.begin(), premises.end(),
                     [&](int32_t p) { return derived_[p] != 0; });
}

bool ProofState::is_productive(std::size_t rule) const noexcept {
  return !applied_[rule] &&
         !derived_[index_->indexed().rules[rule].conclusion] &&
         is_applicable(rule);
}

bool ProofState::has_productive_rule() const noexcept {
  for (std::size_t r = 0; r < applied_.size(); ++r) {
    if (is_productive(r)) return true;
  }
  return false;
}

ProofState ProofState::apply(std::size_t rule) const {
  ProofState next = *this;
  const int32_t c = index_->indexed().rules[rule].conclusion;
  next.applied_[rule] = 1;
  next.steps_.push_back(rule);
  if (!next.derived_[c]) {
    next.derived_[c] = 1;
    next.appended_.push_back(index_->literal(c));
  }
  return next;
}

ProofState apply_rule(const ProofState& state, const Rule& rule) {
  auto found = state.index().find_rule(rule);
  if (!found) throw NotInProblem(rule);
  if (!state.is_applicable(*found)) throw NotApplicable(rule);
  return state.apply(*found);
}

}  // namespace proofloop
