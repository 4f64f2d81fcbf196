#include "proofloop/auditor.hpp"

#include <map>

namespace proofloop {
namespace {

[[noreturn]] void mismatch(const ProofTrace& trace, int iteration,
                           const std::string& what) {
  throw TraceMismatch("trace '" + trace.problem_id + "' iteration " +
                      std::to_string(iteration) + ": " + what);
}

void add(AuditVerdict& verdict, int iteration, ErrorType type,
         std::string detail) {
  verdict.errors.insert(type);
  verdict.sites.push_back({iteration, type, std::move(detail)});
}

// Types one rejected proposal against the state it was made at.
void judge_faulty(AuditVerdict& verdict, const ProofState& state,
                  const ProofTrace& trace, const FaultyProposal& faulty) {
  const Proposal proposal = parse_proposal(faulty.text);
  Rejection reason;
  if (proposal.is_malformed()) {
    reason = Rejection::malformed;
    add(verdict, faulty.iteration, ErrorType::non_existing_rule,
        "malformed proposal '" + faulty.text + "'");
  } else if (proposal.is_terminal()) {
    mismatch(trace, faulty.iteration, "terminal recorded as faulty");
  } else if (auto rule = state.index().find_rule(proposal.rule()); !rule) {
    reason = Rejection::not_in_problem;
    add(verdict, faulty.iteration, ErrorType::non_existing_rule,
        "rule not in problem: " + describe(proposal.rule()));
  } else if (!state.is_applicable(*rule)) {
    reason = Rejection::not_applicable;
    add(verdict, faulty.iteration, ErrorType::inapplicable_rule,
        "unmet premises: " + describe(proposal.rule()));
  } else {
    mismatch(trace, faulty.iteration,
             "valid proposal recorded as faulty: " + faulty.text);
  }
  if (reason != faulty.reason) {
    mismatch(trace, faulty.iteration,
             "recorded reason " + std::string(to_string(faulty.reason)) +
                 " disagrees with replay");
  }
}

}  // namespace

AuditVerdict audit_trace(std::shared_ptr<const ProblemIndex> problem,
                         const ProofTrace& trace) {
  AuditVerdict verdict;
  verdict.problem_id = trace.problem_id;
  ProofState state(std::move(problem));

  std::map<int, std::vector<const FaultyProposal*>> faulty_at;
  for (const auto& f : trace.faulty_proposals) {
    if (f.iteration < 1 || f.iteration > trace.iterations_used) {
      mismatch(trace, f.iteration, "faulty proposal outside the run");
    }
    faulty_at[f.iteration].push_back(&f);
  }

  std::size_t next_step = 0;
  const bool terminated = trace.terminal != Verdict::unresolved;
  for (int it = 1; it <= trace.iterations_used; ++it) {
    const bool last = it == trace.iterations_used;
    if (auto found = faulty_at.find(it); found != faulty_at.end()) {
      if (last && terminated) mismatch(trace, it, "faulty proposals at the terminal");
      for (const auto* f : found->second) judge_faulty(verdict, state, trace, *f);
      continue;
    }
    if (last && terminated) break;
    if (next_step == trace.accepted_steps.size()) {
      // A run aborted by a proposer failure ends on an empty iteration.
      if (last) break;
      mismatch(trace, it, "iteration with neither a step nor a rejection");
    }
    const Rule& step = trace.accepted_steps[next_step++];
    auto rule = state.index().find_rule(step);
    if (!rule) mismatch(trace, it, "accepted step not in problem: " + describe(step));
    if (!state.is_applicable(*rule)) {
      mismatch(trace, it, "accepted step not applicable: " + describe(step));
    }
    state = state.apply(*rule);
  }
  if (next_step != trace.accepted_steps.size()) {
    mismatch(trace, trace.iterations_used, "more accepted steps than iterations");
  }
  if (terminated && trace.iterations_used < 1) {
    mismatch(trace, 0, "terminal without an iteration");
  }

  const int end = trace.iterations_used;
  if (trace.terminal == Verdict::proved_true && !state.query_derived()) {
    add(verdict, end, ErrorType::spurious_match,
        "True with query '" + state.problem().query.str() + "' underived");
  }
  if (trace.terminal == Verdict::proved_false) {
    if (state.query_derived()) {
      add(verdict, end, ErrorType::unexhausted_search,
          "False with the query already derived");
    } else if (state.has_productive_rule()) {
      const auto& rules = state.problem().rules;
      for (std::size_t r = 0; r < rules.size(); ++r) {
        if (state.is_productive(r)) {
          add(verdict, end, ErrorType::unexhausted_search,
              "False while '" + describe(rules[r]) + "' still applies");
          break;
        }
      }
    }
  }
  verdict.consistent = verdict.errors.empty() && trace.faulty_proposals.empty() &&
                       terminated;
  return verdict;
}

AuditVerdict audit_trace(const Problem& problem, const ProofTrace& trace) {
  return audit_trace(std::make_shared<const ProblemIndex>(problem), trace);
}

int64_t ConsistencyTable::count(ErrorType type) const noexcept {
  switch (type) {
    case ErrorType::non_existing_rule: return non_existing_rule;
    case ErrorType::inapplicable_rule: return inapplicable_rule;
    case ErrorType::spurious_match: return spurious_match;
    case ErrorType::unexhausted_search: return unexhausted_search;
  }
  return 0;
}

double ConsistencyTable::frequency(ErrorType type) const noexcept {
  return traces ? 100.0 * static_cast<double>(count(type)) / traces : 0.0;
}

double ConsistencyTable::error_rate() const noexcept {
  return traces ? 100.0 * static_cast<double>(inconsistent) / traces : 0.0;
}

double ConsistencyTable::consistency() const noexcept {
  return traces ? 100.0 * static_cast<double>(traces - inconsistent) / traces
                : 0.0;
}

ConsistencyTable aggregate(std::span<const AuditVerdict> verdicts) {
  if (verdicts.empty()) throw EmptyInput("no verdicts to aggregate");
  ConsistencyTable table;
  for (const auto& v : verdicts) {
    ++table.traces;
    if (!v.consistent) ++table.inconsistent;
    if (v.errors.contains(ErrorType::non_existing_rule)) ++table.non_existing_rule;
    if (v.errors.contains(ErrorType::inapplicable_rule)) ++table.inapplicable_rule;
    if (v.errors.contains(ErrorType::spurious_match)) ++table.spurious_match;
    if (v.errors.contains(ErrorType::unexhausted_search)) ++table.unexhausted_search;
  }
  return table;
}

}  // namespace proofloop
