#include "proofloop/engine.hpp"

#include <algorithm>

#include "proofloop/parallel.hpp"
#include "proofloop/rng.hpp"

namespace proofloop {

std::string_view to_string(Rejection reason) noexcept {
  switch (reason) {
    case Rejection::not_in_problem: return "not_in_problem";
    case Rejection::not_applicable: return "not_applicable";
    case Rejection::malformed: return "malformed";
  }
  return "?";
}

std::optional<Rejection> parse_rejection(std::string_view name) {
  for (auto r : {Rejection::not_in_problem, Rejection::not_applicable,
                 Rejection::malformed}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::proved_true: return "True";
    case Verdict::proved_false: return "False";
    case Verdict::unresolved: return "Unresolved";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  for (auto v : {Verdict::proved_true, Verdict::proved_false, Verdict::unresolved}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

StepOutcome step_transition(const ProofState& state, const Proposal& proposal,
                            OrderPolicy order) {
  if (proposal.is_terminal()) return Terminated{proposal.terminal_value()};
  if (proposal.is_malformed()) return Rejected{Rejection::malformed};
  auto rule = state.index().find_rule(proposal.rule());
  if (!rule) return Rejected{Rejection::not_in_problem};
  if (!state.is_applicable(*rule)) return Rejected{Rejection::not_applicable};
  ProofState next = state.apply(*rule);
  std::string input = render_state(next, order);
  return Accepted{std::move(next), std::move(input)};
}

ProofTrace run_proof(std::shared_ptr<const ProblemIndex> problem,
                     Proposer& proposer, const EngineConfig& config,
                     std::string problem_id) {
  const bool truth = problem->truth().label;
  const int k = std::max(1, config.candidates_per_step);
  const uint64_t problem_seed =
      config.shuffle_seed ? derive_seed(*config.shuffle_seed, fnv1a(problem_id))
                          : 0;

  ProofTrace trace;
  trace.problem_id = std::move(problem_id);
  ProofState state(std::move(problem));

  auto unresolved = [&] {
    trace.terminal = Verdict::unresolved;
    trace.predicted_label = !truth;
  };

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    trace.iterations_used = iteration;
    const OrderPolicy order =
        config.shuffle_seed
            ? OrderPolicy::shuffle(derive_seed(problem_seed, iteration))
            : OrderPolicy::canonical();

    std::vector<Proposal> proposals;
    try {
      proposals = proposer.propose({state, k, iteration, order});
    } catch (ProposerFailure& failure) {
      unresolved();
      failure.set_partial_trace(std::make_shared<const ProofTrace>(trace));
      throw;
    } catch (const std::exception& e) {
      unresolved();
      ProposerFailure failure(std::string("proposer crashed: ") + e.what());
      failure.set_partial_trace(std::make_shared<const ProofTrace>(trace));
      throw failure;
    }
    if (proposals.empty()) proposals.push_back(make_malformed(""));
    std::stable_sort(proposals.begin(), proposals.end(),
                     [](const Proposal& a, const Proposal& b) {
                       return a.rank < b.rank;
                     });
    if (proposals.size() > static_cast<std::size_t>(k)) proposals.resize(k);

    // The first valid candidate wins; invalid ones ranked above it are
    // dropped unrecorded. Only a step with no valid candidate is faulty.
    std::vector<FaultyProposal> rejected;
    bool accepted = false;
    for (const auto& proposal : proposals) {
      StepOutcome outcome = step_transition(state, proposal, order);
      if (auto* done = std::get_if<Terminated>(&outcome)) {
        trace.terminal = done->value ? Verdict::proved_true : Verdict::proved_false;
        trace.predicted_label = done->value;
        return trace;
      }
      if (auto* ok = std::get_if<Accepted>(&outcome)) {
        state = std::move(ok->state);
        trace.accepted_steps.push_back(state.problem().rules[state.steps().back()]);
        accepted = true;
        break;
      }
      rejected.push_back({iteration, proposal_text(proposal),
                          std::get<Rejected>(outcome).reason});
    }
    if (accepted) continue;
    trace.faulty_proposals.insert(trace.faulty_proposals.end(), rejected.begin(),
                                  rejected.end());
    if (!config.retry_on_invalid) break;
  }
  unresolved();
  return trace;
}

ProofTrace run_proof(const Problem& problem, Proposer& proposer,
                     const EngineConfig& config, std::string problem_id) {
  return run_proof(std::make_shared<const ProblemIndex>(problem), proposer,
                   config, std::move(problem_id));
}

std::vector<ProofTrace> run_batch(std::span<const Problem> problems,
                                  std::span<const std::string> ids,
                                  const ProposerFactory& factory,
                                  const EngineConfig& config, unsigned jobs) {
  std::vector<ProofTrace> traces(problems.size());
  parallel_for(problems.size(), jobs, [&](std::size_t i) {
    auto proposer = factory(i);
    traces[i] = run_proof(problems[i], *proposer, config,
                          i < ids.size() ? ids[i] : std::to_string(i));
  });
  return traces;
}

}  // namespace proofloop
