#pragma once

// The symbolic side of the proof loop: ask a proposer for the next step,
// validate it against the problem, apply it, re-render the state, repeat
// until the proposer answers True/False or the iteration cap is reached.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "proofloop/logic.hpp"
#include "proofloop/proposal.hpp"
#include "proofloop/proposers.hpp"
#include "proofloop/textwire.hpp"

namespace proofloop {

struct EngineConfig {
  int max_iterations = 100;
  int candidates_per_step = 1;
  bool retry_on_invalid = true;
  // When set, every proposer input is rendered in a shuffled item order
  // seeded per (problem, iteration).
  std::optional<uint64_t> shuffle_seed;
};

enum class Rejection { not_in_problem, not_applicable, malformed };

std::string_view to_string(Rejection reason) noexcept;
std::optional<Rejection> parse_rejection(std::string_view name);

struct FaultyProposal {
  int iteration = 0;
  std::string text;
  Rejection reason = Rejection::malformed;

  friend bool operator==(const FaultyProposal&, const FaultyProposal&) = default;
};

enum class Verdict { proved_true, proved_false, unresolved };

std::string_view to_string(Verdict verdict) noexcept;
std::optional<Verdict> parse_verdict(std::string_view name);

struct ProofTrace {
  std::string problem_id;
  std::vector<Rule> accepted_steps;
  std::vector<FaultyProposal> faulty_proposals;
  Verdict terminal = Verdict::unresolved;
  int iterations_used = 0;
  // Unresolved runs predict the opposite of the ground truth, so they count
  // as a false positive or false negative.
  bool predicted_label = false;

  friend bool operator==(const ProofTrace&, const ProofTrace&) = default;
};

// ---------------------------------------------------------------------------

struct Accepted {
  ProofState state;
  std::string next_input;
};
struct Rejected {
  Rejection reason;
};
struct Terminated {
  bool value;
};
using StepOutcome = std::variant<Accepted, Rejected, Terminated>;

StepOutcome step_transition(const ProofState& state, const Proposal& proposal,
                            OrderPolicy order = OrderPolicy::canonical());

// Throws ProposerFailure with the partial trace attached.
ProofTrace run_proof(std::shared_ptr<const ProblemIndex> problem,
                     Proposer& proposer, const EngineConfig& config,
                     std::string problem_id = {});

ProofTrace run_proof(const Problem& problem, Proposer& proposer,
                     const EngineConfig& config, std::string problem_id = {});

// Creates the proposer for problem `index` of a batch.
using ProposerFactory =
    std::function<std::unique_ptr<Proposer>(std::size_t index)>;

// Runs every problem, `jobs` at a time. Output order follows input order
// whatever `jobs` is.
std::vector<ProofTrace> run_batch(std::span<const Problem> problems,
                                  std::span<const std::string> ids,
                                  const ProposerFactory& factory,
                                  const EngineConfig& config, unsigned jobs = 1);

}  // namespace proofloop
