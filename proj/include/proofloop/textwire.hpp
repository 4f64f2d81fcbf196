#pragma once

// Text form of problems, proof states, step instances and proposals.
//
//   problem  := query {" " rule} {" " fact}
//   state    := problem " ;" {" " rule}
//   proof    := {rule " "} ("True" | "False")
//   query    := literal "?"
//   rule     := literal "," {literal ","} literal ":"   (last literal concludes)
//   fact     := literal "1"
//   literal  := [a-z]+
//
// Every literal is followed by exactly one demarcation character, so a left to
// right scan segments any valid text. Items are separated by a single space
// and there is never leading or trailing whitespace. Parsing accepts query,
// rules and facts in any order.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/logic.hpp"
#include "proofloop/proposal.hpp"

namespace proofloop {

// Canonical: query, rules in problem order, facts in problem order.
// Shuffled: the items are first put in lexicographic order and then permuted
// by `seed`, so the output depends only on the problem's content (as sets),
// the seed, and nothing else.
struct OrderPolicy {
  bool shuffled = false;
  uint64_t seed = 0;

  static OrderPolicy canonical() { return {}; }
  static OrderPolicy shuffle(uint64_t seed) { return {true, seed}; }
};

std::string serialize_rule(const Rule& rule);

// Throws IllegalLiteral.
std::string serialize_problem(const Problem& problem,
                              OrderPolicy order = OrderPolicy::canonical());

// Throws ParseError. Label and depth are left unset.
Problem parse_problem(std::string_view text);

// Never throws: unparseable text becomes Malformed. Surrounding whitespace is
// ignored.
Proposal parse_proposal(std::string_view text);

std::string proposal_text(const Proposal& proposal);

// The proposer input for a state: the problem with derived facts appended as
// facts, then " ;" and the accepted steps in order.
std::string render_state(const ProofState& state,
                         OrderPolicy order = OrderPolicy::canonical());

struct ParsedState {
  Problem problem;          // facts include the appended derived facts
  std::vector<Rule> proof;  // accepted steps in order
};

// Throws ParseError.
ParsedState parse_state(std::string_view text);

struct StepInstance {
  std::string input;
  std::string target;

  friend bool operator==(const StepInstance&, const StepInstance&) = default;
};

// Input is render_state() after replaying `prefix`; target is the oracle's
// next step. Throws InvalidPrefix when a prefix step is absent or
// inapplicable.
StepInstance render_step_instance(const Problem& problem,
                                  std::span<const Rule> prefix,
                                  OrderPolicy order = OrderPolicy::canonical());

enum class ProofOrder { forward, backward };

// Serialized steps followed by "True" or "False". Forward order is the
// forward-chaining oracle's; backward order lists rules goal-first as a
// depth-first backward chainer visits them.
std::string render_whole_proof(const Problem& problem, ProofOrder order);

}  // namespace proofloop
