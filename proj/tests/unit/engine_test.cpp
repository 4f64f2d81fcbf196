#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"
#include "proofloop/auditor.hpp"
#include "proofloop/engine.hpp"
#include "proofloop/genset.hpp"

using namespace proofloop;

namespace {

Rule R(std::vector<const char*> premises, const char* conclusion) {
  Rule r;
  for (auto* p : premises) r.premises.emplace_back(p);
  r.conclusion = Literal(conclusion);
  return r;
}

// Returns whatever the function says, counting calls.
class ScriptedProposer : public Proposer {
 public:
  using Fn = std::function<std::vector<Proposal>(const ProposeRequest&)>;
  explicit ScriptedProposer(Fn fn) : fn_(std::move(fn)) {}
  std::vector<Proposal> propose(const ProposeRequest& r) override {
    ++calls;
    return fn_(r);
  }
  int calls = 0;

 private:
  Fn fn_;
};

const Problem& sample() {
  // query cute; aggressive and attentive known; the rule concludes adorable.
  static const Problem p = parse_problem(
      "cute? aggressive,attentive,adorable: adorable,cute: aggressive1 attentive1");
  return p;
}

const Problem& chain() {
  static const Problem p = parse_problem("q? a,b: b,q: a1");
  return p;
}

const Problem& false_chain() {
  static const Problem p = parse_problem("q? a,b: b,x,q: a1");
  return p;
}

std::vector<Problem> corpus(int n, uint64_t seed) {
  GenConfig c;
  c.num_problems = n;
  c.seed = seed;
  std::vector<Problem> out;
  for (auto kind : {SubsetKind::rp, SubsetKind::lp, SubsetKind::rp_balanced}) {
    for (auto& e : generate(kind, c).entries) out.push_back(std::move(e.problem));
  }
  return out;
}

}  // namespace

TEST(StepTransition, AcceptsApplicableStep) {
  ProofState s(sample());
  auto out = step_transition(s, make_rule_proposal(R({"aggressive", "attentive"}, "adorable")));
  auto* ok = std::get_if<Accepted>(&out);
  ASSERT_NE(ok, nullptr);
  EXPECT_TRUE(ok->state.is_derived(Literal("adorable")));
  EXPECT_FALSE(s.is_derived(Literal("adorable")));
  EXPECT_EQ(ok->next_input,
            "cute? aggressive,attentive,adorable: adorable,cute: aggressive1 "
            "attentive1 adorable1 ; aggressive,attentive,adorable:");
  EXPECT_EQ(ok->next_input, render_state(ok->state));
}

TEST(StepTransition, AllOutcomes) {
  ProofState s(sample());
  auto t = step_transition(s, make_terminal(true));
  ASSERT_TRUE(std::holds_alternative<Terminated>(t));
  EXPECT_TRUE(std::get<Terminated>(t).value);
  EXPECT_FALSE(std::get<Terminated>(step_transition(s, make_terminal(false))).value);

  auto syn = step_transition(s, make_rule_proposal(R({"aggressive", "attentive"}, "courageous")));
  EXPECT_EQ(std::get<Rejected>(syn).reason, Rejection::not_in_problem);

  auto early = step_transition(s, make_rule_proposal(R({"adorable"}, "cute")));
  EXPECT_EQ(std::get<Rejected>(early).reason, Rejection::not_applicable);

  auto junk = step_transition(s, make_malformed("strong,brave"));
  EXPECT_EQ(std::get<Rejected>(junk).reason, Rejection::malformed);
}

TEST(StepTransition, ShuffledInputIsAPermutation) {
  ProofState s(sample());
  auto out = step_transition(s, make_rule_proposal(R({"aggressive", "attentive"}, "adorable")),
                             OrderPolicy::shuffle(3));
  const auto& ok = std::get<Accepted>(out);
  EXPECT_EQ(ok.next_input, render_state(ok.state, OrderPolicy::shuffle(3)));
  EXPECT_TRUE(equal_as_sets(parse_state(ok.next_input).problem,
                            parse_state(render_state(ok.state)).problem));
}

TEST(RunProof, DepthZeroTrueEndsInOneIteration) {
  OracleProposer oracle;
  auto trace = run_proof(parse_problem("q? a,b: q1"), oracle, {}, "z");
  EXPECT_EQ(trace.terminal, Verdict::proved_true);
  EXPECT_EQ(trace.iterations_used, 1);
  EXPECT_TRUE(trace.accepted_steps.empty());
  EXPECT_TRUE(trace.faulty_proposals.empty());
  EXPECT_TRUE(trace.predicted_label);
  EXPECT_EQ(trace.problem_id, "z");
}

TEST(RunProof, OracleChain) {
  OracleProposer oracle;
  auto t = run_proof(chain(), oracle, {});
  EXPECT_EQ(t.terminal, Verdict::proved_true);
  EXPECT_EQ(t.accepted_steps, (std::vector<Rule>{R({"a"}, "b"), R({"b"}, "q")}));
  EXPECT_EQ(t.iterations_used, 3);

  auto f = run_proof(false_chain(), oracle, {});
  EXPECT_EQ(f.terminal, Verdict::proved_false);
  EXPECT_FALSE(f.predicted_label);
  EXPECT_EQ(f.iterations_used, 2);
}

TEST(RunProof, NonExistingRuleHitsTheCap) {
  for (const Problem* p : {&chain(), &false_chain()}) {
    ScriptedProposer bad([](const ProposeRequest&) {
      return std::vector<Proposal>{make_rule_proposal(R({"brave"}, "strong"))};
    });
    auto t = run_proof(*p, bad, {});
    const bool truth = label_and_depth(*p).label;
    EXPECT_EQ(t.terminal, Verdict::unresolved);
    EXPECT_EQ(t.iterations_used, 100);
    EXPECT_EQ(bad.calls, 100);
    ASSERT_EQ(t.faulty_proposals.size(), 100u);
    for (int i = 0; i < 100; ++i) {
      EXPECT_EQ(t.faulty_proposals[i].iteration, i + 1);
      EXPECT_EQ(t.faulty_proposals[i].reason, Rejection::not_in_problem);
      EXPECT_EQ(t.faulty_proposals[i].text, "brave,strong:");
    }
    EXPECT_EQ(t.predicted_label, !truth);
  }
}

TEST(RunProof, FaultyStepRetriesTheSameState) {
  std::vector<std::string> inputs;
  int call = 0;
  ScriptedProposer flaky([&](const ProposeRequest& r) {
    inputs.push_back(render_state(r.state));
    if (call++ == 0) return std::vector<Proposal>{make_rule_proposal(R({"b"}, "q"))};
    return std::vector<Proposal>{oracle_propose(r.state)};
  });
  auto t = run_proof(chain(), flaky, {});
  EXPECT_EQ(t.terminal, Verdict::proved_true);
  ASSERT_EQ(t.faulty_proposals.size(), 1u);
  EXPECT_EQ(t.faulty_proposals[0],
            (FaultyProposal{1, "b,q:", Rejection::not_applicable}));
  EXPECT_EQ(inputs[0], inputs[1]);
  EXPECT_EQ(t.iterations_used, 4);
}

TEST(RunProof, CustomCapAndNoRetry) {
  ScriptedProposer junk([](const ProposeRequest&) {
    return std::vector<Proposal>{make_malformed("banana")};
  });
  EngineConfig cfg;
  cfg.max_iterations = 7;
  auto t = run_proof(chain(), junk, cfg);
  EXPECT_EQ(t.iterations_used, 7);
  EXPECT_EQ(t.faulty_proposals.size(), 7u);

  cfg.retry_on_invalid = false;
  auto once = run_proof(chain(), junk, cfg);
  EXPECT_EQ(once.terminal, Verdict::unresolved);
  EXPECT_EQ(once.iterations_used, 1);
  EXPECT_EQ(once.faulty_proposals.size(), 1u);
  EXPECT_FALSE(once.predicted_label);
}

TEST(RunProof, EmptyResponseIsAFaultyStep) {
  ScriptedProposer silent([](const ProposeRequest&) { return std::vector<Proposal>{}; });
  EngineConfig cfg;
  cfg.max_iterations = 3;
  auto t = run_proof(chain(), silent, cfg);
  ASSERT_EQ(t.faulty_proposals.size(), 3u);
  EXPECT_EQ(t.faulty_proposals[0].reason, Rejection::malformed);
  EXPECT_EQ(t.faulty_proposals[0].text, "");
}

TEST(RunProof, MultipleCandidatesFirstValidWins) {
  EngineConfig cfg;
  cfg.candidates_per_step = 3;
  ScriptedProposer ranked([](const ProposeRequest& r) {
    EXPECT_EQ(r.candidates, 3);
    // Listed out of rank order; the valid one ranks last.
    Proposal good = oracle_propose(r.state);
    good.rank = 2;
    return std::vector<Proposal>{make_rule_proposal(R({"zz"}, "yy"), 1), good,
                                 make_malformed("junk", 0)};
  });
  auto t = run_proof(chain(), ranked, cfg);
  EXPECT_EQ(t.terminal, Verdict::proved_true);
  EXPECT_EQ(t.accepted_steps.size(), 2u);
  EXPECT_TRUE(t.faulty_proposals.empty());
}

TEST(RunProof, MultipleCandidatesAllInvalidAreRecorded) {
  EngineConfig cfg;
  cfg.candidates_per_step = 2;
  cfg.max_iterations = 2;
  ScriptedProposer bad([](const ProposeRequest&) {
    return std::vector<Proposal>{make_rule_proposal(R({"b"}, "q"), 0),
                                 make_malformed("x", 1),
                                 make_malformed("beyond k", 2)};
  });
  auto t = run_proof(chain(), bad, cfg);
  ASSERT_EQ(t.faulty_proposals.size(), 4u);
  EXPECT_EQ(t.faulty_proposals[0].reason, Rejection::not_applicable);
  EXPECT_EQ(t.faulty_proposals[1].reason, Rejection::malformed);
  EXPECT_EQ(t.faulty_proposals[3].iteration, 2);
}

TEST(RunProof, ProposerFailureKeepsPartialTrace) {
  int call = 0;
  ScriptedProposer dies([&](const ProposeRequest& r) -> std::vector<Proposal> {
    if (call++ == 1) throw ProposerFailure("connection closed");
    return {oracle_propose(r.state)};
  });
  try {
    run_proof(chain(), dies, {}, "p");
    FAIL();
  } catch (const ProposerFailure& e) {
    ASSERT_NE(e.partial_trace(), nullptr);
    const auto& t = *e.partial_trace();
    EXPECT_EQ(t.problem_id, "p");
    EXPECT_EQ(t.accepted_steps.size(), 1u);
    EXPECT_EQ(t.iterations_used, 2);
    EXPECT_EQ(t.terminal, Verdict::unresolved);
    EXPECT_FALSE(t.predicted_label);
    // The partial trace still audits cleanly.
    EXPECT_NO_THROW(audit_trace(chain(), t));
  }
}

TEST(RunProof, OtherExceptionsBecomeProposerFailure) {
  ScriptedProposer boom([](const ProposeRequest&) -> std::vector<Proposal> {
    throw std::runtime_error("boom");
  });
  try {
    run_proof(chain(), boom, {});
    FAIL();
  } catch (const ProposerFailure& e) {
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    EXPECT_EQ(e.partial_trace()->iterations_used, 1);
  }
}

TEST(RunProof, CallbackProposerSeesRenderedState) {
  std::vector<std::string> seen;
  CallbackProposer cb([&](const std::string& state, int k) {
    seen.push_back(state);
    EXPECT_EQ(k, 1);
    return std::vector<std::string>{seen.size() == 1 ? "a,b:" : seen.size() == 2 ? "b,q:" : "True"};
  });
  auto t = run_proof(chain(), cb, {});
  EXPECT_EQ(t.terminal, Verdict::proved_true);
  EXPECT_EQ(seen, (std::vector<std::string>{"q? a,b: b,q: a1 ;",
                                            "q? a,b: b,q: a1 b1 ; a,b:",
                                            "q? a,b: b,q: a1 b1 q1 ; a,b: b,q:"}));
}

TEST(RunProof, ShuffleSeedChangesOrderButNotOutcome) {
  std::vector<std::string> seen;
  CallbackProposer cb([&](const std::string& state, int) {
    seen.push_back(state);
    ParsedState parsed = parse_state(state);
    ProofState s(chain());
    for (const auto& r : parsed.proof) s = apply_rule(s, r);
    return std::vector<std::string>{proposal_text(oracle_propose(s))};
  });
  EngineConfig cfg;
  cfg.shuffle_seed = 5;
  auto t = run_proof(chain(), cb, cfg, "id");
  EXPECT_EQ(t.terminal, Verdict::proved_true);
  ASSERT_EQ(seen.size(), 3u);
  // Shuffled renderings still carry the problem plus derived facts.
  Problem first = parse_state(seen[0]).problem;
  EXPECT_TRUE(equal_as_sets(first, chain()));
  std::vector<std::string> again = seen;
  seen.clear();
  run_proof(chain(), cb, cfg, "id");
  EXPECT_EQ(seen, again);
}

// ---------------------------------------------------------------------------
// Properties.

TEST(EngineProperty, OracleCompleteness) {
  OracleProposer oracle;
  for (const auto& p : corpus(140, 3)) {
    auto t = run_proof(p, oracle, {});
    ASSERT_TRUE(t.faulty_proposals.empty());
    ASSERT_EQ(t.terminal, *p.label ? Verdict::proved_true : Verdict::proved_false);
    ASSERT_EQ(t.predicted_label, *p.label);
    ASSERT_EQ(t.iterations_used, static_cast<int>(t.accepted_steps.size()) + 1);
    ASSERT_TRUE(audit_trace(p, t).consistent);
  }
}

TEST(EngineProperty, OracleNeverRejected) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    ProofState s(oracle::random_problem(rng));
    for (int step = 0; step < 20; ++step) {
      auto out = step_transition(s, oracle_propose(s));
      ASSERT_FALSE(std::holds_alternative<Rejected>(out));
      if (std::holds_alternative<Terminated>(out)) break;
      s = std::get<Accepted>(out).state;
    }
  }
}

// A proposer that mixes valid steps, problem rules at the wrong time, rules
// from nowhere, junk and terminals.
TEST(EngineProperty, SoundnessMonotonicityTermination) {
  Rng rng(9);
  for (int i = 0; i < 400; ++i) {
    const Problem p = oracle::random_problem(rng);
    std::vector<std::size_t> sizes;
    ScriptedProposer chaos([&](const ProposeRequest& r) {
      sizes.push_back(r.state.derived_set().size());
      const uint64_t roll = rng.below(20);
      if (roll == 0) return std::vector<Proposal>{make_terminal(rng.chance(0.5))};
      if (roll < 4) return std::vector<Proposal>{make_malformed("nope")};
      if (roll < 7) return std::vector<Proposal>{make_rule_proposal(R({"zz"}, "a"))};
      if (roll < 14 && !p.rules.empty()) {
        return std::vector<Proposal>{make_rule_proposal(p.rules[rng.below(p.rules.size())])};
      }
      return std::vector<Proposal>{oracle_propose(r.state)};
    });
    EngineConfig cfg;
    cfg.max_iterations = 30;
    auto t = run_proof(p, chaos, cfg);
    ASSERT_LE(t.iterations_used, cfg.max_iterations);
    ASSERT_LE(chaos.calls, cfg.max_iterations + 1);

    ProofState replay(p);
    for (const auto& step : t.accepted_steps) {
      ASSERT_NO_THROW(replay = apply_rule(replay, step));
    }
    for (std::size_t k = 1; k < sizes.size(); ++k) {
      ASSERT_GE(sizes[k], sizes[k - 1]);
      ASSERT_LE(sizes[k], sizes[k - 1] + 1);
    }
    ASSERT_NO_THROW(audit_trace(p, t));
  }
}

TEST(RunBatch, OrderIndependentOfJobs) {
  const auto problems = corpus(70, 4);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < problems.size(); ++i) ids.push_back("p" + std::to_string(i));
  auto factory = [](std::size_t) { return std::make_unique<OracleProposer>(); };
  const auto one = run_batch(problems, ids, factory, {}, 1);
  const auto four = run_batch(problems, ids, factory, {}, 4);
  ASSERT_EQ(one.size(), problems.size());
  EXPECT_EQ(one, four);
  EXPECT_EQ(one[5].problem_id, "p5");
}
