#include <gtest/gtest.h>

#include "oracles.hpp"
#include "proofloop/auditor.hpp"
#include "proofloop/genset.hpp"

using namespace proofloop;

namespace {

Rule R(std::vector<const char*> premises, const char* conclusion) {
  Rule r;
  for (auto* p : premises) r.premises.emplace_back(p);
  r.conclusion = Literal(conclusion);
  return r;
}

ProofTrace trace(std::vector<Rule> steps, std::vector<FaultyProposal> faulty,
                 Verdict terminal, int iterations) {
  ProofTrace t;
  t.problem_id = "t";
  t.accepted_steps = std::move(steps);
  t.faulty_proposals = std::move(faulty);
  t.terminal = terminal;
  t.iterations_used = iterations;
  t.predicted_label = terminal == Verdict::proved_true;
  return t;
}

const Problem& chain() {
  static const Problem p = parse_problem("q? a,b: b,q: a1");
  return p;
}

const Problem& adorable() {
  static const Problem p = parse_problem(
      "cute? aggressive,attentive,adorable: adorable,x,cute: aggressive1 attentive1");
  return p;
}

}  // namespace

TEST(Audit, OracleTraceIsConsistent) {
  auto v = audit_trace(chain(), trace({R({"a"}, "b"), R({"b"}, "q")}, {},
                                      Verdict::proved_true, 3));
  EXPECT_TRUE(v.consistent);
  EXPECT_TRUE(v.errors.empty());
  EXPECT_EQ(v.problem_id, "t");
}

TEST(Audit, SynonymRuleIsNonExisting) {
  auto t = trace({}, {{1, "aggressive,attentive,courageous:", Rejection::not_in_problem}},
                 Verdict::unresolved, 1);
  auto v = audit_trace(adorable(), t);
  EXPECT_FALSE(v.consistent);
  EXPECT_EQ(v.errors, (std::set<ErrorType>{ErrorType::non_existing_rule}));
  ASSERT_EQ(v.sites.size(), 1u);
  EXPECT_EQ(v.sites[0].iteration, 1);
}

TEST(Audit, TrueOnSynonymIsSpuriousMatch) {
  auto t = trace({R({"aggressive", "attentive"}, "adorable")}, {}, Verdict::proved_true, 2);
  auto v = audit_trace(adorable(), t);
  EXPECT_EQ(v.errors, (std::set<ErrorType>{ErrorType::spurious_match}));
  EXPECT_EQ(v.sites[0].iteration, 2);
}

TEST(Audit, MalformedCountsAsNonExisting) {
  auto t = trace({R({"a"}, "b"), R({"b"}, "q")}, {{2, "strong,brave", Rejection::malformed}},
                 Verdict::proved_true, 4);
  auto v = audit_trace(chain(), t);
  EXPECT_FALSE(v.consistent);
  EXPECT_EQ(v.errors, (std::set<ErrorType>{ErrorType::non_existing_rule}));
}

TEST(Audit, InapplicableRule) {
  auto t = trace({R({"a"}, "b"), R({"b"}, "q")}, {{1, "b,q:", Rejection::not_applicable}},
                 Verdict::proved_true, 4);
  auto v = audit_trace(chain(), t);
  EXPECT_EQ(v.errors, (std::set<ErrorType>{ErrorType::inapplicable_rule}));
}

TEST(Audit, UnexhaustedSearch) {
  auto early = audit_trace(chain(), trace({}, {}, Verdict::proved_false, 1));
  EXPECT_EQ(early.errors, (std::set<ErrorType>{ErrorType::unexhausted_search}));

  auto derived = audit_trace(chain(), trace({R({"a"}, "b"), R({"b"}, "q")}, {},
                                            Verdict::proved_false, 3));
  EXPECT_EQ(derived.errors, (std::set<ErrorType>{ErrorType::unexhausted_search}));

  Problem f = parse_problem("q? a,b: b,x,q: a1");
  auto fine = audit_trace(f, trace({R({"a"}, "b")}, {}, Verdict::proved_false, 2));
  EXPECT_TRUE(fine.consistent);
}

TEST(Audit, UnresolvedIsInconsistentWithoutTypedErrors) {
  auto v = audit_trace(chain(), trace({R({"a"}, "b")}, {}, Verdict::unresolved, 1));
  EXPECT_FALSE(v.consistent);
  EXPECT_TRUE(v.errors.empty());
}

TEST(Audit, Mismatches) {
  // Accepted step that is not in the problem.
  EXPECT_THROW(audit_trace(chain(), trace({R({"x"}, "q")}, {}, Verdict::proved_true, 2)),
               TraceMismatch);
  // Accepted step out of order.
  EXPECT_THROW(audit_trace(chain(), trace({R({"b"}, "q")}, {}, Verdict::proved_true, 2)),
               TraceMismatch);
  // A valid proposal recorded as faulty.
  EXPECT_THROW(audit_trace(chain(), trace({}, {{1, "a,b:", Rejection::not_applicable}},
                                          Verdict::unresolved, 1)),
               TraceMismatch);
  // Wrong recorded reason.
  EXPECT_THROW(audit_trace(chain(), trace({}, {{1, "b,q:", Rejection::not_in_problem}},
                                          Verdict::unresolved, 1)),
               TraceMismatch);
  // A terminal recorded as faulty.
  EXPECT_THROW(audit_trace(chain(), trace({}, {{1, "True", Rejection::malformed}},
                                          Verdict::unresolved, 1)),
               TraceMismatch);
  // More steps than iterations.
  EXPECT_THROW(audit_trace(chain(), trace({R({"a"}, "b"), R({"b"}, "q")}, {},
                                          Verdict::unresolved, 1)),
               TraceMismatch);
  // Faulty proposal outside the run.
  EXPECT_THROW(audit_trace(chain(), trace({}, {{5, "zz,y:", Rejection::not_in_problem}},
                                          Verdict::unresolved, 2)),
               TraceMismatch);
  // A gap in the middle of the run.
  EXPECT_THROW(audit_trace(chain(), trace({}, {}, Verdict::proved_true, 3)), TraceMismatch);
}

TEST(Aggregate, CountsAndRates) {
  std::vector<AuditVerdict> vs(4);
  vs[0].consistent = true;
  vs[1].errors = {ErrorType::non_existing_rule, ErrorType::inapplicable_rule};
  vs[2].errors = {ErrorType::non_existing_rule};
  vs[3].errors = {};
  const auto t = aggregate(vs);
  EXPECT_EQ(t.traces, 4);
  EXPECT_EQ(t.inconsistent, 3);
  EXPECT_EQ(t.non_existing_rule, 2);
  EXPECT_EQ(t.inapplicable_rule, 1);
  EXPECT_EQ(t.spurious_match, 0);
  EXPECT_DOUBLE_EQ(t.frequency(ErrorType::non_existing_rule), 50.0);
  EXPECT_DOUBLE_EQ(t.error_rate(), 75.0);
  EXPECT_DOUBLE_EQ(t.consistency(), 25.0);
  EXPECT_THROW(aggregate(std::vector<AuditVerdict>{}), EmptyInput);
}

// Random proposers against random problems: every trace audits, consistency
// holds exactly when nothing went wrong, and a consistent run predicts the
// truth.
TEST(AuditProperty, Invariants) {
  Rng rng(21);
  int64_t consistent = 0;
  int64_t correct = 0;
  std::vector<AuditVerdict> verdicts;
  for (int i = 0; i < 600; ++i) {
    const Problem p = oracle::random_problem(rng);
    const bool truth = oracle::naive_label(p);
    CallbackProposer chaos([&](const std::string& state, int) {
      const auto roll = rng.below(12);
      if (roll == 0) return std::vector<std::string>{rng.chance(0.5) ? "True" : "False"};
      if (roll == 1) return std::vector<std::string>{"zz,yy:"};
      if (roll < 6 && !p.rules.empty()) {
        return std::vector<std::string>{
            proposal_text(make_rule_proposal(p.rules[rng.below(p.rules.size())]))};
      }
      ParsedState parsed = parse_state(state);
      ProofState s(p);
      for (const auto& r : parsed.proof) s = apply_rule(s, r);
      return std::vector<std::string>{proposal_text(oracle_propose(s))};
    });
    EngineConfig cfg;
    cfg.max_iterations = 25;
    const auto t = run_proof(p, chaos, cfg, std::to_string(i));
    AuditVerdict v;
    ASSERT_NO_THROW(v = audit_trace(p, t));
    if (v.consistent) {
      ++consistent;
      ASSERT_TRUE(t.faulty_proposals.empty());
      ASSERT_NE(t.terminal, Verdict::unresolved);
      ASSERT_EQ(t.predicted_label, truth) << serialize_problem(p);
    }
    if (!t.faulty_proposals.empty()) ASSERT_FALSE(v.errors.empty());
    if (t.predicted_label == truth) ++correct;
    verdicts.push_back(std::move(v));
  }
  EXPECT_GT(consistent, 0);
  const auto table = aggregate(verdicts);
  EXPECT_EQ(table.traces - table.inconsistent, consistent);
  EXPECT_GE(correct, consistent);
}

TEST(AuditProperty, OracleAlwaysConsistent) {
  GenConfig cfg;
  cfg.num_problems = 210;
  for (auto kind : {SubsetKind::rp, SubsetKind::lp, SubsetKind::rp_balanced}) {
    for (const auto& e : generate(kind, cfg).entries) {
      OracleProposer o;
      ASSERT_TRUE(audit_trace(e.problem, run_proof(e.problem, o, {})).consistent);
    }
  }
}
