#include <gtest/gtest.h>

#include "json.hpp"

#include "proofloop/records.hpp"

using namespace proofloop;

TEST(Records, DatasetRoundTrip) {
  GenConfig cfg;
  cfg.num_problems = 14;
  for (const auto& e : generate(SubsetKind::lp, cfg).entries) {
    const std::string line = dataset_record(e, SubsetKind::lp, ProofOrder::forward);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    const auto j = nlohmann::json::parse(line);
    ASSERT_EQ(j["subset"], "LP");
    ASSERT_EQ(j["proof"], render_whole_proof(e.problem, ProofOrder::forward));
    auto back = parse_dataset_record(line);
    ASSERT_EQ(back.entry.id, e.id);
    ASSERT_EQ(back.kind, SubsetKind::lp);
    ASSERT_TRUE(equal_as_sets(back.entry.problem, e.problem));
    ASSERT_EQ(back.entry.problem.label, e.problem.label);
    ASSERT_EQ(back.entry.problem.depth, e.problem.depth);
  }
}

TEST(Records, TraceRoundTrip) {
  ProofTrace t;
  t.problem_id = "p7";
  t.accepted_steps = {parse_proposal("a,b:").rule()};
  t.faulty_proposals = {{1, "what, \"now\"", Rejection::malformed},
                        {2, "b,q:", Rejection::not_applicable}};
  t.terminal = Verdict::unresolved;
  t.iterations_used = 100;
  t.predicted_label = true;
  EXPECT_EQ(parse_trace_record(trace_record(t)), t);

  // Without "predicted" the terminal decides.
  auto old = parse_trace_record(
      R"({"problem_id":"x","steps":[],"faulty":[],"terminal":"True","iterations":1})");
  EXPECT_TRUE(old.predicted_label);
}

TEST(Records, StepAndVerdictRoundTrip) {
  StepRecord s{"p1", 2, {"q? a,b: b,q: a1 b1 ; a,b:", "b,q:"}};
  auto back = parse_step_record(step_record(s));
  EXPECT_EQ(back.problem_id, "p1");
  EXPECT_EQ(back.step_index, 2);
  EXPECT_EQ(back.instance.input, s.instance.input);
  EXPECT_EQ(back.instance.target, "b,q:");

  AuditVerdict v;
  v.problem_id = "p1";
  v.errors = {ErrorType::spurious_match, ErrorType::non_existing_rule};
  v.sites = {{1, ErrorType::non_existing_rule, "x"}, {3, ErrorType::spurious_match, "y"}};
  EXPECT_EQ(parse_verdict_record(verdict_record(v)), v);
}

TEST(Records, BadRecords) {
  for (const char* bad : {"", "not json", "[]", R"({"problem_id":"x"})",
                          R"({"problem_id":1,"steps":[],"faulty":[],"terminal":"True","iterations":1})",
                          R"({"problem_id":"x","steps":["junk"],"faulty":[],"terminal":"True","iterations":1})",
                          R"({"problem_id":"x","steps":[],"faulty":[],"terminal":"maybe","iterations":1})",
                          R"({"problem_id":"x","steps":[],"faulty":[{"iter":1,"text":"a","reason":"odd"}],"terminal":"Unresolved","iterations":1})"}) {
    EXPECT_THROW(parse_trace_record(bad), BadRecord) << bad;
  }
  EXPECT_THROW(parse_dataset_record(R"({"id":"x","text":"q? a"})"), BadRecord);
  EXPECT_THROW(parse_verdict_record(R"({"problem_id":"x","consistent":true,"errors":["Nope"],"sites":[]})"),
               BadRecord);
}
