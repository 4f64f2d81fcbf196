// Acceptance run. One line per criterion: PASS or FAIL, its name, and the
// measured values. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "proofloop/auditor.hpp"
#include "proofloop/engine.hpp"
#include "proofloop/genset.hpp"
#include "proofloop/metrics.hpp"
#include "proofloop/proposers.hpp"
#include "proofloop/textwire.hpp"

using namespace proofloop;

namespace {

const SubsetKind kKinds[] = {SubsetKind::rp, SubsetKind::lp, SubsetKind::rp_balanced};

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail, double seconds) {
  std::printf("%s %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(ok, name, detail, s);
}

Dataset make(SubsetKind kind, int n, uint64_t seed) {
  GenConfig c;
  c.num_problems = n;
  c.seed = seed;
  c.jobs = jobs();
  return generate(kind, c);
}

std::vector<Problem> problems_of(const Dataset& d) {
  std::vector<Problem> out;
  for (const auto& e : d.entries) out.push_back(e.problem);
  return out;
}

std::vector<std::string> ids_of(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& e : d.entries) out.push_back(e.id);
  return out;
}

// A proposer that never terminates: always a rule from outside the problem.
class NeverEnding final : public Proposer {
 public:
  std::vector<Proposal> propose(const ProposeRequest&) override {
    ++calls;
    Rule r;
    r.premises = {Literal("nowhere")};
    r.conclusion = Literal("elsewhere");
    return {make_rule_proposal(r)};
  }
  int calls = 0;
};

}  // namespace

int main() {
  std::printf("proofloop acceptance (%u threads)\n", jobs());

  // Fresh sets, shared by the oracle-ceiling, label and stratification checks.
  std::map<SubsetKind, Dataset> sets;
  for (auto kind : kKinds) sets[kind] = make(kind, 10000, 20261016);

  criterion("oracle ceiling", [&](std::string& detail) {
    bool ok = true;
    for (auto kind : kKinds) {
      const auto& d = sets[kind];
      const auto ps = problems_of(d);
      const auto ids = ids_of(d);
      auto traces = run_batch(
          ps, ids, [](std::size_t) { return std::make_unique<OracleProposer>(); }, {}, jobs());
      std::vector<OutcomeRecord> records;
      std::map<int, std::vector<AuditVerdict>> verdicts;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        records.push_back({ids[i], *ps[i].depth, *ps[i].label, traces[i].predicted_label});
        verdicts[*ps[i].depth].push_back(audit_trace(ps[i], traces[i]));
      }
      const auto acc = accuracy_by_depth(records);
      std::ostringstream line;
      line << to_string(kind) << " acc";
      for (int depth = 0; depth <= 6; ++depth) {
        auto it = acc.by_depth.find(depth);
        if (it == acc.by_depth.end()) {
          ok = false;
          line << " d" << depth << "=missing";
          continue;
        }
        const auto table = aggregate(verdicts[depth]);
        const std::string a = format_table_number(it->second.accuracy(), 100, 2);
        const std::string c =
            format_table_number({table.traces - table.inconsistent, table.traces}, 100, 3);
        ok = ok && a == "100." && c == "100.";
        line << " d" << depth << "=" << a << "/" << c;
      }
      detail += (detail.empty() ? "" : "; ") + line.str();
    }
    return ok;
  });

  criterion("label soundness", [&](std::string& detail) {
    int64_t agree = 0;
    int64_t total = 0;
    for (auto kind : kKinds) {
      for (const auto& e : sets[kind].entries) {
        ++total;
        if (oracle::naive_label(e.problem) == *e.problem.label) ++agree;
      }
    }
    detail = std::to_string(agree) + "/" + std::to_string(total) + " agree";
    return agree == total;
  });

  criterion("depth soundness", [&](std::string& detail) {
    Rng rng(4242);
    int agree = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const Problem p = oracle::random_problem(rng);
      const auto got = label_and_depth(p, 64);
      const auto want = oracle::tree_label_and_depth(p, 64);
      if (got.label == want.first && got.depth == want.second) ++agree;
    }
    detail = std::to_string(agree) + "/" + std::to_string(n) +
             " small instances (<= 12 literals, <= 10 rules)";
    return agree == n;
  });

  criterion("balance", [&](std::string& detail) {
    const auto rp = problems_of(make(SubsetKind::rp, 50000, 7));
    const auto rpb = problems_of(make(SubsetKind::rp_balanced, 50000, 7));
    const double r_rp = correlation_rules_label(rp);
    const double r_rpb = correlation_rules_label(rpb);
    std::map<int, std::pair<int64_t, int64_t>> buckets;  // rules -> (true, all)
    for (const auto& p : rpb) {
      auto& b = buckets[static_cast<int>(p.rules.size())];
      b.first += *p.label;
      ++b.second;
    }
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& [rules, b] : buckets) {
      const double ratio = static_cast<double>(b.first) / static_cast<double>(b.second);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "r(RP)=%.4f r(RP_b)=%.4f, RP_b bucket ratios in [%.4f, %.4f] over %zu buckets",
                  r_rp, r_rpb, lo, hi, buckets.size());
    detail = buf;
    return r_rp > 0.10 && std::abs(r_rpb) <= 0.02 && lo >= 0.48 && hi <= 0.52;
  });

  criterion("depth stratification", [&](std::string& detail) {
    bool ok = true;
    for (auto kind : kKinds) {
      std::map<int, int> counts;
      for (const auto& e : sets[kind].entries) ++counts[*e.problem.depth];
      const double uniform = sets[kind].entries.size() / 7.0;
      double worst = 0;
      for (int d = 0; d <= 6; ++d) {
        worst = std::max(worst, std::abs(counts[d] - uniform) / uniform);
      }
      ok = ok && counts.size() == 7 && worst <= 0.10;
      char buf[80];
      std::snprintf(buf, sizeof buf, "%s max deviation %.2f%%", std::string(to_string(kind)).c_str(),
                    100 * worst);
      detail += (detail.empty() ? "" : "; ") + std::string(buf);
    }
    return ok;
  });

  criterion("taxonomy detection", [&](std::string& detail) {
    const auto pool = make(SubsetKind::rp, 7000, 99);
    bool ok = true;
    for (auto kind : {CorruptorKind::synonym_swap, CorruptorKind::premise_drop,
                      CorruptorKind::fact_mirage, CorruptorKind::premature_false,
                      CorruptorKind::premature_true}) {
      int materialized = 0;
      int detected = 0;
      std::vector<std::string> misses;
      for (std::size_t i = 0; i < pool.entries.size() && materialized < 1000; ++i) {
        const auto& e = pool.entries[i];
        CorruptorSpec spec;
        spec.kind = kind;
        spec.rate = 0.5;
        spec.seed = 1000 + i;
        CorruptingProposer proposer(std::make_unique<OracleProposer>(), spec);
        const auto trace = run_proof(e.problem, proposer, {}, e.id);
        const auto verdict = audit_trace(e.problem, trace);
        for (const auto& inj : proposer.injections()) {
          if (!inj.applied || materialized >= 1000) continue;
          ++materialized;
          const bool hit = std::any_of(verdict.sites.begin(), verdict.sites.end(),
                                       [&](const ErrorSite& s) {
                                         return s.iteration == inj.iteration &&
                                                s.type == *inj.expected;
                                       });
          if (hit) {
            ++detected;
          } else {
            misses.push_back(e.id + "@" + std::to_string(inj.iteration) + " '" +
                             inj.emitted_text + "'");
          }
        }
      }
      const bool kind_ok = materialized == 1000 && detected * 100 >= materialized * 99;
      ok = ok && kind_ok;
      detail += (detail.empty() ? "" : "; ") + std::string(to_string(kind)) + " " +
                std::to_string(detected) + "/" + std::to_string(materialized);
      for (const auto& m : misses) std::printf("  misdetected %s: %s\n",
                                               std::string(to_string(kind)).c_str(), m.c_str());
    }
    return ok;
  });

  criterion("table reproduction", [&](std::string& detail) {
    // Consistency row: 28000 proofs, 10 NonExR, 2 SpMatch, 1 UnexhS.
    std::vector<AuditVerdict> verdicts(28000);
    for (auto& v : verdicts) v.consistent = true;
    int at = 0;
    auto mark = [&](ErrorType t, int n) {
      for (int i = 0; i < n; ++i, ++at) {
        verdicts[at].consistent = false;
        verdicts[at].errors = {t};
      }
    };
    mark(ErrorType::non_existing_rule, 10);
    mark(ErrorType::spurious_match, 2);
    mark(ErrorType::unexhausted_search, 1);
    ReportTables consistency;
    consistency.consistency.push_back({"LP", "LP", aggregate(verdicts)});
    const std::string csv = render_report(consistency, "csv");
    const std::string row4 = "LP,LP,0.036,0.,0.007,0.004,0.046,99.954";
    const bool ok4 = csv.find(row4) != std::string::npos;

    // Rates row: 4000 proofs at depth 0.
    std::vector<OutcomeRecord> records;
    auto add = [&](int n, bool truth, bool predicted) {
      for (int i = 0; i < n; ++i) records.push_back({"r", 0, truth, predicted});
    };
    add(3181, true, true);
    add(2, false, true);
    add(817, false, false);
    const auto c = confusion_and_prf1(records).by_depth.at(0);
    std::string got;
    for (Fraction f : {c.tpr(), c.fpr(), c.tnr(), c.fnr(), c.precision(), c.recall(), c.f1()}) {
      got += (got.empty() ? "" : " ") + format_table_number(f, 1, 3);
    }
    const std::string want = "0.795 0.000 0.204 0. 0.999 1. 0.999";
    detail = "consistency row " + std::string(ok4 ? "matches" : "differs") + "; rates row '" +
             got + "'";
    return ok4 && got == want;
  });

  criterion("cap semantics", [&](std::string& detail) {
    const auto d = make(SubsetKind::lp, 700, 5);
    Confusion confusion;
    int64_t truths = 0;
    bool ok = true;
    for (const auto& e : d.entries) {
      NeverEnding proposer;
      const auto t = run_proof(e.problem, proposer, {}, e.id);
      ok = ok && t.terminal == Verdict::unresolved && t.iterations_used == 100 &&
           proposer.calls == 100 && t.predicted_label == !*e.problem.label;
      confusion.add(*e.problem.label, t.predicted_label);
      truths += *e.problem.label;
    }
    ok = ok && confusion.tp == 0 && confusion.tn == 0 && confusion.fn == truths &&
         confusion.fp == static_cast<int64_t>(d.entries.size()) - truths;
    detail = "700 runs Unresolved at 100 iterations; FN=" + std::to_string(confusion.fn) +
             " FP=" + std::to_string(confusion.fp);
    return ok;
  });

  criterion("round trip", [&](std::string& detail) {
    Rng rng(31337);
    int64_t ok_count = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Problem p = oracle::random_wordy_problem(rng);
      const std::string canon = serialize_problem(p);
      const OrderPolicy shuffled = OrderPolicy::shuffle(rng());
      const std::string shuf = serialize_problem(p, shuffled);
      if (serialize_problem(parse_problem(canon)) == canon &&
          serialize_problem(parse_problem(shuf), shuffled) == shuf &&
          equal_as_sets(parse_problem(shuf), p)) {
        ++ok_count;
      }
    }
    detail = std::to_string(ok_count) + "/" + std::to_string(n) +
             " byte-identical, canonical and shuffled";
    return ok_count == n;
  });

  criterion("step expansion", [&](std::string& detail) {
    const auto d = make(SubsetKind::rp, 1000, 11);
    int64_t instances = 0;
    int64_t expected = 0;
    for (const auto& e : d.entries) {
      instances += static_cast<int64_t>(expand_steps(e).size());
      OracleProposer o;
      expected += static_cast<int64_t>(run_proof(e.problem, o, {}).accepted_steps.size()) + 1;
    }
    const double mean = static_cast<double>(instances) / static_cast<double>(d.entries.size());
    char buf[120];
    std::snprintf(buf, sizeof buf, "%lld instances (expected %lld), mean %.3f per problem",
                  static_cast<long long>(instances), static_cast<long long>(expected), mean);
    detail = buf;
    return instances == expected && mean >= 3.0 && mean <= 7.0;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
