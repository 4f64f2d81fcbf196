// Python module `proofloop._core`. Structured results cross the boundary as
// the same one-line JSON records the CLI writes; the package decodes them.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "proofloop/auditor.hpp"
#include "proofloop/engine.hpp"
#include "proofloop/external.hpp"
#include "proofloop/genset.hpp"
#include "proofloop/metrics.hpp"
#include "proofloop/records.hpp"

namespace py = pybind11;
using namespace proofloop;

namespace {

OrderPolicy order_of(std::optional<uint64_t> shuffle_seed) {
  return shuffle_seed ? OrderPolicy::shuffle(*shuffle_seed) : OrderPolicy::canonical();
}

SubsetKind kind_of(const std::string& name) {
  auto kind = parse_subset_kind(name);
  if (!kind) throw ConfigError("unknown subset kind '" + name + "'");
  return *kind;
}

using RuleTuple = std::pair<std::vector<std::string>, std::string>;

std::vector<RuleTuple> rules_of(const Problem& p) {
  std::vector<RuleTuple> out;
  for (const auto& r : p.rules) {
    RuleTuple t;
    for (const auto& l : r.premises) t.first.push_back(l.str());
    t.second = r.conclusion.str();
    out.push_back(std::move(t));
  }
  return out;
}

// Runs a Python callable as the proposer. The GIL is held throughout.
std::string run_with(const Problem& problem, Proposer& proposer, int cap, int k, bool retry,
                     std::optional<uint64_t> shuffle_seed, const std::string& id) {
  EngineConfig cfg;
  cfg.max_iterations = cap;
  cfg.candidates_per_step = k;
  cfg.retry_on_invalid = retry;
  cfg.shuffle_seed = shuffle_seed;
  return trace_record(run_proof(problem, proposer, cfg, id));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "proofloop core bindings";

  static py::exception<Error> error(m, "ProofloopError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(error.ptr());
      py::object instance = type(py::str(e.what()));
      instance.attr("kind") = e.kind();
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  m.def(
      "parse_problem",
      [](const std::string& text) {
        const Problem p = parse_problem(text);
        std::vector<std::string> facts;
        for (const auto& f : p.facts) facts.push_back(f.str());
        return py::make_tuple(rules_of(p), facts, p.query.str());
      },
      py::arg("text"), "Parse problem text into (rules, facts, query).");

  m.def(
      "serialize_problem",
      [](const std::vector<RuleTuple>& rules, const std::vector<std::string>& facts,
         const std::string& query, std::optional<uint64_t> shuffle_seed) {
        Problem p;
        for (const auto& [premises, conclusion] : rules) {
          Rule r;
          for (const auto& l : premises) r.premises.emplace_back(l);
          r.conclusion = Literal(conclusion);
          p.rules.push_back(std::move(r));
        }
        for (const auto& f : facts) p.facts.emplace_back(f);
        p.query = Literal(query);
        return serialize_problem(p, order_of(shuffle_seed));
      },
      py::arg("rules"), py::arg("facts"), py::arg("query"), py::arg("shuffle_seed") = py::none());

  m.def(
      "canonical_text",
      [](const std::string& text, std::optional<uint64_t> shuffle_seed) {
        return serialize_problem(parse_problem(text), order_of(shuffle_seed));
      },
      py::arg("text"), py::arg("shuffle_seed") = py::none());

  m.def(
      "label_and_depth",
      [](const std::string& text, int cap) {
        const auto r = label_and_depth(parse_problem(text), cap);
        return py::make_tuple(r.label, r.depth);
      },
      py::arg("text"), py::arg("cap") = kDefaultDepthCap);

  m.def(
      "generate",
      [](const std::string& kind, int n, uint64_t seed, unsigned jobs) {
        GenConfig c;
        c.num_problems = n;
        c.seed = seed;
        c.jobs = jobs;
        const SubsetKind k = kind_of(kind);
        Dataset d;
        {
          py::gil_scoped_release release;
          d = generate(k, c);
        }
        std::vector<std::string> out;
        for (const auto& e : d.entries) out.push_back(dataset_record(e, k));
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("jobs") = 1,
      "Generate a problem set; one JSON record per problem.");

  m.def(
      "step_instances",
      [](const std::string& text, std::optional<uint64_t> shuffle_seed) {
        DatasetEntry e;
        e.problem = parse_problem(text);
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& s : expand_steps(e, order_of(shuffle_seed))) {
          out.emplace_back(s.instance.input, s.instance.target);
        }
        return out;
      },
      py::arg("text"), py::arg("shuffle_seed") = py::none());

  m.def(
      "whole_proof",
      [](const std::string& text, const std::string& order) {
        if (order != "forward" && order != "backward") {
          throw ConfigError("proof order must be forward or backward");
        }
        return render_whole_proof(parse_problem(text),
                                  order == "forward" ? ProofOrder::forward : ProofOrder::backward);
      },
      py::arg("text"), py::arg("order") = "forward");

  m.def(
      "run_oracle",
      [](const std::string& text, int cap, std::optional<uint64_t> shuffle_seed,
         const std::string& id) {
        OracleProposer oracle;
        return run_with(parse_problem(text), oracle, cap, 1, true, shuffle_seed, id);
      },
      py::arg("text"), py::arg("cap") = 100, py::arg("shuffle_seed") = py::none(),
      py::arg("problem_id") = "");

  m.def(
      "run_callback",
      [](const std::string& text, const CallbackProposer::Callback& callback, int cap, int k,
         bool retry, std::optional<uint64_t> shuffle_seed, const std::string& id) {
        CallbackProposer proposer(callback);
        return run_with(parse_problem(text), proposer, cap, k, retry, shuffle_seed, id);
      },
      py::arg("text"), py::arg("callback"), py::arg("cap") = 100, py::arg("k") = 1,
      py::arg("retry") = true, py::arg("shuffle_seed") = py::none(), py::arg("problem_id") = "",
      "Run the proof loop; callback(state_text, k) returns candidate texts.");

  m.def(
      "audit",
      [](const std::string& text, const std::string& trace_json) {
        return verdict_record(audit_trace(parse_problem(text), parse_trace_record(trace_json)));
      },
      py::arg("text"), py::arg("trace"));

  m.def(
      "format_table_number",
      [](int64_t num, int64_t den, int64_t scale, int decimals) {
        return format_table_number({num, den}, scale, decimals);
      },
      py::arg("num"), py::arg("den"), py::arg("scale") = 1, py::arg("decimals") = 3);

  m.def(
      "encode_request",
      [](const std::string& state, int k) { return encode_request({kWireVersion, state, k}); },
      py::arg("state"), py::arg("k") = 1);
  m.def("encode_response", &encode_response, py::arg("candidates"));
  m.def(
      "decode_request",
      [](const std::string& line) {
        const auto r = decode_request(line);
        return py::make_tuple(r.state, r.k);
      },
      py::arg("line"));
  m.def("decode_response", &decode_response, py::arg("line"));

  m.attr("WIRE_VERSION") = kWireVersion;
}
