#include "proofloop/records.hpp"

#include "json.hpp"

namespace proofloop {
namespace {

using Json = nlohmann::ordered_json;

Json parse_line(std::string_view line, const char* what) {
  try {
    Json j = Json::parse(line);
    if (!j.is_object()) throw BadRecord(std::string(what) + " record is not an object");
    return j;
  } catch (const Json::parse_error& e) {
    throw BadRecord(std::string(what) + " record is not valid JSON: " + e.what());
  }
}

template <typename T>
T field(const Json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw BadRecord(std::string(what) + " record lacks '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw BadRecord(std::string(what) + " record has a bad '" + key + "'");
  }
}

}  // namespace

std::string dataset_record(const DatasetEntry& entry, SubsetKind kind,
                           std::optional<ProofOrder> proof) {
  const Problem& p = entry.problem;
  Json j;
  j["id"] = entry.id;
  j["subset"] = std::string(to_string(kind));
  j["text"] = serialize_problem(p);
  j["label"] = p.label.value_or(false);
  j["depth"] = p.depth.value_or(0);
  j["num_rules"] = p.rules.size();
  j["num_facts"] = p.facts.size();
  if (proof) j["proof"] = render_whole_proof(p, *proof);
  return j.dump();
}

DatasetRecord parse_dataset_record(std::string_view line) {
  const Json j = parse_line(line, "dataset");
  DatasetRecord rec;
  rec.entry.id = field<std::string>(j, "id", "dataset");
  try {
    rec.entry.problem = parse_problem(field<std::string>(j, "text", "dataset"));
  } catch (const ParseError& e) {
    throw BadRecord("dataset record '" + rec.entry.id + "': " + e.what());
  }
  if (j.contains("label")) rec.entry.problem.label = field<bool>(j, "label", "dataset");
  if (j.contains("depth")) rec.entry.problem.depth = field<int>(j, "depth", "dataset");
  if (j.contains("subset")) {
    rec.kind = parse_subset_kind(field<std::string>(j, "subset", "dataset"));
  }
  return rec;
}

std::string step_record(const StepRecord& step) {
  Json j;
  j["problem_id"] = step.problem_id;
  j["step_index"] = step.step_index;
  j["input"] = step.instance.input;
  j["target"] = step.instance.target;
  return j.dump();
}

StepRecord parse_step_record(std::string_view line) {
  const Json j = parse_line(line, "step");
  StepRecord s;
  s.problem_id = field<std::string>(j, "problem_id", "step");
  s.step_index = field<int>(j, "step_index", "step");
  s.instance.input = field<std::string>(j, "input", "step");
  s.instance.target = field<std::string>(j, "target", "step");
  return s;
}

std::string trace_record(const ProofTrace& trace) {
  Json j;
  j["problem_id"] = trace.problem_id;
  Json steps = Json::array();
  for (const auto& r : trace.accepted_steps) steps.push_back(serialize_rule(r));
  j["steps"] = std::move(steps);
  Json faulty = Json::array();
  for (const auto& f : trace.faulty_proposals) {
    faulty.push_back({{"iter", f.iteration},
                      {"text", f.text},
                      {"reason", std::string(to_string(f.reason))}});
  }
  j["faulty"] = std::move(faulty);
  j["terminal"] = std::string(to_string(trace.terminal));
  j["iterations"] = trace.iterations_used;
  j["predicted"] = trace.predicted_label;
  return j.dump();
}

ProofTrace parse_trace_record(std::string_view line) {
  const Json j = parse_line(line, "trace");
  ProofTrace t;
  t.problem_id = field<std::string>(j, "problem_id", "trace");
  for (const auto& text : field<std::vector<std::string>>(j, "steps", "trace")) {
    Proposal p = parse_proposal(text);
    if (!p.is_rule()) throw BadRecord("trace step '" + text + "' is not a rule");
    t.accepted_steps.push_back(p.rule());
  }
  for (const auto& f : field<Json>(j, "faulty", "trace")) {
    FaultyProposal fp;
    fp.iteration = field<int>(f, "iter", "faulty");
    fp.text = field<std::string>(f, "text", "faulty");
    auto reason = parse_rejection(field<std::string>(f, "reason", "faulty"));
    if (!reason) throw BadRecord("unknown rejection reason");
    fp.reason = *reason;
    t.faulty_proposals.push_back(std::move(fp));
  }
  auto terminal = parse_verdict(field<std::string>(j, "terminal", "trace"));
  if (!terminal) throw BadRecord("unknown trace terminal");
  t.terminal = *terminal;
  t.iterations_used = field<int>(j, "iterations", "trace");
  if (j.contains("predicted")) {
    t.predicted_label = field<bool>(j, "predicted", "trace");
  } else {
    t.predicted_label = t.terminal == Verdict::proved_true;
  }
  return t;
}

std::string verdict_record(const AuditVerdict& v) {
  Json j;
  j["problem_id"] = v.problem_id;
  j["consistent"] = v.consistent;
  Json errors = Json::array();
  for (ErrorType e : v.errors) errors.push_back(std::string(to_string(e)));
  j["errors"] = std::move(errors);
  Json sites = Json::array();
  for (const auto& s : v.sites) {
    sites.push_back({{"iter", s.iteration},
                     {"type", std::string(to_string(s.type))},
                     {"detail", s.detail}});
  }
  j["sites"] = std::move(sites);
  return j.dump();
}

AuditVerdict parse_verdict_record(std::string_view line) {
  const Json j = parse_line(line, "verdict");
  AuditVerdict v;
  v.problem_id = field<std::string>(j, "problem_id", "verdict");
  v.consistent = field<bool>(j, "consistent", "verdict");
  for (const auto& name : field<std::vector<std::string>>(j, "errors", "verdict")) {
    auto type = parse_error_type(name);
    if (!type) throw BadRecord("unknown error type '" + name + "'");
    v.errors.insert(*type);
  }
  for (const auto& s : field<Json>(j, "sites", "verdict")) {
    auto type = parse_error_type(field<std::string>(s, "type", "site"));
    if (!type) throw BadRecord("unknown error type in site");
    v.sites.push_back({field<int>(s, "iter", "site"), *type,
                       field<std::string>(s, "detail", "site")});
  }
  return v;
}

std::string injection_record(const std::string& problem_id,
                             const Injection& injection) {
  Json j;
  j["problem_id"] = problem_id;
  j["iter"] = injection.iteration;
  j["call"] = injection.call_index;
  j["kind"] = std::string(to_string(injection.kind));
  j["applied"] = injection.applied;
  j["expected"] = injection.expected ? Json(std::string(to_string(*injection.expected)))
                                     : Json(nullptr);
  j["base"] = injection.base_text;
  j["emitted"] = injection.emitted_text;
  return j.dump();
}

}  // namespace proofloop
