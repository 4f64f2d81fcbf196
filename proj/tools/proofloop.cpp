// proofloop: generate problem sets, expand step instances, run and audit
// proofs, and render result tables. Every subcommand reads and writes one
// JSON record per line.

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "proofloop/auditor.hpp"
#include "proofloop/builtin_data.hpp"
#include "proofloop/engine.hpp"
#include "proofloop/external.hpp"
#include "proofloop/genset.hpp"
#include "proofloop/metrics.hpp"
#include "proofloop/parallel.hpp"
#include "proofloop/records.hpp"
#include "proofloop/rng.hpp"

#ifndef PROOFLOOP_VERSION
#define PROOFLOOP_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace proofloop;

namespace {

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("UsageError", what) {}
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Written to a temporary next to the target and renamed into place by
// commit(); anything not committed is deleted.
class OutputFile {
 public:
  explicit OutputFile(std::string path)
      : path_(std::move(path)),
        tmp_(path_ + ".tmp." + std::to_string(::getpid())) {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw UsageError("cannot write '" + path_ + "'");
  }
  ~OutputFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void line(const std::string& text) { out_ << text << '\n'; }
  const std::string& path() const { return path_; }
  void commit() {
    out_.close();
    if (!out_) throw Error("IOError", "failed writing '" + path_ + "'");
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw UsageError("cannot read '" + path + "'");
  }
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::string where() const { return path_ + ":" + std::to_string(line_no_); }

 private:
  std::string path_;
  std::ifstream in_;
  int line_no_ = 0;
};

template <typename Fn>
auto at_line(const LineReader& reader, Fn&& fn) {
  try {
    return fn();
  } catch (const BadRecord& e) {
    throw BadRecord(reader.where() + ": " + e.what());
  }
}

struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::string config_path;
  std::string config_text;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<uint64_t> seed;
  std::string started = utc_now();
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  void write_for(const std::string& output) const {
    nlohmann::ordered_json j;
    j["tool"] = "proofloop";
    j["version"] = PROOFLOOP_VERSION;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["config_path"] = config_path;
    j["config"] = config_text;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["started"] = started;
    j["finished"] = utc_now();
    for (auto& [k, v] : extra.items()) j[k] = v;
    OutputFile out(output + ".manifest.json");
    out.stream() << j.dump(2) << '\n';
    out.commit();
  }
};

std::optional<std::string> data_file(const char* name) {
  const char* dir = std::getenv("PROOFLOOP_DATA_DIR");
  if (!dir || !*dir) return std::nullopt;
  const fs::path path = fs::path(dir) / name;
  if (!fs::exists(path)) {
    throw ConfigError("PROOFLOOP_DATA_DIR has no " + std::string(name));
  }
  return path.string();
}

SynonymTable load_synonyms() {
  if (auto path = data_file("synonyms.txt")) return SynonymTable::parse(read_file(*path));
  return SynonymTable::builtin();
}

std::string with_suffix(const std::string& path, const std::string& tag) {
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "." + tag + p.extension().string()))
      .string();
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::optional<int> n;
  std::optional<uint64_t> seed;
  std::string config;
  std::string split;
  std::string vocabulary;
  std::string whole_proof;
  std::string out;
  unsigned jobs = 1;
};

std::array<int, 3> parse_split(const std::string& text) {
  return parse_gen_config("split = " + text).split;
}

void cmd_gen(const GenArgs& a, Manifest m) {
  auto kind = parse_subset_kind(a.kind);
  if (!kind) throw UsageError("unknown kind '" + a.kind + "' (rp, lp, rp_b)");
  GenConfig config;
  if (!a.config.empty()) {
    m.config_path = a.config;
    config = parse_gen_config(read_file(a.config));
  }
  if (a.n) config.num_problems = *a.n;
  if (a.seed) config.seed = *a.seed;
  config.jobs = a.jobs;
  std::string vocab_path = a.vocabulary;
  if (vocab_path.empty()) vocab_path = data_file("vocabulary.txt").value_or("");
  if (!vocab_path.empty()) {
    config.vocabulary = parse_word_list(read_file(vocab_path));
    m.inputs.push_back(vocab_path);
  }
  if (!a.split.empty()) config.split = parse_split(a.split);
  validate_config(config);
  std::optional<ProofOrder> proof;
  if (a.whole_proof == "forward") proof = ProofOrder::forward;
  else if (a.whole_proof == "backward") proof = ProofOrder::backward;
  else if (!a.whole_proof.empty()) throw UsageError("--whole-proof is forward or backward");

  m.seed = config.seed;
  m.config_text = format_gen_config(config);
  m.extra["kind"] = std::string(to_string(*kind));
  const Dataset data = generate(*kind, config);

  std::vector<const Dataset*> sets{&data};
  std::optional<SplitDatasets> parts;
  if (a.split.empty()) {
    m.outputs = {a.out};
  } else {
    parts = split(data, config.split, config.seed);
    sets = {&parts->train, &parts->val, &parts->test};
    for (const char* tag : {"train", "val", "test"}) {
      m.outputs.push_back(with_suffix(a.out, tag));
    }
  }
  // All files are complete before any is renamed into place.
  std::vector<std::unique_ptr<OutputFile>> files;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    files.push_back(std::make_unique<OutputFile>(m.outputs[i]));
    for (const auto& e : sets[i]->entries) {
      files.back()->line(dataset_record(e, sets[i]->kind, proof));
    }
  }
  for (auto& f : files) f->commit();
  for (const auto& o : m.outputs) m.write_for(o);
}

// ---------------------------------------------------------------------------

void cmd_steps(const std::string& in, const std::string& out_path,
               std::optional<uint64_t> shuffle, Manifest m) {
  m.inputs = {in};
  m.outputs = {out_path};
  m.seed = shuffle;
  const OrderPolicy order =
      shuffle ? OrderPolicy::shuffle(*shuffle) : OrderPolicy::canonical();
  LineReader reader(in);
  OutputFile out(out_path);
  std::string line;
  while (reader.next(line)) {
    const auto rec = at_line(reader, [&] { return parse_dataset_record(line); });
    for (const auto& s : expand_steps(rec.entry, order)) out.line(step_record(s));
  }
  out.commit();
  m.write_for(out_path);
}

void cmd_prove(const std::string& in, const std::string& out_path, Manifest m) {
  m.inputs = {in};
  m.outputs = {out_path};
  LineReader reader(in);
  OutputFile out(out_path);
  std::string line;
  int n = 0;
  while (reader.next(line)) {
    ++n;
    DatasetEntry entry;
    if (line.front() == '{') {
      entry = at_line(reader, [&] { return parse_dataset_record(line).entry; });
    } else {
      try {
        entry.problem = parse_problem(line);
      } catch (const ParseError& e) {
        throw BadRecord(reader.where() + ": " + e.what());
      }
      entry.id = "line-" + std::to_string(n);
    }
    const auto truth = label_and_depth(entry.problem);
    nlohmann::ordered_json j;
    j["id"] = entry.id;
    j["text"] = serialize_problem(entry.problem);
    j["label"] = truth.label;
    j["depth"] = truth.depth;
    out.line(j.dump());
  }
  out.commit();
  m.write_for(out_path);
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string in;
  std::string out;
  std::string proposer = "oracle";
  int cap = 100;
  int k = 1;
  bool no_retry = false;
  std::optional<uint64_t> shuffle;
  uint64_t seed = 0;
  unsigned jobs = 1;
  std::string injections;
  int timeout_ms = 30000;
};

void cmd_run(const RunArgs& a, Manifest m) {
  if (a.cap < 1) throw UsageError("--cap must be at least 1");
  if (a.k < 1) throw UsageError("--k must be at least 1");
  EngineConfig config;
  config.max_iterations = a.cap;
  config.candidates_per_step = a.k;
  config.retry_on_invalid = !a.no_retry;
  config.shuffle_seed = a.shuffle;

  std::optional<CorruptorSpec> corrupt;
  std::unique_ptr<ExternalProposer> external;
  if (a.proposer.starts_with("corrupt:")) {
    corrupt = parse_corruptor_spec(a.proposer.substr(8), a.seed);
    corrupt->synonyms = load_synonyms();
  } else if (a.proposer.starts_with("external:")) {
    external = std::make_unique<ExternalProposer>(
        parse_endpoint(a.proposer.substr(9)), std::chrono::milliseconds(a.timeout_ms));
  } else if (a.proposer != "oracle") {
    throw UsageError("unknown proposer '" + a.proposer + "'");
  }
  m.inputs = {a.in};
  m.outputs = {a.out};
  if (!a.injections.empty()) m.outputs.push_back(a.injections);
  m.seed = a.seed;
  m.extra["proposer"] = a.proposer;

  LineReader reader(a.in);
  OutputFile out(a.out);
  std::optional<OutputFile> inj;
  if (!a.injections.empty()) inj.emplace(a.injections);

  // One external connection serves every proof in turn.
  const unsigned jobs = external ? 1 : a.jobs;
  const std::size_t chunk = 256 * std::max(1u, jobs);
  std::vector<DatasetEntry> entries;
  std::vector<ProofTrace> traces;
  std::vector<std::vector<Injection>> injected;
  std::string line;
  bool more = true;
  while (more) {
    entries.clear();
    while (entries.size() < chunk && (more = reader.next(line))) {
      entries.push_back(at_line(reader, [&] { return parse_dataset_record(line).entry; }));
    }
    traces.assign(entries.size(), {});
    injected.assign(entries.size(), {});
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
      const auto& e = entries[i];
      if (external) {
        traces[i] = run_proof(e.problem, *external, config, e.id);
      } else if (corrupt) {
        CorruptorSpec spec = *corrupt;
        spec.seed = derive_seed(a.seed, fnv1a(e.id));
        CorruptingProposer p(std::make_unique<OracleProposer>(), std::move(spec));
        traces[i] = run_proof(e.problem, p, config, e.id);
        injected[i] = p.injections();
      } else {
        OracleProposer p;
        traces[i] = run_proof(e.problem, p, config, e.id);
      }
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out.line(trace_record(traces[i]));
      if (inj) {
        for (const auto& x : injected[i]) inj->line(injection_record(entries[i].id, x));
      }
    }
  }
  out.commit();
  if (inj) inj->commit();
  for (const auto& o : m.outputs) m.write_for(o);
}

// ---------------------------------------------------------------------------

// Walks a dataset file alongside a record file written in the same order
// (possibly a subsequence of it).
class DatasetCursor {
 public:
  explicit DatasetCursor(const std::string& path) : reader_(path) {}

  const DatasetEntry& seek(const std::string& id) {
    std::string line;
    while (!current_ || current_->id != id) {
      if (!reader_.next(line)) {
        throw UsageError("no dataset entry '" + id +
                         "' (records must follow dataset order)");
      }
      current_ = at_line(reader_, [&] { return parse_dataset_record(line).entry; });
    }
    return *current_;
  }

 private:
  LineReader reader_;
  std::optional<DatasetEntry> current_;
};

void cmd_audit(const std::string& dataset, const std::string& traces_path,
               const std::string& out_path, Manifest m) {
  m.inputs = {dataset, traces_path};
  m.outputs = {out_path};
  DatasetCursor cursor(dataset);
  LineReader reader(traces_path);
  OutputFile out(out_path);
  std::string line;
  while (reader.next(line)) {
    const auto trace = at_line(reader, [&] { return parse_trace_record(line); });
    const auto& entry = cursor.seek(trace.problem_id);
    out.line(verdict_record(audit_trace(entry.problem, trace)));
  }
  out.commit();
  m.write_for(out_path);
}

struct ReportArgs {
  std::string dataset;
  std::string traces;
  std::string verdicts;
  std::string train = "-";
  std::string test = "-";
  std::string format = "markdown";
  int accuracy_decimals = 1;
  bool stats = false;
  std::string out;
};

void cmd_report(const ReportArgs& a, Manifest m) {
  if (a.format != "markdown" && a.format != "csv" && a.format != "json") {
    throw UnsupportedFormat(a.format);
  }
  m.inputs = {a.dataset, a.traces};
  if (!a.verdicts.empty()) m.inputs.push_back(a.verdicts);
  m.outputs = {a.out};

  std::vector<OutcomeRecord> outcomes;
  std::vector<AuditVerdict> verdicts;
  std::vector<Problem> problems;
  {
    DatasetCursor cursor(a.dataset);
    LineReader reader(a.traces);
    std::string line;
    while (reader.next(line)) {
      const auto trace = at_line(reader, [&] { return parse_trace_record(line); });
      const auto& entry = cursor.seek(trace.problem_id);
      const auto truth = entry.problem.label && entry.problem.depth
                             ? horn::LabelDepth{*entry.problem.label, *entry.problem.depth}
                             : label_and_depth(entry.problem);
      outcomes.push_back({trace.problem_id, truth.depth, truth.label, trace.predicted_label});
      if (a.verdicts.empty()) verdicts.push_back(audit_trace(entry.problem, trace));
      if (a.stats) problems.push_back(entry.problem);
    }
  }
  if (outcomes.empty()) throw EmptyInput("trace file '" + a.traces + "' is empty");
  if (!a.verdicts.empty()) {
    LineReader reader(a.verdicts);
    std::string line;
    while (reader.next(line)) {
      verdicts.push_back(at_line(reader, [&] { return parse_verdict_record(line); }));
    }
  }

  ReportTables tables;
  tables.accuracy_decimals = a.accuracy_decimals;
  tables.accuracy.push_back({a.train, a.test, accuracy_by_depth(outcomes)});
  tables.rates.push_back({"Rates by depth (" + a.train + " / " + a.test + ")",
                          confusion_and_prf1(outcomes)});
  tables.consistency.push_back({a.train, a.test, aggregate(verdicts)});
  for (const auto& o : outcomes) tables.max_depth = std::max(tables.max_depth, o.depth);
  if (a.stats) tables.dataset = dataset_stats(problems);

  OutputFile out(a.out);
  out.stream() << render_report(tables, a.format);
  out.commit();
  m.write_for(a.out);
}

bool is_user_error(const Error& e) {
  return e.kind() != "IOError";
}

void fail_line(const std::string& kind, const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << "proofloop: " << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proofloop: propositional proof-loop workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PROOFLOOP_VERSION);
  Manifest manifest;
  manifest.argv.assign(argv, argv + argc);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a problem set");
  g->add_option("--kind", gen.kind, "rp, lp or rp_b")->required();
  g->add_option("--n", gen.n, "Number of problems");
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--config", gen.config, "key = value config file");
  g->add_option("--split", gen.split, "train,val,test percentages, e.g. 80,10,10");
  g->add_option("--vocabulary", gen.vocabulary, "Word list, one per line");
  g->add_option("--whole-proof", gen.whole_proof, "Add proof targets: forward|backward");
  g->add_option("--jobs", gen.jobs, "Worker threads");
  g->add_option("--out", gen.out, "Output file")->required();

  std::string steps_in, steps_out;
  std::optional<uint64_t> steps_shuffle;
  auto* s = app.add_subcommand("steps", "Expand a problem set into step instances");
  s->add_option("--in", steps_in)->required();
  s->add_option("--out", steps_out)->required();
  s->add_option("--shuffle", steps_shuffle, "Shuffle item order with this seed");

  std::string prove_in, prove_out;
  auto* p = app.add_subcommand("prove", "Compute labels and depths");
  p->add_option("--in", prove_in, "Problem texts or dataset records")->required();
  p->add_option("--out", prove_out)->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run the proof loop over a problem set");
  r->add_option("--in", run.in)->required();
  r->add_option("--out", run.out)->required();
  r->add_option("--proposer", run.proposer,
                "oracle | corrupt:<kind>@<rate> | external:<endpoint>");
  r->add_option("--cap", run.cap, "Iteration cap");
  r->add_option("--k", run.k, "Candidates per step");
  r->add_flag("--no-retry", run.no_retry, "Stop at the first invalid proposal");
  r->add_option("--shuffle", run.shuffle, "Shuffle proposer inputs with this seed");
  r->add_option("--seed", run.seed, "Corruptor seed");
  r->add_option("--jobs", run.jobs, "Worker threads");
  r->add_option("--injections", run.injections, "Write the corruptor log here");
  r->add_option("--timeout-ms", run.timeout_ms, "External proposer timeout");

  std::string audit_dataset, audit_traces, audit_out;
  auto* au = app.add_subcommand("audit", "Classify proof traces");
  au->add_option("--dataset", audit_dataset)->required();
  au->add_option("--traces", audit_traces)->required();
  au->add_option("--out", audit_out)->required();

  ReportArgs rep;
  auto* rp = app.add_subcommand("report", "Render result tables");
  rp->add_option("--dataset", rep.dataset)->required();
  rp->add_option("--traces", rep.traces)->required();
  rp->add_option("--verdicts", rep.verdicts, "Verdicts from audit (else audited here)");
  rp->add_option("--train", rep.train, "Row label: training distribution");
  rp->add_option("--test", rep.test, "Row label: test distribution");
  rp->add_option("--format", rep.format, "markdown, csv or json");
  rp->add_option("--accuracy-decimals", rep.accuracy_decimals);
  rp->add_flag("--stats", rep.stats, "Include dataset statistics");
  rp->add_option("--out", rep.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_line("UsageError", e.what());
    return 1;
  }

  try {
    manifest.subcommand = app.get_subcommands().front()->get_name();
    if (g->parsed()) cmd_gen(gen, manifest);
    else if (s->parsed()) cmd_steps(steps_in, steps_out, steps_shuffle, manifest);
    else if (p->parsed()) cmd_prove(prove_in, prove_out, manifest);
    else if (r->parsed()) cmd_run(run, manifest);
    else if (au->parsed()) cmd_audit(audit_dataset, audit_traces, audit_out, manifest);
    else if (rp->parsed()) cmd_report(rep, manifest);
  } catch (const Error& e) {
    fail_line(e.kind(), e.what());
    return is_user_error(e) ? 1 : 2;
  } catch (const std::exception& e) {
    fail_line("InternalError", e.what());
    return 2;
  }
  return 0;
}
