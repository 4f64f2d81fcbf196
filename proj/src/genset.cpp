#include "proofloop/genset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "proofloop/builtin_data.hpp"
#include "proofloop/horn.hpp"
#include "proofloop/parallel.hpp"
#include "proofloop/rng.hpp"

namespace proofloop {

std::string_view to_string(SubsetKind kind) noexcept {
  switch (kind) {
    case SubsetKind::rp: return "RP";
    case SubsetKind::lp: return "LP";
    case SubsetKind::rp_balanced: return "RP_b";
  }
  return "?";
}

std::optional<SubsetKind> parse_subset_kind(std::string_view name) {
  if (name == "RP" || name == "rp") return SubsetKind::rp;
  if (name == "LP" || name == "lp") return SubsetKind::lp;
  if (name == "RP_b" || name == "rp_b") return SubsetKind::rp_balanced;
  return std::nullopt;
}

void validate_config(const GenConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  auto check_range = [&](const Range& r, const char* name, int min) {
    if (r.lo < min || r.hi < r.lo) {
      fail(std::string(name) + " must satisfy " + std::to_string(min) +
           " <= lo <= hi");
    }
  };
  check_range(c.depth_range, "depth range", 0);
  check_range(c.rules_range, "rules range", 1);
  check_range(c.facts_range, "facts range", 1);
  check_range(c.literals_range, "literals range", 4);
  if (c.num_problems < 0) fail("num_problems must be non-negative");
  if (c.budget_factor < 1) fail("budget_factor must be positive");
  if (c.split[0] < 0 || c.split[1] < 0 || c.split[2] < 0 ||
      c.split[0] + c.split[1] + c.split[2] != 100) {
    fail("split percentages must be non-negative and sum to 100");
  }
  if (c.literals_range.lo < c.depth_range.hi + c.facts_range.hi + 2) {
    fail("literals_min must be at least max_depth + facts_max + 2");
  }
  const std::size_t vocab =
      c.vocabulary.empty() ? default_vocabulary().size() : c.vocabulary.size();
  if (vocab < static_cast<std::size_t>(c.literals_range.hi)) {
    fail("vocabulary has " + std::to_string(vocab) + " words, literals_max is " +
         std::to_string(c.literals_range.hi));
  }
  for (const auto& w : c.vocabulary) {
    if (!is_valid_literal(w)) fail("illegal vocabulary word '" + w + "'");
  }
}

namespace {

int parse_int(const std::string& key, std::string_view value) {
  int out = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

GenConfig parse_gen_config(std::string_view text, GenConfig c) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "num_problems") c.num_problems = parse_int(key, value);
    else if (key == "seed") {
      uint64_t seed = 0;
      auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || end != value.data() + value.size()) {
        throw ConfigError("config key 'seed': expected an unsigned integer");
      }
      c.seed = seed;
    }
    else if (key == "min_depth") c.depth_range.lo = parse_int(key, value);
    else if (key == "max_depth") c.depth_range.hi = parse_int(key, value);
    else if (key == "rules_min") c.rules_range.lo = parse_int(key, value);
    else if (key == "rules_max") c.rules_range.hi = parse_int(key, value);
    else if (key == "facts_min") c.facts_range.lo = parse_int(key, value);
    else if (key == "facts_max") c.facts_range.hi = parse_int(key, value);
    else if (key == "literals_min") c.literals_range.lo = parse_int(key, value);
    else if (key == "literals_max") c.literals_range.hi = parse_int(key, value);
    else if (key == "budget_factor") c.budget_factor = parse_int(key, value);
    else if (key == "jobs") c.jobs = static_cast<unsigned>(std::max(1, parse_int(key, value)));
    else if (key == "split") {
      std::array<int, 3> parts{};
      std::istringstream fields(value);
      std::string part;
      int n = 0;
      while (std::getline(fields, part, ',')) {
        if (n == 3) throw ConfigError("split needs exactly three percentages");
        parts[n++] = parse_int(key, trim(part));
      }
      if (n != 3) throw ConfigError("split needs exactly three percentages");
      c.split = parts;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

std::string format_gen_config(const GenConfig& c) {
  std::ostringstream out;
  out << "num_problems = " << c.num_problems << "\n"
      << "seed = " << c.seed << "\n"
      << "min_depth = " << c.depth_range.lo << "\n"
      << "max_depth = " << c.depth_range.hi << "\n"
      << "rules_min = " << c.rules_range.lo << "\n"
      << "rules_max = " << c.rules_range.hi << "\n"
      << "facts_min = " << c.facts_range.lo << "\n"
      << "facts_max = " << c.facts_range.hi << "\n"
      << "literals_min = " << c.literals_range.lo << "\n"
      << "literals_max = " << c.literals_range.hi << "\n"
      << "split = " << c.split[0] << "," << c.split[1] << "," << c.split[2] << "\n"
      << "budget_factor = " << c.budget_factor << "\n";
  return out.str();
}

std::string canonical_key(const Problem& problem) {
  std::vector<std::string> rules;
  rules.reserve(problem.rules.size());
  for (const auto& r : problem.rules) {
    Rule sorted = r;
    std::sort(sorted.premises.begin(), sorted.premises.end());
    rules.push_back(serialize_rule(sorted));
  }
  std::sort(rules.begin(), rules.end());
  std::vector<std::string> facts;
  for (const auto& f : problem.facts) facts.push_back(f.str());
  std::sort(facts.begin(), facts.end());
  std::string key = problem.query.str() + "?";
  for (const auto& r : rules) key += " " + r;
  key += " |";
  for (const auto& f : facts) key += " " + f;
  return key;
}

namespace {

struct Candidate {
  std::vector<int> pool;  // local literal id -> vocabulary index
  horn::IndexedProblem problem;
  horn::LabelDepth truth;
  bool valid = false;
  std::string key;
};

struct RuleSet {
  std::unordered_set<uint64_t> keys;

  // Order-insensitive identity of (premises, conclusion); ids fit 16 bits.
  static uint64_t key(horn::IndexedRule rule) {
    std::sort(rule.premise_ids.begin(), rule.premise_ids.begin() + rule.arity);
    uint64_t k = static_cast<uint64_t>(rule.conclusion) + 1;
    for (int i = 0; i < rule.arity; ++i) {
      k = (k << 16) | static_cast<uint64_t>(rule.premise_ids[i] + 1);
    }
    return k;
  }
  bool insert(const horn::IndexedRule& rule) { return keys.insert(key(rule)).second; }
};

bool contains(const horn::IndexedRule& rule, int32_t id) {
  auto ps = rule.premises();
  return std::find(ps.begin(), ps.end(), id) != ps.end();
}

// Premise count 1-3, weighted towards conjunctions.
int sample_arity(Rng& rng) {
  const int u = static_cast<int>(rng.below(10));
  return u < 3 ? 1 : (u < 7 ? 2 : 3);
}

std::vector<int> sample_pool(Rng& rng, std::size_t vocab_size, int size) {
  std::vector<int> all(vocab_size);
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < size; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(vocab_size - i);
    std::swap(all[i], all[j]);
  }
  all.resize(size);
  return all;
}

// Draws `count` distinct elements of `from`, in random order.
std::vector<int32_t> draw(Rng& rng, std::vector<int32_t> from, std::size_t count) {
  count = std::min(count, from.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(from[i], from[i + rng.below(from.size() - i)]);
  }
  from.resize(count);
  return from;
}

// Random rule over literals [0, n) whose conclusion is drawn from
// `conclusions`; nullopt when it collides with an existing rule.
std::optional<horn::IndexedRule> random_rule(Rng& rng, int32_t n,
                                             const std::vector<int32_t>& conclusions,
                                             RuleSet& seen) {
  horn::IndexedRule rule;
  rule.conclusion = conclusions[rng.below(conclusions.size())];
  const int arity = sample_arity(rng);
  while (rule.arity < arity) {
    const auto p = static_cast<int32_t>(rng.below(static_cast<uint64_t>(n)));
    if (p == rule.conclusion || contains(rule, p)) continue;
    rule.premise_ids[rule.arity++] = p;
  }
  if (!seen.insert(rule)) return std::nullopt;
  return rule;
}

std::vector<int32_t> iota_ids(int32_t lo, int32_t hi) {
  std::vector<int32_t> v(static_cast<std::size_t>(std::max(0, hi - lo)));
  std::iota(v.begin(), v.end(), lo);
  return v;
}

horn::IndexedProblem sample_random(Rng& rng, const GenConfig& c) {
  horn::IndexedProblem p;
  const int n = rng.between(c.literals_range.lo, c.literals_range.hi);
  const int rules = rng.between(c.rules_range.lo, c.rules_range.hi);
  const int facts = std::min(rng.between(c.facts_range.lo, c.facts_range.hi), n - 1);
  p.num_literals = n;
  const auto all = iota_ids(0, n);
  p.facts = draw(rng, all, static_cast<std::size_t>(facts));
  RuleSet seen;
  for (int attempts = 0; static_cast<int>(p.rules.size()) < rules &&
                         attempts < 20 * rules;
       ++attempts) {
    if (auto r = random_rule(rng, n, all, seen)) p.rules.push_back(*r);
  }
  p.query = static_cast<int32_t>(rng.below(static_cast<uint64_t>(n)));
  return p;
}

// A chain c0 -> c1 -> ... -> c_depth ending in the query, plus distractor rules
// that never conclude a chain literal. For a True target c0 is a fact; for a
// False target c0 is neither a fact nor concluded by anything, and every
// other premise on the chain is a fact, so the failing branch has exactly
// `depth` levels.
horn::IndexedProblem sample_planted(Rng& rng, const GenConfig& c, bool label,
                                    int depth) {
  horn::IndexedProblem p;
  const int n = rng.between(c.literals_range.lo, c.literals_range.hi);
  const int rules = std::max(depth, rng.between(c.rules_range.lo, c.rules_range.hi));
  const int facts = rng.between(c.facts_range.lo, c.facts_range.hi);
  p.num_literals = n;
  const auto others = iota_ids(depth + 1, n);

  p.facts = draw(rng, others, static_cast<std::size_t>(label ? facts - 1 : facts));
  if (label) p.facts.push_back(0);

  RuleSet seen;
  for (int i = 1; i <= depth; ++i) {
    horn::IndexedRule rule;
    rule.conclusion = i;
    std::vector<int32_t> extras_from = p.facts;
    if (label) {
      for (int32_t j = 1; j + 1 < i; ++j) extras_from.push_back(j);
    }
    std::erase(extras_from, static_cast<int32_t>(i - 1));
    const auto extras = draw(rng, extras_from,
                             static_cast<std::size_t>(sample_arity(rng) - 1));
    rule.premise_ids[0] = i - 1;
    rule.arity = 1;
    for (int32_t e : extras) rule.premise_ids[rule.arity++] = e;
    seen.insert(rule);
    p.rules.push_back(rule);
  }
  for (int attempts = 0; static_cast<int>(p.rules.size()) < rules &&
                         attempts < 20 * rules;
       ++attempts) {
    if (auto r = random_rule(rng, n, others, seen)) p.rules.push_back(*r);
  }
  rng.shuffle(std::span(p.rules));
  rng.shuffle(std::span(p.facts));
  p.query = depth;
  return p;
}

std::vector<std::string> vocabulary_of(const GenConfig& c) {
  return c.vocabulary.empty() ? default_vocabulary() : c.vocabulary;
}

Problem to_problem(const Candidate& cand, const std::vector<std::string>& vocab) {
  auto name = [&](int32_t id) { return Literal(vocab[cand.pool[id]]); };
  Problem out;
  for (const auto& r : cand.problem.rules) {
    Rule rule;
    for (int32_t p : r.premises()) rule.premises.push_back(name(p));
    rule.conclusion = name(r.conclusion);
    out.rules.push_back(std::move(rule));
  }
  for (int32_t f : cand.problem.facts) out.facts.push_back(name(f));
  out.query = name(cand.problem.query);
  out.label = cand.truth.label;
  out.depth = cand.truth.depth;
  return out;
}

uint64_t kind_salt(SubsetKind kind) {
  switch (kind) {
    case SubsetKind::rp: return 0x5250;
    case SubsetKind::lp: return 0x4c50;
    case SubsetKind::rp_balanced: return 0x525062;
  }
  return 0;
}

std::string entry_id(SubsetKind kind, std::size_t index) {
  std::string prefix(to_string(kind));
  std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  char digits[32];
  std::snprintf(digits, sizeof digits, "-%06zu", index);
  return prefix + digits;
}

// Target per depth bucket: n split evenly, remainder to the shallow end.
std::vector<int> even_quota(int n, int buckets) {
  std::vector<int> q(static_cast<std::size_t>(buckets), n / buckets);
  for (int i = 0; i < n % buckets; ++i) ++q[i];
  return q;
}

class Acceptor {
 public:
  virtual ~Acceptor() = default;
  // Target (label, depth) for candidate `slot` of the next batch, if the
  // sampler plants one.
  virtual void begin_batch() {}
  virtual std::optional<std::pair<bool, int>> target(std::size_t /*slot*/) const {
    return std::nullopt;
  }
  virtual bool accept(const Candidate& c) = 0;
  virtual bool full() const = 0;
  virtual std::string shortfall() const = 0;
};

class DepthQuota : public Acceptor {
 public:
  DepthQuota(const GenConfig& c)
      : lo_(c.depth_range.lo),
        quota_(even_quota(c.num_problems, c.depth_range.hi - c.depth_range.lo + 1)),
        have_(quota_.size(), 0) {}

  bool accept(const Candidate& c) override {
    const int b = c.truth.depth - lo_;
    if (b < 0 || b >= static_cast<int>(quota_.size()) || have_[b] >= quota_[b]) {
      return false;
    }
    ++have_[b];
    return true;
  }
  bool full() const override { return have_ == quota_; }
  std::string shortfall() const override {
    std::string out;
    for (std::size_t b = 0; b < quota_.size(); ++b) {
      if (have_[b] < quota_[b]) {
        out += " depth " + std::to_string(lo_ + static_cast<int>(b)) + ": " +
               std::to_string(have_[b]) + "/" + std::to_string(quota_[b]);
      }
    }
    return out;
  }

 protected:
  bool room(int depth) const {
    const int b = depth - lo_;
    return b >= 0 && b < static_cast<int>(quota_.size()) && have_[b] < quota_[b];
  }

  int lo_;
  std::vector<int> quota_;
  std::vector<int> have_;
};

// Within each (depth, rule count) cell a True is only taken when Falses are
// not behind, and vice versa, so every cell stays balanced to within one.
class BalancedQuota : public DepthQuota {
 public:
  using DepthQuota::DepthQuota;

  bool accept(const Candidate& c) override {
    if (!room(c.truth.depth)) return false;
    int& diff = diff_[{c.truth.depth, c.problem.rules.size()}];
    if (c.truth.label ? diff > 0 : diff < 0) return false;
    DepthQuota::accept(c);
    diff += c.truth.label ? 1 : -1;
    return true;
  }

 private:
  std::map<std::pair<int, std::size_t>, int> diff_;
};

// (label, depth) cells of equal size; each batch targets the cells still
// open at its start, round robin.
class CellQuota : public Acceptor {
 public:
  CellQuota(const GenConfig& c)
      : lo_(c.depth_range.lo),
        depths_(c.depth_range.hi - c.depth_range.lo + 1),
        quota_(even_quota(c.num_problems, 2 * depths_)),
        have_(quota_.size(), 0) {
    begin_batch();
  }

  void begin_batch() override {
    open_.clear();
    for (std::size_t cell = 0; cell < quota_.size(); ++cell) {
      if (have_[cell] < quota_[cell]) open_.push_back(cell);
    }
  }
  std::optional<std::pair<bool, int>> target(std::size_t slot) const override {
    if (open_.empty()) return std::nullopt;
    const std::size_t cell = open_[slot % open_.size()];
    return std::pair{cell % 2 == 0, lo_ + static_cast<int>(cell / 2)};
  }
  bool accept(const Candidate& c) override {
    const int b = c.truth.depth - lo_;
    if (b < 0 || b >= depths_) return false;
    const std::size_t cell = static_cast<std::size_t>(2 * b + (c.truth.label ? 0 : 1));
    if (have_[cell] >= quota_[cell]) return false;
    ++have_[cell];
    return true;
  }
  bool full() const override { return have_ == quota_; }
  std::string shortfall() const override {
    std::string out;
    for (std::size_t cell = 0; cell < quota_.size(); ++cell) {
      if (have_[cell] < quota_[cell]) {
        out += std::string(" ") + (cell % 2 == 0 ? "True" : "False") + "/depth " +
               std::to_string(lo_ + static_cast<int>(cell / 2)) + ": " +
               std::to_string(have_[cell]) + "/" + std::to_string(quota_[cell]);
      }
    }
    return out;
  }

 private:
  int lo_;
  int depths_;
  std::vector<int> quota_;
  std::vector<int> have_;
  std::vector<std::size_t> open_;
};

Dataset run_generator(SubsetKind kind, const GenConfig& config) {
  validate_config(config);
  const auto vocab = vocabulary_of(config);
  const uint64_t stream = derive_seed(config.seed, kind_salt(kind));
  const int cap = config.depth_range.hi + 1;

  std::unique_ptr<Acceptor> acceptor;
  switch (kind) {
    case SubsetKind::rp: acceptor = std::make_unique<DepthQuota>(config); break;
    case SubsetKind::rp_balanced:
      acceptor = std::make_unique<BalancedQuota>(config);
      break;
    case SubsetKind::lp: acceptor = std::make_unique<CellQuota>(config); break;
  }

  Dataset out;
  out.kind = kind;
  out.config = config;
  out.entries.reserve(static_cast<std::size_t>(config.num_problems));
  std::unordered_set<std::string> seen;

  const uint64_t budget = static_cast<uint64_t>(config.budget_factor) *
                              static_cast<uint64_t>(config.num_problems) +
                          10000;
  uint64_t next = 0;
  std::vector<Candidate> batch;
  while (!acceptor->full()) {
    if (next >= budget) {
      throw ExhaustedSampling(std::string(to_string(kind)) + ": no more candidates after " +
                              std::to_string(next) + "; unfilled" +
                              acceptor->shortfall());
    }
    acceptor->begin_batch();
    const std::size_t remaining =
        static_cast<std::size_t>(config.num_problems) - out.entries.size();
    const std::size_t size = static_cast<std::size_t>(
        std::min<uint64_t>(budget - next, std::clamp<std::size_t>(8 * remaining, 256, 4096)));
    batch.assign(size, Candidate{});
    parallel_for(size, config.jobs, [&](std::size_t slot) {
      Candidate& cand = batch[slot];
      Rng rng(derive_seed(stream, next + slot));
      const auto target = acceptor->target(slot);
      const int n_max = config.literals_range.hi;
      cand.pool = sample_pool(rng, vocab.size(), n_max);
      cand.problem = target ? sample_planted(rng, config, target->first, target->second)
                            : sample_random(rng, config);
      cand.truth = horn::label_and_depth(cand.problem, cap);
      cand.valid = cand.truth.depth >= config.depth_range.lo &&
                   cand.truth.depth <= config.depth_range.hi &&
                   (!target || (cand.truth.label == target->first &&
                                cand.truth.depth == target->second));
      if (cand.valid) cand.key = canonical_key(to_problem(cand, vocab));
    });
    next += size;
    for (auto& cand : batch) {
      if (!cand.valid || seen.contains(cand.key) || !acceptor->accept(cand)) continue;
      seen.insert(std::move(cand.key));
      out.entries.push_back(
          {entry_id(kind, out.entries.size()), to_problem(cand, vocab)});
      if (acceptor->full()) break;
    }
  }
  return out;
}

}  // namespace

Dataset generate_rp(const GenConfig& config) {
  return run_generator(SubsetKind::rp, config);
}
Dataset generate_lp(const GenConfig& config) {
  return run_generator(SubsetKind::lp, config);
}
Dataset generate_rp_balanced(const GenConfig& config) {
  return run_generator(SubsetKind::rp_balanced, config);
}
Dataset generate(SubsetKind kind, const GenConfig& config) {
  return run_generator(kind, config);
}

// ---------------------------------------------------------------------------

std::vector<StepRecord> expand_steps(const DatasetEntry& entry, OrderPolicy order) {
  auto index = std::make_shared<const ProblemIndex>(entry.problem);
  const auto schedule = horn::oracle_schedule(index->indexed(), true);
  const uint64_t problem_seed = derive_seed(order.seed, fnv1a(entry.id));
  std::vector<StepRecord> out;
  out.reserve(schedule.size() + 1);
  ProofState state(index);
  for (std::size_t i = 0; i <= schedule.size(); ++i) {
    // Same ordering as the engine's input at iteration i + 1.
    const OrderPolicy at =
        order.shuffled ? OrderPolicy::shuffle(derive_seed(problem_seed, i + 1))
                       : OrderPolicy::canonical();
    StepRecord rec;
    rec.problem_id = entry.id;
    rec.step_index = static_cast<int>(i);
    rec.instance.input = render_state(state, at);
    if (i < schedule.size()) {
      rec.instance.target = serialize_rule(entry.problem.rules[schedule[i]]);
      state = state.apply(schedule[i]);
    } else {
      rec.instance.target = state.query_derived() ? "True" : "False";
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<StepRecord> expand_steps(const Dataset& dataset, OrderPolicy order) {
  std::vector<StepRecord> out;
  for (const auto& e : dataset.entries) {
    auto steps = expand_steps(e, order);
    std::move(steps.begin(), steps.end(), std::back_inserter(out));
  }
  return out;
}

SplitDatasets split(const Dataset& dataset, std::array<int, 3> pct, uint64_t seed) {
  if (pct[0] < 0 || pct[1] < 0 || pct[2] < 0 || pct[0] + pct[1] + pct[2] != 100) {
    throw ConfigError("split percentages must be non-negative and sum to 100");
  }
  const int64_t n = static_cast<int64_t>(dataset.entries.size());

  // Largest remainder, ties to the earlier split.
  std::array<int64_t, 3> size{};
  std::array<int64_t, 3> rem{};
  int64_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    size[s] = n * pct[s] / 100;
    rem[s] = n * pct[s] % 100;
    assigned += size[s];
  }
  std::array<int, 3> by_rem{0, 1, 2};
  std::stable_sort(by_rem.begin(), by_rem.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (int i = 0; assigned < n; ++i, ++assigned) ++size[by_rem[i % 3]];

  // Strata in a fixed order, each shuffled on its own stream, then dealt out
  // by smooth weighted round robin so every stratum is split proportionally.
  std::map<std::pair<int, bool>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    const auto& p = dataset.entries[i].problem;
    strata[{p.depth.value_or(0), p.label.value_or(false)}].push_back(i);
  }
  std::vector<std::size_t> sequence;
  for (auto& [key, members] : strata) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(key.first) * 2 + key.second));
    rng.shuffle(std::span(members));
    sequence.insert(sequence.end(), members.begin(), members.end());
  }
  std::array<std::vector<std::size_t>, 3> parts;
  std::array<int64_t, 3> credit{};
  for (std::size_t idx : sequence) {
    int pick = 0;
    for (int s = 0; s < 3; ++s) {
      credit[s] += size[s];
      if (credit[s] > credit[pick]) pick = s;
    }
    credit[pick] -= n;
    parts[pick].push_back(idx);
  }

  SplitDatasets out;
  Dataset* targets[3] = {&out.train, &out.val, &out.test};
  for (int s = 0; s < 3; ++s) {
    std::sort(parts[s].begin(), parts[s].end());
    targets[s]->kind = dataset.kind;
    targets[s]->config = dataset.config;
    for (std::size_t idx : parts[s]) targets[s]->entries.push_back(dataset.entries[idx]);
  }
  return out;
}

}  // namespace proofloop
