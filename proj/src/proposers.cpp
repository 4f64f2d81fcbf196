#include "proofloop/proposers.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "proofloop/builtin_data.hpp"
#include "proofloop/rng.hpp"

namespace proofloop {

Proposal oracle_propose(const ProofState& state) {
  if (state.query_derived()) return make_terminal(true);
  const auto& rules = state.problem().rules;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (state.is_productive(r)) return make_rule_proposal(rules[r]);
  }
  return make_terminal(false);
}

std::vector<Proposal> CallbackProposer::propose(const ProposeRequest& request) {
  std::vector<std::string> texts;
  try {
    texts = callback_(render_state(request.state, request.order),
                      request.candidates);
  } catch (const std::exception& e) {
    throw ProposerFailure(std::string("callback proposer failed: ") + e.what());
  }
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < texts.size() &&
                          i < static_cast<std::size_t>(request.candidates);
       ++i) {
    Proposal p = parse_proposal(texts[i]);
    p.rank = static_cast<int>(i);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Proposal> SharedProposer::propose(const ProposeRequest& request) {
  if (target_.supports_concurrent_calls()) return target_.propose(request);
  std::lock_guard lock(mutex_);
  return target_.propose(request);
}

// ---------------------------------------------------------------------------

std::string_view to_string(CorruptorKind kind) noexcept {
  switch (kind) {
    case CorruptorKind::synonym_swap: return "synonym_swap";
    case CorruptorKind::premise_drop: return "premise_drop";
    case CorruptorKind::fact_mirage: return "fact_mirage";
    case CorruptorKind::premature_false: return "premature_false";
    case CorruptorKind::premature_true: return "premature_true";
  }
  return "?";
}

std::optional<CorruptorKind> parse_corruptor_kind(std::string_view name) {
  for (auto kind : {CorruptorKind::synonym_swap, CorruptorKind::premise_drop,
                    CorruptorKind::fact_mirage, CorruptorKind::premature_false,
                    CorruptorKind::premature_true}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

SynonymTable SynonymTable::parse(std::string_view text) {
  std::multimap<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    std::string synonym;
    std::string extra;
    if (!(fields >> word)) continue;
    if (!(fields >> synonym) || (fields >> extra) || !is_valid_literal(word) ||
        !is_valid_literal(synonym) || word == synonym) {
      throw ConfigError("synonym table line " + std::to_string(line_no) +
                        ": expected two distinct lowercase words");
    }
    entries.emplace(std::move(word), std::move(synonym));
  }
  return SynonymTable(std::move(entries));
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = parse(builtin_synonyms_text());
  return table;
}

std::vector<std::string> SynonymTable::synonyms_of(std::string_view word) const {
  std::vector<std::string> out;
  auto [lo, hi] = entries_.equal_range(word);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

bool SynonymTable::related(std::string_view a, std::string_view b) const {
  auto has = [&](std::string_view from, std::string_view to) {
    auto [lo, hi] = entries_.equal_range(from);
    return std::any_of(lo, hi, [&](const auto& e) { return e.second == to; });
  };
  return has(a, b) || has(b, a);
}

CorruptorSpec parse_corruptor_spec(std::string_view text, uint64_t seed) {
  const auto at = text.find('@');
  const auto name = text.substr(0, at);
  auto kind = parse_corruptor_kind(name);
  if (!kind) {
    throw ConfigError("unknown corruptor '" + std::string(name) + "'");
  }
  CorruptorSpec spec;
  spec.kind = *kind;
  spec.seed = seed;
  spec.rate = 1.0;
  if (at != std::string_view::npos) {
    const std::string rate(text.substr(at + 1));
    std::size_t used = 0;
    try {
      spec.rate = std::stod(rate, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rate.size() || rate.empty()) {
      throw ConfigError("bad corruptor rate '" + rate + "'");
    }
  }
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw ConfigError("corruptor rate must lie in [0, 1]");
  }
  return spec;
}

namespace {

struct Corruption {
  std::optional<Proposal> proposal;
  std::optional<ErrorType> expected;
};

bool in_problem(const ProblemIndex& index, const std::string& word) {
  return index.literal_id(Literal(word)).has_value();
}

Corruption synonym_swap(const ProofState& state, const Proposal& base,
                        const SynonymTable& table, Rng& rng) {
  const auto& index = state.index();
  const auto& query = state.problem().query;
  if (!state.query_derived()) {
    // A derived literal standing in for its synonym, the query.
    for (const auto& literal : state.derived_set()) {
      if (table.related(literal.str(), query.str())) {
        return {make_terminal(true), ErrorType::spurious_match};
      }
    }
  }
  if (!base.is_rule()) return {};
  const Rule& rule = base.rule();
  struct Site {
    std::size_t position;  // premises first, conclusion last
    std::string synonym;
  };
  std::vector<Site> sites;
  for (std::size_t i = 0; i <= rule.premises.size(); ++i) {
    const auto& word =
        i < rule.premises.size() ? rule.premises[i] : rule.conclusion;
    for (auto& s : table.synonyms_of(word.str())) {
      if (!in_problem(index, s)) sites.push_back({i, std::move(s)});
    }
  }
  if (sites.empty()) return {};
  const Site& site = sites[rng.below(sites.size())];
  Rule swapped = rule;
  if (site.position < swapped.premises.size()) {
    swapped.premises[site.position] = Literal(site.synonym);
  } else {
    swapped.conclusion = Literal(site.synonym);
  }
  return {make_rule_proposal(std::move(swapped)), ErrorType::non_existing_rule};
}

Corruption premise_drop(const ProofState& state, const Proposal& base,
                        Rng& rng) {
  if (!base.is_rule() || base.rule().premises.size() < 2) return {};
  std::vector<Rule> options;
  for (std::size_t i = 0; i < base.rule().premises.size(); ++i) {
    Rule dropped = base.rule();
    dropped.premises.erase(dropped.premises.begin() + static_cast<long>(i));
    // A drop that lands on another problem rule is not a non-existing rule.
    if (!state.index().find_rule(dropped)) options.push_back(std::move(dropped));
  }
  if (options.empty()) return {};
  return {make_rule_proposal(std::move(options[rng.below(options.size())])),
          ErrorType::non_existing_rule};
}

Corruption fact_mirage(const ProofState& state, Rng& rng) {
  const auto& rules = state.problem().rules;
  if (rules.empty()) return {};
  const Literal& mirage = rules.back().conclusion;
  if (state.is_derived(mirage)) return {};
  std::vector<std::size_t> preferred;
  std::vector<std::size_t> fallback;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& ps = rules[r].premises;
    if (std::find(ps.begin(), ps.end(), mirage) == ps.end()) continue;
    const bool rest_met = std::all_of(ps.begin(), ps.end(), [&](const Literal& p) {
      return p == mirage || state.is_derived(p);
    });
    (rest_met ? preferred : fallback).push_back(r);
  }
  const auto& pool = preferred.empty() ? fallback : preferred;
  if (pool.empty()) return {};
  return {make_rule_proposal(rules[pool[rng.below(pool.size())]]),
          ErrorType::inapplicable_rule};
}

}  // namespace

std::vector<Proposal> CorruptingProposer::propose(const ProposeRequest& request) {
  auto proposals = base_->propose(request);
  const uint64_t call = calls_++;
  Rng rng(derive_seed(spec_.seed, call));
  if (proposals.empty() || !rng.chance(spec_.rate)) return proposals;

  const ProofState& state = request.state;
  const Proposal& base = proposals.front();
  Corruption c;
  switch (spec_.kind) {
    case CorruptorKind::synonym_swap:
      c = synonym_swap(state, base, spec_.synonyms, rng);
      break;
    case CorruptorKind::premise_drop:
      c = premise_drop(state, base, rng);
      break;
    case CorruptorKind::fact_mirage:
      c = fact_mirage(state, rng);
      break;
    case CorruptorKind::premature_false:
      if (state.has_productive_rule()) {
        c = {make_terminal(false), ErrorType::unexhausted_search};
      }
      break;
    case CorruptorKind::premature_true:
      if (!state.query_derived()) {
        c = {make_terminal(true), ErrorType::spurious_match};
      }
      break;
  }

  Injection entry;
  entry.iteration = request.iteration;
  entry.call_index = call;
  entry.kind = spec_.kind;
  entry.base_text = proposal_text(base);
  entry.applied = c.proposal.has_value();
  entry.expected = c.expected;
  if (c.proposal) {
    c.proposal->rank = base.rank;
    proposals.front() = std::move(*c.proposal);
  }
  entry.emitted_text = proposal_text(proposals.front());
  log_.push_back(std::move(entry));
  return proposals;
}

}  // namespace proofloop
