#include "proofloop/textwire.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "proofloop/proposers.hpp"
#include "proofloop/rng.hpp"

namespace proofloop {
namespace {

const std::string& checked(const Literal& literal) {
  if (!is_valid_literal(literal.str())) throw IllegalLiteral(literal.str());
  return literal.str();
}

enum class ItemKind { query, rule, fact, proof_marker, terminal };

struct Item {
  ItemKind kind;
  std::size_t offset = 0;
  Literal literal;
  Rule rule;
  bool terminal = false;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool at_end() const noexcept { return pos_ >= text_.size(); }
  std::size_t pos() const noexcept { return pos_; }

  Item next_item() {
    Item item;
    item.offset = pos_;
    if (text_[pos_] == ';') {
      ++pos_;
      item.kind = ItemKind::proof_marker;
      return item;
    }
    for (bool value : {true, false}) {
      std::string_view word = value ? "True" : "False";
      if (text_.substr(pos_, word.size()) == word &&
          (pos_ + word.size() == text_.size() ||
           text_[pos_ + word.size()] == ' ')) {
        pos_ += word.size();
        item.kind = ItemKind::terminal;
        item.terminal = value;
        return item;
      }
    }
    Literal first = literal();
    switch (demarcation()) {
      case '?':
        item.kind = ItemKind::query;
        item.literal = std::move(first);
        return item;
      case '1':
        item.kind = ItemKind::fact;
        item.literal = std::move(first);
        return item;
      case ':':
        throw ParseError(item.offset, "rule without premises");
      case ',':
        break;
      default:
        throw ParseError(pos_ - 1, "expected one of '?', ',', ':', '1'");
    }
    std::vector<Literal> literals{std::move(first)};
    for (;;) {
      if (at_end()) throw ParseError(pos_, "dangling premise");
      literals.push_back(literal());
      const char d = demarcation();
      if (d == ':') break;
      if (d != ',') throw ParseError(pos_ - 1, "expected ',' or ':' in rule");
    }
    item.kind = ItemKind::rule;
    item.rule.conclusion = std::move(literals.back());
    literals.pop_back();
    item.rule.premises = std::move(literals);
    return item;
  }

  // Consumes the single space between items. Returns false at end of input.
  bool separator() {
    if (at_end()) return false;
    if (text_[pos_] != ' ') throw ParseError(pos_, "expected ' ' between items");
    ++pos_;
    if (at_end()) throw ParseError(pos_ - 1, "trailing whitespace");
    if (text_[pos_] == ' ') throw ParseError(pos_, "repeated whitespace");
    return true;
  }

 private:
  Literal literal() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= 'a' && text_[pos_] <= 'z') {
      ++pos_;
    }
    if (pos_ == start) throw ParseError(start, "expected literal");
    return Literal(std::string(text_.substr(start, pos_ - start)));
  }

  char demarcation() {
    if (at_end()) throw ParseError(pos_, "literal without demarcation");
    return text_[pos_++];
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<Literal> sorted(std::vector<Literal> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Shared body of parse_problem and parse_state.
ParsedState parse_items(std::string_view text, bool allow_proof) {
  ParsedState out;
  Problem& problem = out.problem;
  if (text.empty()) throw ParseError(0, "empty input");
  if (text.front() == ' ') throw ParseError(0, "leading whitespace");

  Scanner scanner(text);
  bool have_query = false;
  bool in_proof = false;
  std::set<std::pair<Literal, std::vector<Literal>>> rule_keys;
  std::set<Literal> facts;
  do {
    Item item = scanner.next_item();
    if (in_proof) {
      if (item.kind != ItemKind::rule) {
        throw ParseError(item.offset, "only rules may follow ';'");
      }
      out.proof.push_back(std::move(item.rule));
      continue;
    }
    switch (item.kind) {
      case ItemKind::query:
        if (have_query) throw ParseError(item.offset, "second query");
        have_query = true;
        problem.query = std::move(item.literal);
        break;
      case ItemKind::fact:
        if (!facts.insert(item.literal).second) {
          throw ParseError(item.offset, "duplicate fact");
        }
        problem.facts.push_back(std::move(item.literal));
        break;
      case ItemKind::rule:
        if (!is_well_formed(item.rule)) {
          throw ParseError(item.offset,
                           "rule needs 1-3 distinct premises and a new conclusion");
        }
        if (!rule_keys.emplace(item.rule.conclusion, sorted(item.rule.premises))
                 .second) {
          throw ParseError(item.offset, "duplicate rule");
        }
        problem.rules.push_back(std::move(item.rule));
        break;
      case ItemKind::proof_marker:
        if (!allow_proof) throw ParseError(item.offset, "unexpected ';'");
        in_proof = true;
        break;
      case ItemKind::terminal:
        throw ParseError(item.offset, "unexpected True/False");
    }
  } while (scanner.separator());
  if (!have_query) throw ParseError(text.size(), "missing query");
  return out;
}

std::string join_items(std::vector<std::string> items, OrderPolicy order) {
  if (order.shuffled) {
    // Rank by content first so the permutation ignores the source order.
    std::sort(items.begin(), items.end());
    Rng rng(order.seed);
    rng.shuffle(std::span(items));
  }
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i != 0) out += ' ';
    out += items[i];
  }
  return out;
}

std::vector<std::string> problem_items(const Problem& problem) {
  std::vector<std::string> items;
  items.reserve(1 + problem.rules.size() + problem.facts.size());
  items.push_back(checked(problem.query) + "?");
  for (const auto& rule : problem.rules) items.push_back(serialize_rule(rule));
  for (const auto& fact : problem.facts) items.push_back(checked(fact) + "1");
  return items;
}

}  // namespace

std::string serialize_rule(const Rule& rule) {
  std::string out;
  for (const auto& p : rule.premises) {
    out += checked(p);
    out += ',';
  }
  out += checked(rule.conclusion);
  out += ':';
  return out;
}

std::string serialize_problem(const Problem& problem, OrderPolicy order) {
  return join_items(problem_items(problem), order);
}

Problem parse_problem(std::string_view text) {
  return std::move(parse_items(text, false).problem);
}

ParsedState parse_state(std::string_view text) { return parse_items(text, true); }

Proposal parse_proposal(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const auto last = text.find_last_not_of(" \t\r\n");
  const std::string_view body =
      first == std::string_view::npos ? std::string_view{}
                                      : text.substr(first, last - first + 1);
  if (body == "True") return make_terminal(true);
  if (body == "False") return make_terminal(false);
  if (body.empty() || body.front() == ';' || body.front() == 'T' ||
      body.front() == 'F') {
    return make_malformed(std::string(text));
  }
  try {
    Scanner scanner(body);
    Item item = scanner.next_item();
    if (item.kind == ItemKind::rule && scanner.at_end()) {
      return make_rule_proposal(std::move(item.rule));
    }
  } catch (const ParseError&) {
  }
  return make_malformed(std::string(text));
}

std::string proposal_text(const Proposal& proposal) {
  if (proposal.is_rule()) return serialize_rule(proposal.rule());
  if (proposal.is_terminal()) return proposal.terminal_value() ? "True" : "False";
  return std::get<Malformed>(proposal.kind).text;
}

std::string render_state(const ProofState& state, OrderPolicy order) {
  auto items = problem_items(state.problem());
  for (const auto& fact : state.appended_facts()) items.push_back(fact.str() + "1");
  std::string out = join_items(std::move(items), order);
  out += " ;";
  for (std::size_t rule : state.steps()) {
    out += ' ';
    out += serialize_rule(state.problem().rules[rule]);
  }
  return out;
}

StepInstance render_step_instance(const Problem& problem,
                                  std::span<const Rule> prefix,
                                  OrderPolicy order) {
  ProofState state(problem);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    try {
      state = apply_rule(state, prefix[i]);
    } catch (const Error& e) {
      throw InvalidPrefix("prefix step " + std::to_string(i) + ": " + e.what());
    }
  }
  return {render_state(state, order), proposal_text(oracle_propose(state))};
}

std::string render_whole_proof(const Problem& problem, ProofOrder order) {
  const ProblemIndex index(problem);
  const auto& indexed = index.indexed();
  std::string out;
  auto emit = [&](std::size_t r) {
    out += serialize_rule(problem.rules[r]);
    out += ' ';
  };

  if (order == ProofOrder::forward) {
    for (std::size_t r : horn::oracle_schedule(indexed, true)) emit(r);
  } else {
    const auto depth = horn::derivation_depths(indexed);
    std::vector<char> visited(indexed.num_literals, 0);
    // Goal-first walk: for a derivable literal, the first rule realising its
    // minimum depth; for an underivable one, every rule that concludes it.
    auto walk = [&](auto&& self, int32_t literal) -> void {
      if (visited[literal]) return;
      visited[literal] = 1;
      const bool derivable = depth[literal] != horn::kUnreached;
      if (derivable && depth[literal] == 0) return;
      for (std::size_t r = 0; r < indexed.rules.size(); ++r) {
        const auto& rule = indexed.rules[r];
        if (rule.conclusion != literal) continue;
        if (derivable) {
          int worst = 0;
          bool ready = true;
          for (int32_t p : rule.premises()) {
            if (depth[p] == horn::kUnreached) ready = false;
            else worst = std::max(worst, depth[p]);
          }
          if (!ready || worst + 1 != depth[literal]) continue;
          emit(r);
          for (int32_t p : rule.premises()) self(self, p);
          return;
        }
        emit(r);
        for (int32_t p : rule.premises()) {
          if (depth[p] == horn::kUnreached) self(self, p);
        }
      }
    };
    walk(walk, indexed.query);
  }
  const bool label = horn::derivation_depths(indexed)[indexed.query] !=
                     horn::kUnreached;
  out += label ? "True" : "False";
  return out;
}

}  // namespace proofloop
