#pragma once

#include <string>
#include <variant>

#include "proofloop/logic.hpp"

namespace proofloop {

struct Terminal {
  bool value = false;
  friend bool operator==(const Terminal&, const Terminal&) = default;
};

// Proposer output that is neither a rule nor True/False. Kept verbatim so it
// can be audited.
struct Malformed {
  std::string text;
  friend bool operator==(const Malformed&, const Malformed&) = default;
};

struct Proposal {
  std::variant<Rule, Terminal, Malformed> kind;
  int rank = 0;

  bool is_rule() const noexcept { return std::holds_alternative<Rule>(kind); }
  bool is_terminal() const noexcept {
    return std::holds_alternative<Terminal>(kind);
  }
  bool is_malformed() const noexcept {
    return std::holds_alternative<Malformed>(kind);
  }
  const Rule& rule() const { return std::get<Rule>(kind); }
  bool terminal_value() const { return std::get<Terminal>(kind).value; }

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

inline Proposal make_rule_proposal(Rule rule, int rank = 0) {
  return {std::move(rule), rank};
}
inline Proposal make_terminal(bool value, int rank = 0) {
  return {Terminal{value}, rank};
}
inline Proposal make_malformed(std::string text, int rank = 0) {
  return {Malformed{std::move(text)}, rank};
}

}  // namespace proofloop
