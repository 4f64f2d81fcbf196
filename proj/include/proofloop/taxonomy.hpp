#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace proofloop {

// Consistency errors a proof trace can exhibit.
enum class ErrorType {
  non_existing_rule,   // NonExR: proposed rule is not in the problem
  inapplicable_rule,   // InappR: rule is in the problem, premises unmet
  spurious_match,      // SpMatch: True before the query is derived
  unexhausted_search,  // UnexhS: False while productive rules remain
};

inline constexpr std::array<ErrorType, 4> kAllErrorTypes = {
    ErrorType::non_existing_rule, ErrorType::inapplicable_rule,
    ErrorType::spurious_match, ErrorType::unexhausted_search};

constexpr std::string_view to_string(ErrorType type) noexcept {
  switch (type) {
    case ErrorType::non_existing_rule: return "NonExR";
    case ErrorType::inapplicable_rule: return "InappR";
    case ErrorType::spurious_match: return "SpMatch";
    case ErrorType::unexhausted_search: return "UnexhS";
  }
  return "?";
}

inline std::optional<ErrorType> parse_error_type(std::string_view name) {
  for (ErrorType t : kAllErrorTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

}  // namespace proofloop
