#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "proofloop/engine.hpp"
#include "proofloop/logic.hpp"
#include "proofloop/taxonomy.hpp"

namespace proofloop {

struct ErrorSite {
  int iteration = 0;
  ErrorType type = ErrorType::non_existing_rule;
  std::string detail;

  friend bool operator==(const ErrorSite&, const ErrorSite&) = default;
};

struct AuditVerdict {
  std::string problem_id;
  bool consistent = false;
  std::set<ErrorType> errors;
  std::vector<ErrorSite> sites;

  friend bool operator==(const AuditVerdict&, const AuditVerdict&) = default;
};

// Replays `trace` against the problem and types every faulty event. Throws
// TraceMismatch when the trace cannot have come from this problem (an
// accepted step that fails replay, a recorded rejection of a valid proposal,
// or iteration bookkeeping that does not add up).
AuditVerdict audit_trace(std::shared_ptr<const ProblemIndex> problem,
                         const ProofTrace& trace);
AuditVerdict audit_trace(const Problem& problem, const ProofTrace& trace);

// Counts behind one row of a consistency table.
struct ConsistencyTable {
  int64_t traces = 0;
  int64_t inconsistent = 0;
  int64_t non_existing_rule = 0;
  int64_t inapplicable_rule = 0;
  int64_t spurious_match = 0;
  int64_t unexhausted_search = 0;

  int64_t count(ErrorType type) const noexcept;
  // Percentages over all traces.
  double frequency(ErrorType type) const noexcept;
  double error_rate() const noexcept;
  double consistency() const noexcept;

  friend bool operator==(const ConsistencyTable&, const ConsistencyTable&) = default;
};

// Throws EmptyInput on an empty verdict list.
ConsistencyTable aggregate(std::span<const AuditVerdict> verdicts);

}  // namespace proofloop
