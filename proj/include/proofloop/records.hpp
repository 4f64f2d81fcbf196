#pragma once

// One-JSON-object-per-line record formats shared by the CLI and the bindings.
// Writers produce a single line without the trailing newline; readers throw
// BadRecord.

#include <string>
#include <string_view>

#include "proofloop/auditor.hpp"
#include "proofloop/engine.hpp"
#include "proofloop/genset.hpp"
#include "proofloop/proposers.hpp"

namespace proofloop {

// {id, subset, text, label, depth, num_rules, num_facts}, plus "proof" (the
// whole-proof target) when `proof` is set.
std::string dataset_record(const DatasetEntry& entry, SubsetKind kind,
                           std::optional<ProofOrder> proof = std::nullopt);
struct DatasetRecord {
  DatasetEntry entry;
  std::optional<SubsetKind> kind;
};
DatasetRecord parse_dataset_record(std::string_view line);

// {problem_id, step_index, input, target}
std::string step_record(const StepRecord& step);
StepRecord parse_step_record(std::string_view line);

// {problem_id, steps, faulty: [{iter, text, reason}], terminal, iterations,
//  predicted}
std::string trace_record(const ProofTrace& trace);
ProofTrace parse_trace_record(std::string_view line);

// {problem_id, consistent, errors, sites: [{iter, type, detail}]}
std::string verdict_record(const AuditVerdict& verdict);
AuditVerdict parse_verdict_record(std::string_view line);

// {problem_id, iter, call, kind, applied, expected, base, emitted}
std::string injection_record(const std::string& problem_id,
                             const Injection& injection);

}  // namespace proofloop
