#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/error.hpp"
#include "proofloop/logic.hpp"
#include "proofloop/proposal.hpp"
#include "proofloop/taxonomy.hpp"
#include "proofloop/textwire.hpp"

namespace proofloop {

struct ProofTrace;

struct ProposeRequest {
  const ProofState& state;
  int candidates = 1;  // k: the proposer may return 1..k proposals
  int iteration = 1;   // 1-based engine iteration
  OrderPolicy order;   // how the state should be rendered if it is rendered
};

// A next-step policy. Returns proposals in rank order (rank 0 first).
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual std::vector<Proposal> propose(const ProposeRequest& request) = 0;
  virtual bool supports_concurrent_calls() const noexcept { return false; }
};

// Transport failure or crash of a proposer; distinct from a malformed
// proposal. The engine attaches the partial trace before rethrowing.
class ProposerFailure : public Error {
 public:
  explicit ProposerFailure(const std::string& what)
      : Error("ProposerFailure", what) {}

  const std::shared_ptr<const ProofTrace>& partial_trace() const noexcept {
    return partial_;
  }
  void set_partial_trace(std::shared_ptr<const ProofTrace> trace) {
    partial_ = std::move(trace);
  }

 private:
  std::shared_ptr<const ProofTrace> partial_;
};

// Forward chaining, one step at a time: True once the query is derived,
// otherwise the first rule in problem order that is applicable, unapplied and
// concludes something new, otherwise False.
Proposal oracle_propose(const ProofState& state);

class OracleProposer final : public Proposer {
 public:
  std::vector<Proposal> propose(const ProposeRequest& request) override {
    return {oracle_propose(request.state)};
  }
  bool supports_concurrent_calls() const noexcept override { return true; }
};

// Text-in/text-out callable: receives the rendered state and k, returns
// candidate texts. Exceptions from the callable become ProposerFailure.
class CallbackProposer final : public Proposer {
 public:
  using Callback =
      std::function<std::vector<std::string>(const std::string&, int)>;

  explicit CallbackProposer(Callback callback) : callback_(std::move(callback)) {}
  std::vector<Proposal> propose(const ProposeRequest& request) override;

 private:
  Callback callback_;
};

// Forwards to a shared proposer, holding a mutex around every call when the
// target does not support concurrent calls.
class SharedProposer final : public Proposer {
 public:
  SharedProposer(Proposer& target, std::mutex& mutex)
      : target_(target), mutex_(mutex) {}
  std::vector<Proposal> propose(const ProposeRequest& request) override;
  bool supports_concurrent_calls() const noexcept override { return true; }

 private:
  Proposer& target_;
  std::mutex& mutex_;
};

// ---------------------------------------------------------------------------
// Error-injecting corruptors.

enum class CorruptorKind {
  synonym_swap,     // swap one literal for an out-of-problem synonym
  premise_drop,     // drop one premise of the proposed rule
  fact_mirage,      // treat the last-listed rule's conclusion as a fact
  premature_false,  // False while productive rules remain
  premature_true,   // True while the query is underived
};

std::string_view to_string(CorruptorKind kind) noexcept;
std::optional<CorruptorKind> parse_corruptor_kind(std::string_view name);

// Literal -> synonym. Lookups are exact; the table need not be symmetric.
class SynonymTable {
 public:
  SynonymTable() = default;
  explicit SynonymTable(std::multimap<std::string, std::string> entries)
      : entries_(entries.begin(), entries.end()) {}

  // "word synonym" per line; '#' starts a comment. Throws ConfigError.
  static SynonymTable parse(std::string_view text);
  static const SynonymTable& builtin();

  std::vector<std::string> synonyms_of(std::string_view word) const;
  // True when either word is listed as a synonym of the other.
  bool related(std::string_view a, std::string_view b) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::multimap<std::string, std::string, std::less<>> entries_;
};

struct CorruptorSpec {
  CorruptorKind kind = CorruptorKind::synonym_swap;
  double rate = 0.0;
  uint64_t seed = 0;
  SynonymTable synonyms = SynonymTable::builtin();
};

// "premature_false@0.05" -> spec with that kind and rate. Throws ConfigError.
CorruptorSpec parse_corruptor_spec(std::string_view text, uint64_t seed);

// One corruption attempt. `applied` is false when the spec could not be
// satisfied at that state; the base proposal then passes through unchanged.
struct Injection {
  int iteration = 0;
  uint64_t call_index = 0;
  CorruptorKind kind = CorruptorKind::synonym_swap;
  std::optional<ErrorType> expected;
  bool applied = false;
  std::string base_text;
  std::string emitted_text;
};

// Wraps a base proposer; on each call, with probability `rate`, rewrites the
// top-ranked proposal to produce the spec's error. Deterministic under
// (seed, call index).
class CorruptingProposer final : public Proposer {
 public:
  CorruptingProposer(std::unique_ptr<Proposer> base, CorruptorSpec spec)
      : base_(std::move(base)), spec_(std::move(spec)) {}

  std::vector<Proposal> propose(const ProposeRequest& request) override;
  bool supports_concurrent_calls() const noexcept override { return false; }

  const std::vector<Injection>& injections() const noexcept { return log_; }

 private:
  std::unique_ptr<Proposer> base_;
  CorruptorSpec spec_;
  uint64_t calls_ = 0;
  std::vector<Injection> log_;
};

}  // namespace proofloop
