#pragma once

// External proposers over a line protocol. Each request and each response is
// one UTF-8 JSON object on its own line:
//
//   request   {"v":1,"state":"<state text>","k":<candidates>}
//   response  {"v":1,"candidates":["<proposal text>", ...]}
//
// The peer is either a child process spoken to over stdin/stdout
// ("stdio:<shell command>") or a TCP server ("tcp:<host>:<port>").

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/proposers.hpp"

namespace proofloop {

inline constexpr int kWireVersion = 1;

struct Endpoint {
  enum class Transport { stdio, tcp };
  Transport transport = Transport::stdio;
  std::string command;  // stdio
  std::string host;     // tcp
  uint16_t port = 0;    // tcp
};

// Throws ConfigError.
Endpoint parse_endpoint(std::string_view uri);

struct WireRequest {
  int version = kWireVersion;
  std::string state;
  int k = 1;
};

std::string encode_request(const WireRequest& request);
// Throws BadRecord.
WireRequest decode_request(std::string_view line);

std::string encode_response(const std::vector<std::string>& candidates);
// nullopt for anything that is not a version-1 response with a list of
// strings.
std::optional<std::vector<std::string>> decode_response(std::string_view line);

class ExternalProposer final : public Proposer {
 public:
  // Connects (or spawns the child) immediately; throws ProposerFailure when
  // that fails.
  explicit ExternalProposer(Endpoint endpoint,
                            std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalProposer() override;
  ExternalProposer(const ExternalProposer&) = delete;
  ExternalProposer& operator=(const ExternalProposer&) = delete;

  // A response that does not decode becomes one Malformed proposal holding
  // the raw line; more than k candidates are cut to k. Transport errors,
  // timeouts and EOF throw ProposerFailure.
  std::vector<Proposal> propose(const ProposeRequest& request) override;

  struct Connection;

 private:
  std::unique_ptr<Connection> conn_;
  std::chrono::milliseconds timeout_;
};

}  // namespace proofloop
