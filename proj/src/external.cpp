#include "proofloop/external.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace proofloop {

using Json = nlohmann::json;

Endpoint parse_endpoint(std::string_view uri) {
  Endpoint e;
  if (uri.starts_with("stdio:")) {
    e.transport = Endpoint::Transport::stdio;
    e.command = std::string(uri.substr(6));
    if (e.command.empty()) throw ConfigError("stdio endpoint without a command");
    return e;
  }
  if (uri.starts_with("tcp:")) {
    e.transport = Endpoint::Transport::tcp;
    const auto rest = uri.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw ConfigError("tcp endpoint must be tcp:<host>:<port>");
    }
    e.host = std::string(rest.substr(0, colon));
    const std::string port(rest.substr(colon + 1));
    char* end = nullptr;
    const long value = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || value < 1 || value > 65535) {
      throw ConfigError("bad tcp port '" + port + "'");
    }
    e.port = static_cast<uint16_t>(value);
    return e;
  }
  throw ConfigError("endpoint must start with stdio: or tcp:");
}

std::string encode_request(const WireRequest& request) {
  Json j;
  j["v"] = request.version;
  j["state"] = request.state;
  j["k"] = request.k;
  return j.dump();
}

WireRequest decode_request(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw BadRecord(std::string("request is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("v") || !j["v"].is_number_integer()) {
    throw BadRecord("request lacks an integer 'v'");
  }
  WireRequest r;
  r.version = j["v"].get<int>();
  if (r.version != kWireVersion) {
    throw BadRecord("unsupported protocol version " + std::to_string(r.version));
  }
  if (!j.contains("state") || !j["state"].is_string()) {
    throw BadRecord("request lacks a string 'state'");
  }
  r.state = j["state"].get<std::string>();
  r.k = j.contains("k") && j["k"].is_number_integer() ? j["k"].get<int>() : 1;
  if (r.k < 1) throw BadRecord("request 'k' must be positive");
  return r;
}

std::string encode_response(const std::vector<std::string>& candidates) {
  Json j;
  j["v"] = kWireVersion;
  j["candidates"] = candidates;
  return j.dump();
}

std::optional<std::vector<std::string>> decode_response(std::string_view line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto v = j.find("v");
  auto c = j.find("candidates");
  if (v == j.end() || !v->is_number_integer() || v->get<int>() != kWireVersion ||
      c == j.end() || !c->is_array()) {
    return std::nullopt;
  }
  std::vector<std::string> out;
  for (const auto& item : *c) {
    if (!item.is_string()) return std::nullopt;
    out.push_back(item.get<std::string>());
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ExternalProposer::Connection {
  int read_fd = -1;
  int write_fd = -1;
  pid_t child = -1;
  std::string buffer;
  std::string peer;

  ~Connection() {
    if (write_fd >= 0 && write_fd != read_fd) ::close(write_fd);
    if (read_fd >= 0) ::close(read_fd);
    if (child > 0) reap();
  }

  // The child sees EOF on stdin and normally exits; give it a moment before
  // forcing the issue.
  void reap() {
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(child, nullptr, WNOHANG) != 0) return;
      ::usleep(10000);
    }
    ::kill(child, SIGKILL);
    ::waitpid(child, nullptr, 0);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ProposerFailure(peer + ": " + what);
  }

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(write_fd, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) fail("timed out waiting for a response");
      pollfd pfd{read_fd, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        fail(std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) fail("timed out waiting for a response");
      char chunk[4096];
      const ssize_t n = ::read(read_fd, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) fail("connection closed by peer");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

namespace {

std::unique_ptr<ExternalProposer::Connection> spawn(const std::string& command);
std::unique_ptr<ExternalProposer::Connection> dial(const std::string& host,
                                                   uint16_t port);

}  // namespace

ExternalProposer::ExternalProposer(Endpoint endpoint,
                                   std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  // A peer that dies mid-write must surface as EPIPE, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);
  conn_ = endpoint.transport == Endpoint::Transport::stdio
              ? spawn(endpoint.command)
              : dial(endpoint.host, endpoint.port);
}

ExternalProposer::~ExternalProposer() = default;

std::vector<Proposal> ExternalProposer::propose(const ProposeRequest& request) {
  conn_->write_line(encode_request(
      {kWireVersion, render_state(request.state, request.order), request.candidates}));
  const std::string line = conn_->read_line(timeout_);
  auto candidates = decode_response(line);
  if (!candidates) return {make_malformed(line)};
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < candidates->size() &&
                          i < static_cast<std::size_t>(request.candidates);
       ++i) {
    Proposal p = parse_proposal((*candidates)[i]);
    p.rank = static_cast<int>(i);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::unique_ptr<ExternalProposer::Connection> spawn(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) {
    throw ProposerFailure(std::string("pipe failed: ") + std::strerror(errno));
  }
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ProposerFailure(std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw ProposerFailure(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  auto conn = std::make_unique<ExternalProposer::Connection>();
  conn->write_fd = to_child[1];
  conn->read_fd = from_child[0];
  conn->child = pid;
  conn->peer = "stdio:" + command;
  return conn;
}

std::unique_ptr<ExternalProposer::Connection> dial(const std::string& host,
                                                   uint16_t port) {
  const std::string peer = "tcp:" + host + ":" + std::to_string(port);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found);
      rc != 0) {
    throw ProposerFailure(peer + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  int last_errno = 0;
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    last_errno = errno;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw ProposerFailure(peer + ": connect failed: " + std::strerror(last_errno));
  }
  auto conn = std::make_unique<ExternalProposer::Connection>();
  conn->read_fd = fd;
  conn->write_fd = fd;
  conn->peer = peer;
  return conn;
}

}  // namespace

}  // namespace proofloop
