// Reference external proposer. Answers each request with the forward-chaining
// oracle's next step, recomputed from the state text alone.
//
//   oracle_peer                      serve on stdin/stdout
//   oracle_peer --tcp PORT           serve TCP connections one at a time
//                                    (PORT 0 picks a free port)
//
// Test knobs: --reply TEXT answers TEXT to everything, --close-after N exits
// after N responses, --delay-ms D sleeps before each response, --extra N
// pads each response with N copies of the first candidate.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "proofloop/external.hpp"
#include "proofloop/proposers.hpp"

using namespace proofloop;

namespace {

struct Options {
  std::optional<std::string> reply;
  int close_after = -1;
  int delay_ms = 0;
  int extra = 0;
};

std::string oracle_answer(const std::string& state_text) {
  ParsedState parsed = parse_state(state_text);
  ProofState state(std::move(parsed.problem));
  for (const auto& step : parsed.proof) state = apply_rule(state, step);
  return proposal_text(oracle_propose(state));
}

std::string respond(const std::string& line, const Options& opt) {
  std::vector<std::string> candidates;
  try {
    const WireRequest request = decode_request(line);
    candidates.push_back(opt.reply ? *opt.reply : oracle_answer(request.state));
  } catch (const Error&) {
    return encode_response({});
  }
  for (int i = 0; i < opt.extra; ++i) candidates.push_back(candidates.front());
  return encode_response(candidates);
}

// Returns false once the response budget is spent.
template <typename ReadLine, typename WriteLine>
bool serve(ReadLine&& read_line, WriteLine&& write_line, const Options& opt,
           int& answered) {
  std::string line;
  while (read_line(line)) {
    if (opt.close_after >= 0 && answered >= opt.close_after) return false;
    if (opt.delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(opt.delay_ms));
    }
    if (!write_line(respond(line, opt))) return true;
    ++answered;
  }
  return true;
}

int serve_tcp(int port, const std::string& port_file, const Options& opt) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listener, 4) != 0) {
    std::perror("oracle_peer: listen");
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int bound = ntohs(addr.sin_port);
  if (!port_file.empty()) {
    const std::string tmp = port_file + ".tmp";
    std::ofstream(tmp) << bound << "\n";
    std::rename(tmp.c_str(), port_file.c_str());
  } else {
    std::cout << bound << std::endl;
  }

  int answered = 0;
  for (;;) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    std::string buffer;
    auto read_line = [&](std::string& line) {
      for (;;) {
        if (auto nl = buffer.find('\n'); nl != std::string::npos) {
          line = buffer.substr(0, nl);
          buffer.erase(0, nl + 1);
          return true;
        }
        char chunk[4096];
        const ssize_t n = ::read(fd, chunk, sizeof chunk);
        if (n <= 0) return false;
        buffer.append(chunk, static_cast<std::size_t>(n));
      }
    };
    auto write_line = [&](const std::string& text) {
      const std::string data = text + "\n";
      std::size_t off = 0;
      while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n <= 0) return false;
        off += static_cast<std::size_t>(n);
      }
      return true;
    };
    const bool keep_going = serve(read_line, write_line, opt, answered);
    ::close(fd);
    if (!keep_going) return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oracle_peer: reference external proposer"};
  Options opt;
  std::optional<int> tcp;
  std::string port_file;
  std::string reply;
  app.add_option("--tcp", tcp, "Serve TCP on this port (0: any free port)");
  app.add_option("--port-file", port_file, "Write the bound port here");
  app.add_option("--reply", reply, "Answer every request with this text");
  app.add_option("--close-after", opt.close_after, "Exit after this many responses");
  app.add_option("--delay-ms", opt.delay_ms, "Sleep before each response");
  app.add_option("--extra", opt.extra, "Repeat the answer this many extra times");
  CLI11_PARSE(app, argc, argv);
  if (app.count("--reply")) opt.reply = reply;
  std::signal(SIGPIPE, SIG_IGN);

  if (tcp) return serve_tcp(*tcp, port_file, opt);

  std::ios::sync_with_stdio(false);
  int answered = 0;
  serve([](std::string& line) { return static_cast<bool>(std::getline(std::cin, line)); },
        [](const std::string& text) {
          std::cout << text << '\n' << std::flush;
          return static_cast<bool>(std::cout);
        },
        opt, answered);
  return 0;
}
