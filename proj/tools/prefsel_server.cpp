#include <csignal>
#include <cstdio>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "prefsel/error.hpp"
#include "prefsel/service/service.hpp"

namespace {

prefsel::service::HttpServer* active = nullptr;

void on_signal(int) {
  if (active) active->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prefsel session server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot;
  long max_nodes = 0;
  app.add_option("--host", host, "address to bind");
  app.add_option("--port", port, "port to bind, 0 for any free port");
  app.add_option("--snapshot", snapshot, "JSON file sessions are restored from and saved to");
  app.add_option("--max-nodes", max_nodes, "branch-and-bound node budget per solve");
  CLI11_PARSE(app, argc, argv);

  try {
    prefsel::service::ServiceOptions options;
    if (!snapshot.empty()) options.snapshot = snapshot;
    if (max_nodes > 0) options.solver.max_nodes = max_nodes;
    prefsel::service::SessionService service(options);
    prefsel::service::HttpServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) {
      fmt::print(stderr, "cannot bind {}:{}\n", host, port);
      return 3;
    }
    fmt::print("listening on http://{}:{}\n", host, bound);
    std::fflush(stdout);
    active = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    active = nullptr;
  } catch (const prefsel::InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
