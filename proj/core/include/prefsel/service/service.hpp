#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "prefsel/milp/problem.hpp"

namespace prefsel::service {

struct ServiceOptions {
  /// Sessions are loaded from here on start and written back on shutdown.
  std::optional<std::filesystem::path> snapshot;
  milp::SolverOptions solver;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// In-memory decision sessions behind a JSON request/response interface.
///
///   POST   /sessions
///   GET    /sessions/{id}
///   PUT    /sessions/{id}/table              body: CSV
///   PUT    /sessions/{id}/statements         body: one statement per line
///   POST   /sessions/{id}/statements         body: one statement
///   DELETE /sessions/{id}/statements/{k}
///   POST   /sessions/{id}/solve              body: {"mode", "params", "wait"}
///   GET    /sessions/{id}/solve/{job}/status
///   GET    /sessions/{id}/report/{job}
///
/// Each session runs its solves one at a time on its own worker thread.
/// Errors are {"error": {"code", "message"}} with 404, 409 or 422.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

  void save_snapshot(const std::filesystem::path& path) const;
  void load_snapshot(const std::filesystem::path& path);
  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP front end for a SessionService.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port`, or to a free port when it is 0. Returns the port, or
  /// -1 on failure.
  int bind(const std::string& host, int port = 0);
  /// Serves until stop() is called.
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prefsel::service
