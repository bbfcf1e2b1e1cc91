#include "httplib.h"
#include "prefsel/service/service.hpp"

namespace prefsel::service {

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;

  explicit Impl(SessionService& s) : service(s) {
    const auto forward = [this](const char* method) {
      return [this, method](const httplib::Request& req, httplib::Response& res) {
        const auto r = service.handle(method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
      };
    };
    server.Get(".*", forward("GET"));
    server.Post(".*", forward("POST"));
    server.Put(".*", forward("PUT"));
    server.Delete(".*", forward("DELETE"));
  }
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace prefsel::service
