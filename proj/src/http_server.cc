#include "sectionview/http_server.h"

#include <httplib.h>

#include <filesystem>

#include "sectionview/errors.h"

namespace sectionview {

namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>sectionview"
    "</title></head>\n<body><h1>sectionview</h1><p>The explorer UI is not "
    "installed. The JSON API is available under <code>/api/</code>.</p>"
    "</body></html>\n";

}  // namespace

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<Service> service, HttpServerOptions options)
    : impl_(std::make_unique<Impl>()),
      service_(std::move(service)),
      options_(std::move(options)) {
  auto& srv = impl_->server;
  auto api = [svc = service_](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const HttpResponse r = svc->handle(req.method, req.path, query, req.body);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  srv.Get(R"(/api/.*)", api);
  srv.Post(R"(/api/.*)", api);
  srv.Put(R"(/api/.*)", api);
  srv.Delete(R"(/api/.*)", api);

  std::error_code ec;
  const bool have_assets = !options_.assets_dir.empty() &&
                           std::filesystem::is_directory(options_.assets_dir, ec) &&
                           std::filesystem::exists(
                               std::filesystem::path(options_.assets_dir) / "index.html", ec);
  if (have_assets) {
    srv.set_mount_point("/", options_.assets_dir);
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html");
    });
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (port_ >= 0) return port_;
  auto& srv = impl_->server;
  if (options_.port == 0) {
    port_ = srv.bind_to_any_port(options_.host);
  } else {
    port_ = srv.bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) {
    throw Error("bind_error", "cannot bind " + options_.host + ":" +
                                  std::to_string(options_.port));
  }
  return port_;
}

void HttpServer::listen() {
  bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace sectionview
