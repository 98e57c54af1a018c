#ifndef SECTIONVIEW_HTTP_SERVER_H_
#define SECTIONVIEW_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "sectionview/service.h"

namespace sectionview {

struct HttpServerOptions {
  std::string host = "127.0.0.1";
  // 0 picks a free port.
  int port = 8080;
  // Directory served at /; a built-in placeholder page is used when empty
  // or missing.
  std::string assets_dir;
};

// HTTP front end routing /api/* to a Service.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<Service> service, HttpServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket and returns the bound port. Throws Error on failure.
  int bind();
  // Blocks until stop() is called. Calls bind() first if needed.
  void listen();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<Service> service_;
  HttpServerOptions options_;
  int port_ = -1;
};

}  // namespace sectionview

#endif  // SECTIONVIEW_HTTP_SERVER_H_
