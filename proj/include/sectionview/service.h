#ifndef SECTIONVIEW_SERVICE_H_
#define SECTIONVIEW_SERVICE_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sectionview/dataset.h"
#include "sectionview/layout.h"
#include "sectionview/models.h"
#include "sectionview/section.h"

namespace sectionview {

struct ServiceOptions {
  std::string dataset_name = "data";
  std::chrono::seconds session_ttl{3600};
  double pairing_gain = kDefaultPairingGain;
  // Clock used for session expiry.
  std::function<std::chrono::steady_clock::time_point()> now =
      [] { return std::chrono::steady_clock::now(); };
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

// Session-based front end of the engine. Every route returns a JSON body;
// errors are {"error": code, "detail": message}. Sessions are identified
// by the `session` query parameter; GET /api/meta without one opens a new
// session. The dataset and models are shared read-only across sessions.
class Service {
 public:
  // Throws ValidationError when `models` is empty or names repeat.
  Service(std::shared_ptr<const Dataset> data, std::vector<NamedModel> models,
          ServiceOptions options = {});

  HttpResponse get_meta(const std::optional<std::string>& session);
  HttpResponse get_selectors(const std::optional<std::string>& session);
  HttpResponse post_section(const std::optional<std::string>& session,
                            const std::string& body);
  HttpResponse get_snapshot(const std::optional<std::string>& session,
                            const std::optional<std::string>& timestamp = std::nullopt);

  // Dispatches /api/* routes; unknown routes give 404.
  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::map<std::string, std::string>& query,
                      const std::string& body);

  std::string create_session();
  std::size_t session_count();

  const Dataset& dataset() const { return *data_; }
  const std::vector<NamedModel>& models() const { return models_; }

 private:
  struct State {
    std::vector<std::string> active_models;
    SectionSpec spec;
    SelectorLayout layout;
    std::optional<SectionResult> last;
  };
  struct Session {
    std::mutex mu;
    State state;
    std::chrono::steady_clock::time_point last_access;
  };

  std::shared_ptr<Session> find_session(const std::optional<std::string>& id);
  void expire_sessions();
  State initial_state() const;
  std::vector<NamedModel> active(const std::vector<std::string>& names) const;
  std::vector<std::string> conditioning_vars(const State& s) const;
  SelectorLayout plan_layout(const State& s) const;

  std::shared_ptr<const Dataset> data_;
  std::vector<NamedModel> models_;
  ServiceOptions options_;

  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

HttpResponse error_response(int status, const std::string& code,
                            const std::string& detail);

}  // namespace sectionview

#endif  // SECTIONVIEW_SERVICE_H_
