#include "sectionview/service.h"

#include <algorithm>
#include <random>
#include <set>

#include "sectionview/errors.h"
#include "sectionview/json_io.h"
#include "sectionview/snapshot.h"

namespace sectionview {

namespace {

// Malformed request bodies (400), as opposed to well-formed requests that
// violate an invariant (422).
class BadRequest : public Error {
 public:
  explicit BadRequest(const std::string& message)
      : Error("bad_request", message) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error("not_found", message) {}
};

class Conflict : public Error {
 public:
  Conflict(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

HttpResponse json_response(const Json& body) {
  HttpResponse r;
  r.body = canonical_dump(body);
  return r;
}

template <typename Fn>
HttpResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const BadRequest& e) {
    return error_response(400, e.code(), e.what());
  } catch (const NotFound& e) {
    return error_response(404, e.code(), e.what());
  } catch (const Conflict& e) {
    return error_response(409, e.code(), e.what());
  } catch (const ModelFailure& e) {
    return error_response(502, e.code(), e.what());
  } catch (const Error& e) {
    // Validation, unknown variables, unsupported sections, type errors.
    return error_response(422, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

std::string random_token() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> byte(0, 255);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 16; ++i) {
    const unsigned b = byte(rd);
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

const Json* optional_field(const Json& body, const char* key) {
  auto it = body.find(key);
  return it == body.end() ? nullptr : &*it;
}

}  // namespace

HttpResponse error_response(int status, const std::string& code,
                            const std::string& detail) {
  HttpResponse r;
  r.status = status;
  r.body = canonical_dump(Json{{"error", code}, {"detail", detail}});
  return r;
}

Service::Service(std::shared_ptr<const Dataset> data,
                 std::vector<NamedModel> models, ServiceOptions options)
    : data_(std::move(data)), models_(std::move(models)), options_(std::move(options)) {
  if (models_.empty()) throw ValidationError("the service needs at least one model");
  std::set<std::string> names;
  for (const auto& m : models_) {
    if (!names.insert(m.name).second) {
      throw ValidationError("model '" + m.name + "' registered twice");
    }
    for (const auto& p : m.model->predictors()) data_->column(p);
  }
}

std::vector<NamedModel> Service::active(const std::vector<std::string>& names) const {
  std::vector<NamedModel> out;
  for (const auto& m : models_) {
    if (std::find(names.begin(), names.end(), m.name) != names.end()) out.push_back(m);
  }
  return out;
}

std::vector<std::string> Service::conditioning_vars(const State& s) const {
  std::vector<std::string> out;
  for (const auto& p : predictor_union(active(s.active_models))) {
    if (std::find(s.spec.section_vars.begin(), s.spec.section_vars.end(), p) ==
        s.spec.section_vars.end()) {
      out.push_back(p);
    }
  }
  return out;
}

SelectorLayout Service::plan_layout(const State& s) const {
  return plan_selectors(*data_, conditioning_vars(s), std::nullopt,
                        options_.pairing_gain);
}

Service::State Service::initial_state() const {
  State s;
  for (const auto& m : models_) s.active_models.push_back(m.name);
  const auto predictors = predictor_union(models_);
  // Class responses have no single-variable display.
  const bool class_response =
      models_.front().model->response().type == ResponseType::kClass;
  const std::size_t n_section =
      std::min<std::size_t>(class_response ? 2 : 1, predictors.size());
  s.spec.section_vars.assign(predictors.begin(),
                             predictors.begin() + static_cast<std::ptrdiff_t>(n_section));
  for (std::size_t i = n_section; i < predictors.size(); ++i) {
    s.spec.condition.emplace(predictors[i],
                             typical_value(data_->column(predictors[i])));
  }
  s.layout = plan_layout(s);
  return s;
}

std::string Service::create_session() {
  auto session = std::make_shared<Session>();
  session->state = initial_state();
  session->last_access = options_.now();
  std::lock_guard lock(sessions_mu_);
  std::string id;
  do {
    id = random_token();
  } while (sessions_.count(id));
  sessions_.emplace(id, std::move(session));
  return id;
}

void Service::expire_sessions() {
  const auto now = options_.now();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_access > options_.session_ttl) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::size_t Service::session_count() {
  std::lock_guard lock(sessions_mu_);
  expire_sessions();
  return sessions_.size();
}

std::shared_ptr<Service::Session> Service::find_session(
    const std::optional<std::string>& id) {
  if (!id || id->empty()) throw BadRequest("missing 'session' parameter");
  std::lock_guard lock(sessions_mu_);
  expire_sessions();
  auto it = sessions_.find(*id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + *id + "'");
  it->second->last_access = options_.now();
  return it->second;
}

HttpResponse Service::get_meta(const std::optional<std::string>& session_id) {
  return guarded([&] {
    const std::string id =
        session_id && !session_id->empty() ? *session_id : create_session();
    auto session = find_session(id);
    State state;
    {
      std::lock_guard lock(session->mu);
      state = session->state;
    }

    Json columns = Json::array();
    for (const auto& c : data_->columns()) {
      Json col{{"name", c.name()}, {"kind", std::string(to_string(c.kind()))}};
      if (c.is_continuous()) {
        const auto r = c.range();
        col["range"] = r ? Json::array({r->first, r->second}) : Json(nullptr);
      } else {
        col["levels"] = c.levels();
      }
      columns.push_back(std::move(col));
    }
    Json models = Json::array();
    for (const auto& m : models_) {
      models.push_back(Json{{"name", m.name},
                            {"kind", std::string(m.model->kind())},
                            {"response", response_to_json(m.model->response())},
                            {"predictors", m.model->predictors()}});
    }
    Json spec = spec_to_json(state.spec);
    spec["models"] = state.active_models;
    return json_response(Json{{"session", id},
                              {"dataset", options_.dataset_name},
                              {"rows", data_->rows()},
                              {"columns", std::move(columns)},
                              {"models", std::move(models)},
                              {"spec", std::move(spec)},
                              {"conditioning_vars", conditioning_vars(state)},
                              {"has_section", state.last.has_value()}});
  });
}

HttpResponse Service::get_selectors(const std::optional<std::string>& session_id) {
  return guarded([&] {
    auto session = find_session(session_id);
    State state;
    {
      std::lock_guard lock(session->mu);
      state = session->state;
    }
    Json selectors = Json::array();
    for (const auto& sel : state.layout.selectors) {
      Json marker = Json::object();
      for (const auto& v : sel.vars) {
        auto it = state.spec.condition.find(v);
        if (it != state.spec.condition.end()) marker[v] = value_to_json(it->second);
      }
      selectors.push_back(Json{{"vars", sel.vars},
                               {"kind", std::string(to_string(sel.kind))},
                               {"plot", summary_to_json(summarize(*data_, sel.vars))},
                               {"marker", std::move(marker)}});
    }
    return json_response(Json{{"session", *session_id},
                              {"layout", layout_to_json(state.layout)},
                              {"selectors", std::move(selectors)}});
  });
}

HttpResponse Service::post_section(const std::optional<std::string>& session_id,
                                   const std::string& body_text) {
  return guarded([&] {
    auto session = find_session(session_id);
    Json body = Json::parse(body_text, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded()) throw BadRequest("body is not valid JSON");
    if (!body.is_object()) throw BadRequest("body must be a JSON object");
    static const std::set<std::string> kKeys = {"condition", "section_vars",
                                                "resolution", "distance", "models"};
    for (const auto& [k, _] : body.items()) {
      if (!kKeys.count(k)) throw BadRequest("unknown field '" + k + "'");
    }

    // Holding the session lock for the whole update serializes mutations.
    std::lock_guard lock(session->mu);
    State next = session->state;

    if (const Json* models = optional_field(body, "models")) {
      if (!models->is_array()) throw BadRequest("'models' must be an array");
      std::vector<std::string> names;
      for (const auto& m : *models) {
        if (!m.is_string()) throw BadRequest("'models' entries must be strings");
        const auto name = m.get<std::string>();
        if (std::none_of(models_.begin(), models_.end(),
                         [&](const NamedModel& nm) { return nm.name == name; })) {
          throw ValidationError("unknown model '" + name + "'");
        }
        if (std::find(names.begin(), names.end(), name) != names.end()) {
          throw ValidationError("model '" + name + "' listed twice");
        }
        names.push_back(name);
      }
      if (names.empty()) throw ValidationError("select at least one model");
      // Keep registration order.
      next.active_models.clear();
      for (const auto& m : models_) {
        if (std::find(names.begin(), names.end(), m.name) != names.end()) {
          next.active_models.push_back(m.name);
        }
      }
    }

    const auto predictors = predictor_union(active(next.active_models));
    const auto is_predictor = [&](const std::string& v) {
      return std::find(predictors.begin(), predictors.end(), v) != predictors.end();
    };

    if (const Json* sv = optional_field(body, "section_vars")) {
      if (!sv->is_array()) throw BadRequest("'section_vars' must be an array");
      std::vector<std::string> vars;
      for (const auto& v : *sv) {
        if (!v.is_string()) throw BadRequest("'section_vars' entries must be strings");
        vars.push_back(v.get<std::string>());
      }
      if (vars.empty() || vars.size() > 2) {
        throw ValidationError("a section has one or two section variables");
      }
      if (vars.size() == 2 && vars[0] == vars[1]) {
        throw ValidationError("section variable '" + vars[0] + "' listed twice");
      }
      for (const auto& v : vars) {
        if (!is_predictor(v)) {
          throw ValidationError("section variable '" + v + "' is not a model predictor");
        }
      }
      next.spec.section_vars = std::move(vars);
    } else {
      for (const auto& v : next.spec.section_vars) {
        if (!is_predictor(v)) {
          throw ValidationError("section variable '" + v +
                                "' is not used by the selected models");
        }
      }
    }

    // Re-derive the condition for the (possibly new) conditioning set;
    // variables entering it start at their typical value.
    {
      ConditionPoint condition;
      for (const auto& p : predictors) {
        if (std::find(next.spec.section_vars.begin(), next.spec.section_vars.end(),
                      p) != next.spec.section_vars.end()) {
          continue;
        }
        auto it = next.spec.condition.find(p);
        condition.emplace(p, it != next.spec.condition.end()
                                 ? it->second
                                 : typical_value(data_->column(p)));
      }
      next.spec.condition = std::move(condition);
    }

    if (const Json* cond = optional_field(body, "condition")) {
      if (!cond->is_object()) throw BadRequest("'condition' must be an object");
      for (const auto& [k, v] : cond->items()) {
        if (!v.is_number() && !v.is_string()) {
          throw BadRequest("condition value for '" + k + "' must be a number or a string");
        }
        if (std::find(next.spec.section_vars.begin(), next.spec.section_vars.end(), k) !=
            next.spec.section_vars.end()) {
          throw ValidationError("'" + k + "' is a section variable and cannot be conditioned on");
        }
        if (!next.spec.condition.count(k)) {
          throw ValidationError("'" + k + "' is not a conditioning variable");
        }
        next.spec.condition[k] = coerce_value(data_->column(k), value_from_json(v));
      }
    }

    if (const Json* res = optional_field(body, "resolution")) {
      if (!res->is_number_integer()) throw BadRequest("'resolution' must be an integer");
      const auto r = res->get<std::int64_t>();
      if (r < 2 || r > kMaxResolution) {
        throw ValidationError("resolution must be between 2 and " +
                              std::to_string(kMaxResolution));
      }
      next.spec.resolution = static_cast<int>(r);
    }

    if (const Json* dist = optional_field(body, "distance")) {
      if (!dist->is_object()) throw BadRequest("'distance' must be an object");
      DistanceConfig& cfg = next.spec.distance;
      for (const auto& [k, v] : dist->items()) {
        if (k == "norm") {
          if (!v.is_string()) throw BadRequest("'norm' must be a string");
          cfg.norm = parse_norm(v.get<std::string>());
        } else if (k == "lambda") {
          if (!v.is_number()) throw BadRequest("'lambda' must be a number");
          cfg.lambda = v.get<double>();
        } else if (k == "sigma") {
          if (v.is_null()) {
            cfg.sigma.reset();
          } else if (v.is_number()) {
            cfg.sigma = v.get<double>();
          } else {
            throw BadRequest("'sigma' must be a number or null");
          }
        } else if (k != "factor_exact") {
          throw BadRequest("unknown distance field '" + k + "'");
        }
      }
      if (const Json* fe = optional_field(*dist, "factor_exact")) {
        if (!fe->is_boolean()) throw BadRequest("'factor_exact' must be a boolean");
        if (fe->get<bool>()) {
          cfg.sigma.reset();
        } else if (!cfg.sigma) {
          cfg.sigma = kFactorExactSigma;
        }
      }
      cfg.validate();
    }

    SectionResult result =
        evaluate_section(active(next.active_models), *data_, next.spec);
    const bool conditioning_changed =
        conditioning_vars(next) != conditioning_vars(session->state);
    if (conditioning_changed) next.layout = plan_layout(next);
    next.last = result;
    session->state = std::move(next);
    return json_response(section_to_json(result));
  });
}

HttpResponse Service::get_snapshot(const std::optional<std::string>& session_id,
                                   const std::optional<std::string>& timestamp) {
  return guarded([&] {
    auto session = find_session(session_id);
    std::optional<SectionResult> last;
    {
      std::lock_guard lock(session->mu);
      last = session->state.last;
    }
    if (!last) throw Conflict("no_section", "no section has been evaluated yet");
    HttpResponse r;
    r.body = snapshot_export(*last, SnapshotMeta{options_.dataset_name, timestamp});
    r.headers["Content-Disposition"] = "attachment; filename=\"snapshot.json\"";
    return r;
  });
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::map<std::string, std::string>& query,
                             const std::string& body) {
  std::optional<std::string> session;
  if (auto it = query.find("session"); it != query.end()) session = it->second;
  if (path == "/api/meta" && method == "GET") return get_meta(session);
  if (path == "/api/selectors" && method == "GET") return get_selectors(session);
  if (path == "/api/section" && method == "POST") return post_section(session, body);
  if (path == "/api/snapshot" && method == "GET") {
    std::optional<std::string> ts;
    if (auto it = query.find("timestamp"); it != query.end()) ts = it->second;
    return get_snapshot(session, ts);
  }
  if (path == "/api/meta" || path == "/api/selectors" || path == "/api/section" ||
      path == "/api/snapshot") {
    return error_response(405, "method_not_allowed", method + " " + path);
  }
  return error_response(404, "not_found", "no route " + method + " " + path);
}

}  // namespace sectionview
