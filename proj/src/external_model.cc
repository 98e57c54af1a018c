#include <httplib.h>
#include <json.hpp>

#include <cmath>

#include "sectionview/errors.h"
#include "sectionview/models.h"

namespace sectionview {

using nlohmann::json;

namespace {

constexpr double kProbabilitySumTolerance = 1e-6;

}  // namespace

ExternalModel::ExternalModel(std::string endpoint,
                             std::vector<std::string> predictors,
                             ResponseInfo response,
                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      predictors_(std::move(predictors)),
      response_(std::move(response)),
      timeout_(timeout) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint_.rfind(kScheme, 0) != 0) {
    throw ValidationError("external model endpoint '" + endpoint_ +
                          "' must be an http:// URL");
  }
  const auto slash = endpoint_.find('/', kScheme.size());
  origin_ = endpoint_.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
  if (origin_.size() == kScheme.size()) {
    throw ValidationError("external model endpoint '" + endpoint_ +
                          "' has no host");
  }
  if (predictors_.empty()) {
    throw ValidationError("external model needs at least one predictor");
  }
}

std::string render_predict_request(std::span<const Row> rows,
                                   const std::vector<std::string>& predictors) {
  json body = json::object();
  json& out = body["rows"] = json::array();
  for (const auto& row : rows) {
    json r = json::object();
    for (const auto& p : predictors) {
      auto it = row.find(p);
      if (it == row.end()) {
        throw ValidationError("row does not assign predictor '" + p + "'");
      }
      if (const auto* x = std::get_if<double>(&it->second)) {
        r[p] = *x;
      } else {
        r[p] = std::get<std::string>(it->second);
      }
    }
    out.push_back(std::move(r));
  }
  return body.dump();
}

std::vector<Prediction> parse_predict_response(const std::string& body,
                                               std::size_t expected_rows,
                                               const ResponseInfo& response,
                                               const std::string& endpoint,
                                               int status) {
  const auto fail = [&](const std::string& what) {
    return ExternalModelError(endpoint, status, "malformed response: " + what);
  };
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw fail("body is not JSON");
  if (!doc.is_object()) throw fail("body is not an object");
  auto preds = doc.find("predictions");
  if (preds == doc.end() || !preds->is_array()) {
    throw fail("missing 'predictions' array");
  }
  if (preds->size() != expected_rows) {
    throw fail("expected " + std::to_string(expected_rows) +
               " predictions, got " + std::to_string(preds->size()));
  }

  const bool is_class = response.type == ResponseType::kClass;
  const auto known_level = [&](const std::string& label) {
    return response.levels.empty() ||
           std::find(response.levels.begin(), response.levels.end(), label) !=
               response.levels.end();
  };

  std::vector<Prediction> out;
  out.reserve(expected_rows);
  for (std::size_t i = 0; i < preds->size(); ++i) {
    const json& p = (*preds)[i];
    if (is_class) {
      if (!p.is_string()) throw fail("prediction " + std::to_string(i) + " is not a class label");
      auto label = p.get<std::string>();
      if (!known_level(label)) throw fail("unknown class '" + label + "'");
      out.push_back(Prediction{std::move(label), std::nullopt});
    } else {
      if (!p.is_number()) throw fail("prediction " + std::to_string(i) + " is not a number");
      const double v = p.get<double>();
      if (!std::isfinite(v)) throw fail("prediction " + std::to_string(i) + " is not finite");
      out.push_back(Prediction{v, std::nullopt});
    }
  }

  auto probs = doc.find("probabilities");
  if (probs != doc.end() && !probs->is_null()) {
    if (!probs->is_array() || probs->size() != expected_rows) {
      throw fail("'probabilities' must be an array with one entry per row");
    }
    for (std::size_t i = 0; i < expected_rows; ++i) {
      const json& entry = (*probs)[i];
      if (!entry.is_object()) throw fail("probabilities " + std::to_string(i) + " is not an object");
      ClassProbabilities map;
      double sum = 0;
      for (const auto& [label, value] : entry.items()) {
        if (!value.is_number()) throw fail("probability for '" + label + "' is not a number");
        const double v = value.get<double>();
        if (!(v >= 0 && v <= 1)) throw fail("probability for '" + label + "' outside [0, 1]");
        if (!known_level(label)) throw fail("probability for unknown class '" + label + "'");
        map.emplace(label, v);
        sum += v;
      }
      if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
        throw fail("probabilities " + std::to_string(i) + " sum to " +
                   std::to_string(sum));
      }
      out[i].probabilities = std::move(map);
    }
  }
  return out;
}

std::vector<Prediction> ExternalModel::predict(std::span<const Row> rows) const {
  const std::string request = render_predict_request(rows, predictors_);

  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(path_, request, "application/json");
  if (!res) {
    throw ExternalModelError(endpoint_, 0,
                             "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string excerpt = res->body.substr(0, 200);
    throw ExternalModelError(endpoint_, res->status,
                             "non-success status; body: " + excerpt);
  }
  return parse_predict_response(res->body, rows.size(), response_, endpoint_,
                                res->status);
}

}  // namespace sectionview
