#include "sectionview/json_io.h"

#include <cmath>
#include <cstdio>

#include "sectionview/errors.h"

namespace sectionview {

namespace {

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null:
    case Json::value_t::discarded:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    case Json::value_t::string:
      out += j.dump(-1, ' ', false, Json::error_handler_t::replace);
      return;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        dump_into(e, out);
        first = false;
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        out += Json(k).dump(-1, ' ', false, Json::error_handler_t::replace);
        out += ':';
        dump_into(v, out);
        first = false;
      }
      out += '}';
      return;
    }
    case Json::value_t::binary:
      break;
  }
  throw ValidationError("cannot serialize binary JSON values");
}

[[noreturn]] void malformed(const std::string& what) {
  throw ValidationError("malformed document: " + what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing '") + key + "'");
  return *it;
}

double number_of(const Json& j, const char* what) {
  if (!j.is_number()) malformed(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t count_of(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    malformed(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::string string_of(const Json& j, const char* what) {
  if (!j.is_string()) malformed(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> strings_of(const Json& j, const char* what) {
  if (!j.is_array()) malformed(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(string_of(e, what));
  return out;
}

Json optional_value_to_json(const std::optional<Value>& v) {
  return v ? value_to_json(*v) : Json(nullptr);
}

std::optional<Value> optional_value_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return value_from_json(j);
}

Json counts_to_json(const std::vector<std::size_t>& counts) {
  Json a = Json::array();
  for (auto c : counts) a.push_back(c);
  return a;
}

}  // namespace

std::string canonical_dump(const Json& doc) {
  std::string out;
  dump_into(doc, out);
  return out;
}

Json value_to_json(const Value& v) {
  if (const auto* x = std::get_if<double>(&v)) return *x;
  return std::get<std::string>(v);
}

Value value_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ValidationError("expected a number or a level label");
}

Json distance_to_json(const DistanceConfig& cfg) {
  return Json{{"norm", std::string(to_string(cfg.norm))},
              {"lambda", cfg.lambda},
              {"sigma", cfg.sigma ? Json(*cfg.sigma) : Json(nullptr)},
              {"factor_exact", cfg.factor_exact()}};
}

DistanceConfig distance_from_json(const Json& j) {
  DistanceConfig cfg;
  cfg.norm = parse_norm(string_of(field(j, "norm"), "norm"));
  cfg.lambda = number_of(field(j, "lambda"), "lambda");
  const Json& sigma = field(j, "sigma");
  if (sigma.is_null()) {
    cfg.sigma.reset();
  } else {
    cfg.sigma = number_of(sigma, "sigma");
  }
  return cfg;
}

Json spec_to_json(const SectionSpec& spec) {
  Json condition = Json::object();
  for (const auto& [k, v] : spec.condition) condition[k] = value_to_json(v);
  return Json{{"section_vars", spec.section_vars},
              {"resolution", spec.resolution},
              {"condition", std::move(condition)},
              {"distance", distance_to_json(spec.distance)}};
}

SectionSpec spec_from_json(const Json& j) {
  SectionSpec spec;
  spec.section_vars = strings_of(field(j, "section_vars"), "section_vars");
  spec.resolution = static_cast<int>(count_of(field(j, "resolution"), "resolution"));
  const Json& condition = field(j, "condition");
  if (!condition.is_object()) malformed("condition must be an object");
  for (const auto& [k, v] : condition.items()) {
    spec.condition.emplace(k, value_from_json(v));
  }
  spec.distance = distance_from_json(field(j, "distance"));
  return spec;
}

Json response_to_json(const ResponseInfo& r) {
  return Json{{"name", r.name},
              {"type", r.type == ResponseType::kNumeric ? "numeric" : "class"},
              {"levels", r.levels}};
}

ResponseInfo response_from_json(const Json& j) {
  ResponseInfo r;
  r.name = string_of(field(j, "name"), "response name");
  const auto type = string_of(field(j, "type"), "response type");
  if (type == "numeric") {
    r.type = ResponseType::kNumeric;
  } else if (type == "class") {
    r.type = ResponseType::kClass;
  } else {
    malformed("unknown response type '" + type + "'");
  }
  r.levels = strings_of(field(j, "levels"), "response levels");
  return r;
}

Json prediction_to_json(const Prediction& p) {
  if (std::holds_alternative<double>(p.value) && !p.probabilities) {
    return std::get<double>(p.value);
  }
  Json probs = nullptr;
  if (p.probabilities) {
    probs = Json::object();
    for (const auto& [level, prob] : *p.probabilities) probs[level] = prob;
  }
  return Json{{"value", value_to_json(p.value)}, {"probabilities", probs}};
}

Prediction prediction_from_json(const Json& j) {
  if (j.is_number()) return Prediction{j.get<double>(), std::nullopt};
  Prediction p{value_from_json(field(j, "value")), std::nullopt};
  const Json& probs = field(j, "probabilities");
  if (!probs.is_null()) {
    if (!probs.is_object()) malformed("probabilities must be an object");
    ClassProbabilities map;
    for (const auto& [k, v] : probs.items()) map.emplace(k, number_of(v, "probability"));
    p.probabilities = std::move(map);
  }
  return p;
}

Json grid_to_json(const Grid& g) {
  Json axes = Json::array();
  for (const auto& axis : g.axes) {
    Json a = Json::array();
    for (const auto& v : axis) a.push_back(value_to_json(v));
    axes.push_back(std::move(a));
  }
  Json points = Json::array();
  for (const auto& pt : g.points) {
    Json a = Json::array();
    for (const auto& v : pt) a.push_back(value_to_json(v));
    points.push_back(std::move(a));
  }
  return Json{{"vars", g.vars},
              {"axes", std::move(axes)},
              {"points", std::move(points)},
              {"degenerate", g.degenerate}};
}

Grid grid_from_json(const Json& j) {
  Grid g;
  g.vars = strings_of(field(j, "vars"), "grid vars");
  const auto read_lists = [](const Json& lists, const char* what) {
    if (!lists.is_array()) malformed(std::string(what) + " must be an array");
    std::vector<std::vector<Value>> out;
    for (const auto& l : lists) {
      if (!l.is_array()) malformed(std::string(what) + " entries must be arrays");
      std::vector<Value> values;
      for (const auto& v : l) values.push_back(value_from_json(v));
      out.push_back(std::move(values));
    }
    return out;
  };
  g.axes = read_lists(field(j, "axes"), "grid axes");
  g.points = read_lists(field(j, "points"), "grid points");
  g.degenerate = strings_of(field(j, "degenerate"), "grid degenerate");
  return g;
}

Json nearby_to_json(const std::vector<NearbyObservation>& nearby) {
  Json out = Json::array();
  for (const auto& n : nearby) {
    Json values = Json::array();
    for (const auto& v : n.section_values) values.push_back(optional_value_to_json(v));
    out.push_back(Json{{"row", n.row},
                       {"section_values", std::move(values)},
                       {"response", optional_value_to_json(n.response)},
                       {"distance", n.distance},
                       {"band", std::string(to_string(n.band))}});
  }
  return out;
}

std::vector<NearbyObservation> nearby_from_json(const Json& j) {
  if (!j.is_array()) malformed("nearby must be an array");
  std::vector<NearbyObservation> out;
  for (const auto& e : j) {
    NearbyObservation n;
    n.row = count_of(field(e, "row"), "row");
    const Json& values = field(e, "section_values");
    if (!values.is_array()) malformed("section_values must be an array");
    for (const auto& v : values) n.section_values.push_back(optional_value_from_json(v));
    n.response = optional_value_from_json(field(e, "response"));
    n.distance = number_of(field(e, "distance"), "distance");
    n.band = parse_band(string_of(field(e, "band"), "band"));
    out.push_back(std::move(n));
  }
  return out;
}

Json summary_to_json(const SummaryPlotData& s) {
  struct Visitor {
    Json operator()(const Histogram& h) const {
      return Json{{"type", "histogram"},
                  {"var", h.var},
                  {"edges", h.edges},
                  {"counts", counts_to_json(h.counts)}};
    }
    Json operator()(const BarCounts& b) const {
      return Json{{"type", "barplot"},
                  {"var", b.var},
                  {"levels", b.levels},
                  {"counts", counts_to_json(b.counts)}};
    }
    Json operator()(const Hist2D& h) const {
      Json counts = Json::array();
      for (const auto& row : h.counts) counts.push_back(counts_to_json(row));
      return Json{{"type", "hist2d"},     {"x_var", h.x_var},
                  {"y_var", h.y_var},     {"x_edges", h.x_edges},
                  {"y_edges", h.y_edges}, {"counts", std::move(counts)}};
    }
    Json operator()(const ScatterData& sc) const {
      Json pts = Json::array();
      for (const auto& [x, y] : sc.points) pts.push_back(Json::array({x, y}));
      return Json{{"type", "scatter"},
                  {"x_var", sc.x_var},
                  {"y_var", sc.y_var},
                  {"points", std::move(pts)}};
    }
    Json operator()(const BoxplotStats& b) const {
      Json boxes = Json::array();
      for (const auto& box : b.boxes) {
        if (!box) {
          boxes.push_back(nullptr);
          continue;
        }
        boxes.push_back(Json{{"min", box->min},
                             {"lower_quartile", box->lower_quartile},
                             {"median", box->median},
                             {"upper_quartile", box->upper_quartile},
                             {"max", box->max}});
      }
      return Json{{"type", "boxplot"},
                  {"value_var", b.value_var},
                  {"group_var", b.group_var},
                  {"levels", b.levels},
                  {"counts", counts_to_json(b.counts)},
                  {"boxes", std::move(boxes)}};
    }
    Json operator()(const SpineData& sp) const {
      Json counts = Json::array();
      for (const auto& row : sp.counts) counts.push_back(counts_to_json(row));
      return Json{{"type", "spineplot"},       {"x_var", sp.x_var},
                  {"y_var", sp.y_var},         {"x_levels", sp.x_levels},
                  {"y_levels", sp.y_levels},   {"counts", std::move(counts)}};
    }
  };
  return std::visit(Visitor{}, s);
}

Json layout_to_json(const SelectorLayout& layout) {
  Json selectors = Json::array();
  for (const auto& s : layout.selectors) {
    selectors.push_back(Json{{"vars", s.vars}, {"kind", std::string(to_string(s.kind))}});
  }
  Json scores = Json::array();
  for (const auto& p : layout.pair_scores) {
    scores.push_back(Json{{"vars", {p.a, p.b}}, {"ratio", p.ratio}, {"gain", p.gain}});
  }
  return Json{{"selectors", std::move(selectors)}, {"pair_scores", std::move(scores)}};
}

Json section_to_json(const SectionResult& r) {
  Json spec = spec_to_json(r.spec);
  spec["models"] = r.models;
  Json predictions = Json::object();
  for (const auto& [name, preds] : r.predictions) {
    Json a = Json::array();
    for (const auto& p : preds) a.push_back(prediction_to_json(p));
    predictions[name] = std::move(a);
  }
  return Json{{"version", 1},
              {"spec", std::move(spec)},
              {"grid", grid_to_json(r.grid)},
              {"predictions", std::move(predictions)},
              {"nearby", nearby_to_json(r.nearby)},
              {"meta",
               {{"response", response_to_json(r.response)},
                {"display_kind", std::string(to_string(r.display_kind))},
                {"excluded_missing", r.excluded_missing}}}};
}

SectionResult section_from_json(const Json& doc) {
  try {
    const Json& version = field(doc, "version");
    if (!version.is_number_integer() || version.get<std::int64_t>() != 1) {
      malformed("unsupported version");
    }
    SectionResult r;
    const Json& spec = field(doc, "spec");
    r.spec = spec_from_json(spec);
    r.models = strings_of(field(spec, "models"), "models");
    r.grid = grid_from_json(field(doc, "grid"));
    const Json& predictions = field(doc, "predictions");
    if (!predictions.is_object()) malformed("predictions must be an object");
    for (const auto& [name, list] : predictions.items()) {
      if (!list.is_array()) malformed("predictions for '" + name + "' must be an array");
      std::vector<Prediction> preds;
      for (const auto& p : list) preds.push_back(prediction_from_json(p));
      r.predictions.emplace(name, std::move(preds));
    }
    r.nearby = nearby_from_json(field(doc, "nearby"));
    const Json& meta = field(doc, "meta");
    r.response = response_from_json(field(meta, "response"));
    r.display_kind =
        parse_display_kind(string_of(field(meta, "display_kind"), "display_kind"));
    r.excluded_missing = count_of(field(meta, "excluded_missing"), "excluded_missing");
    return r;
  } catch (const Json::exception& e) {
    malformed(e.what());
  }
}

}  // namespace sectionview
