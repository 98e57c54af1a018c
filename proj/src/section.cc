#include "sectionview/section.h"

#include <algorithm>
#include <future>
#include <set>

#include "sectionview/errors.h"

namespace sectionview {

Grid make_grid(const Dataset& d, const std::vector<std::string>& section_vars,
               int resolution) {
  if (section_vars.empty() || section_vars.size() > 2) {
    throw ValidationError("a section has one or two section variables");
  }
  if (section_vars.size() == 2 && section_vars[0] == section_vars[1]) {
    throw ValidationError("section variable '" + section_vars[0] +
                          "' listed twice");
  }
  Grid g;
  g.vars = section_vars;
  for (const auto& name : section_vars) {
    const Column& c = d.column(name);
    std::vector<Value> axis;
    if (c.is_categorical()) {
      if (c.levels().empty()) {
        throw ValidationError("section variable '" + name + "' has no levels");
      }
      axis.assign(c.levels().begin(), c.levels().end());
    } else {
      if (resolution < 2 || resolution > kMaxResolution) {
        throw ValidationError("resolution must be between 2 and " +
                              std::to_string(kMaxResolution));
      }
      const auto r = c.range();
      if (!r) {
        throw ValidationError("section variable '" + name +
                              "' has no observations");
      }
      const auto [lo, hi] = *r;
      if (lo == hi) {
        axis.emplace_back(lo);
        g.degenerate.push_back(name);
      } else {
        for (int i = 0; i < resolution; ++i) {
          const double t = static_cast<double>(i) / (resolution - 1);
          axis.emplace_back(i == resolution - 1 ? hi : lo + (hi - lo) * t);
        }
      }
    }
    g.axes.push_back(std::move(axis));
  }

  if (g.axes.size() == 1) {
    for (const auto& v : g.axes[0]) g.points.push_back({v});
  } else {
    for (const auto& b : g.axes[1]) {
      for (const auto& a : g.axes[0]) g.points.push_back({a, b});
    }
  }
  return g;
}

std::string_view to_string(DisplayKind kind) {
  switch (kind) {
    case DisplayKind::kCont1Cont:
      return "cont-1cont";
    case DisplayKind::kCont1Cat:
      return "cont-1cat";
    case DisplayKind::kCont2Cont:
      return "cont-2cont";
    case DisplayKind::kCont2Cat:
      return "cont-2cat";
    case DisplayKind::kCont1Cont1Cat:
      return "cont-1cont1cat";
    case DisplayKind::kCat2Cont:
      return "cat-2cont";
    case DisplayKind::kCat2Cat:
      return "cat-2cat";
    case DisplayKind::kCat1Cont1Cat:
      break;
  }
  return "cat-1cont1cat";
}

DisplayKind parse_display_kind(std::string_view text) {
  for (auto k : {DisplayKind::kCont1Cont, DisplayKind::kCont1Cat,
                 DisplayKind::kCont2Cont, DisplayKind::kCont2Cat,
                 DisplayKind::kCont1Cont1Cat, DisplayKind::kCat2Cont,
                 DisplayKind::kCat2Cat, DisplayKind::kCat1Cont1Cat}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown display kind '" + std::string(text) + "'");
}

DisplayKind display_kind(ResponseType response,
                         const std::vector<ColumnKind>& section_kinds) {
  const auto continuous = static_cast<std::size_t>(
      std::count(section_kinds.begin(), section_kinds.end(),
                 ColumnKind::kContinuous));
  const bool numeric = response == ResponseType::kNumeric;
  if (section_kinds.size() == 1) {
    if (!numeric) {
      throw UnsupportedSection(
          "a class response needs two section variables");
    }
    return continuous == 1 ? DisplayKind::kCont1Cont : DisplayKind::kCont1Cat;
  }
  if (section_kinds.size() != 2) {
    throw ValidationError("a section has one or two section variables");
  }
  switch (continuous) {
    case 2:
      return numeric ? DisplayKind::kCont2Cont : DisplayKind::kCat2Cont;
    case 0:
      return numeric ? DisplayKind::kCont2Cat : DisplayKind::kCat2Cat;
    default:
      return numeric ? DisplayKind::kCont1Cont1Cat : DisplayKind::kCat1Cont1Cat;
  }
}

std::vector<std::string> predictor_union(const std::vector<NamedModel>& models) {
  std::vector<std::string> out;
  for (const auto& m : models) {
    for (const auto& p : m.model->predictors()) {
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
  }
  return out;
}

namespace {

void check_partition(const std::vector<NamedModel>& models, const Dataset& d,
                     const SectionSpec& spec) {
  const auto predictors = predictor_union(models);
  const std::set<std::string> all(predictors.begin(), predictors.end());
  for (const auto& p : predictors) d.column(p);
  for (const auto& v : spec.section_vars) {
    if (!all.count(v)) {
      throw ValidationError("section variable '" + v +
                            "' is not a model predictor");
    }
    if (spec.condition.count(v)) {
      throw ValidationError("section variable '" + v +
                            "' also appears in the condition");
    }
  }
  std::string missing;
  for (const auto& p : predictors) {
    const bool is_section = std::find(spec.section_vars.begin(),
                                      spec.section_vars.end(),
                                      p) != spec.section_vars.end();
    if (!is_section && !spec.condition.count(p)) {
      missing += (missing.empty() ? "" : ", ") + p;
    }
  }
  if (!missing.empty()) {
    throw ValidationError("condition is missing " + missing);
  }
  for (const auto& [name, _] : spec.condition) {
    if (!all.count(name)) {
      throw ValidationError("'" + name + "' is not a model predictor");
    }
  }
}

ResponseInfo common_response(const std::vector<NamedModel>& models) {
  ResponseInfo r = models.front().model->response();
  for (const auto& m : models) {
    if (m.model->response().type != r.type) {
      throw ValidationError("models '" + models.front().name + "' and '" +
                            m.name + "' disagree on the response type");
    }
  }
  return r;
}

}  // namespace

SectionResult evaluate_section(const std::vector<NamedModel>& models,
                               const Dataset& d, const SectionSpec& spec) {
  if (models.empty()) throw ValidationError("no models to evaluate");
  {
    std::set<std::string> names;
    for (const auto& m : models) {
      if (!names.insert(m.name).second) {
        throw ValidationError("model '" + m.name + "' registered twice");
      }
    }
  }
  spec.distance.validate();
  check_partition(models, d, spec);

  SectionResult result;
  result.spec = spec;
  result.response = common_response(models);
  std::vector<ColumnKind> kinds;
  for (const auto& v : spec.section_vars) kinds.push_back(d.column(v).kind());
  result.display_kind = display_kind(result.response.type, kinds);
  result.grid = make_grid(d, spec.section_vars, spec.resolution);

  std::vector<std::string> conditioning;
  for (const auto& [name, _] : spec.condition) conditioning.push_back(name);
  // Validates condition values before any model runs.
  const auto stats = standardization_stats(d);
  const auto nearby =
      nearby_points(d, conditioning, spec.condition, stats, spec.distance);

  std::vector<Row> rows;
  rows.reserve(result.grid.points.size());
  for (const auto& point : result.grid.points) {
    Row row = spec.condition;
    for (std::size_t j = 0; j < spec.section_vars.size(); ++j) {
      row.insert_or_assign(spec.section_vars[j], point[j]);
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::future<std::vector<Prediction>>> pending;
  pending.reserve(models.size());
  for (const auto& m : models) {
    result.models.push_back(m.name);
    const auto launch =
        models.size() > 1 ? std::launch::async : std::launch::deferred;
    pending.push_back(std::async(launch, [&rows, model = m.model] {
      return model->predict(rows);
    }));
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::vector<Prediction> preds;
    try {
      preds = pending[i].get();
    } catch (const std::exception& e) {
      // Remaining futures are joined by their destructors.
      throw ModelFailure(models[i].name,
                         models[i].model->kind() == std::string_view("ext"),
                         e.what());
    }
    if (preds.size() != rows.size()) {
      throw ModelFailure(models[i].name, false,
                         "returned " + std::to_string(preds.size()) +
                             " predictions for " + std::to_string(rows.size()) +
                             " rows");
    }
    result.predictions.emplace(models[i].name, std::move(preds));
  }

  const Column* response_column = nullptr;
  if (!result.response.name.empty() && d.has(result.response.name)) {
    response_column = &d.column(result.response.name);
  }
  result.excluded_missing = nearby.excluded_missing;
  for (const auto& p : nearby.points) {
    NearbyObservation obs;
    obs.row = p.row;
    obs.distance = p.distance;
    obs.band = p.band;
    for (const auto& v : spec.section_vars) {
      obs.section_values.push_back(d.column(v).value(p.row));
    }
    if (response_column) obs.response = response_column->value(p.row);
    result.nearby.push_back(std::move(obs));
  }
  return result;
}

}  // namespace sectionview
