#include "sectionview/distance.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "sectionview/errors.h"

namespace sectionview {

std::string_view to_string(Norm norm) {
  return norm == Norm::kEuclidean ? "euclidean" : "maxnorm";
}

Norm parse_norm(std::string_view text) {
  if (text == "euclidean") return Norm::kEuclidean;
  if (text == "maxnorm") return Norm::kMaxNorm;
  throw ValidationError("unknown norm '" + std::string(text) +
                        "' (expected euclidean or maxnorm)");
}

void DistanceConfig::validate() const {
  if (!std::isfinite(lambda) || lambda < 0) {
    throw ValidationError("lambda must be finite and non-negative");
  }
  if (sigma && (!std::isfinite(*sigma) || *sigma < 0)) {
    throw ValidationError("sigma must be finite and non-negative");
  }
}

std::string_view to_string(VisibilityBand band) {
  switch (band) {
    case VisibilityBand::kNear:
      return "near";
    case VisibilityBand::kMid:
      return "mid";
    case VisibilityBand::kFar:
      return "far";
    case VisibilityBand::kHidden:
      break;
  }
  return "hidden";
}

VisibilityBand parse_band(std::string_view text) {
  if (text == "near") return VisibilityBand::kNear;
  if (text == "mid") return VisibilityBand::kMid;
  if (text == "far") return VisibilityBand::kFar;
  if (text == "hidden") return VisibilityBand::kHidden;
  throw ValidationError("unknown band '" + std::string(text) + "'");
}

VisibilityBand visibility_band(double d, double sigma) {
  if (d < 0.3 * sigma) return VisibilityBand::kNear;
  if (d < 0.7 * sigma) return VisibilityBand::kMid;
  if (d < sigma) return VisibilityBand::kFar;
  return VisibilityBand::kHidden;
}

// --- MixedMetric -------------------------------------------------------------

MixedMetric::MixedMetric(std::vector<ColumnKind> kinds, Norm norm,
                         double lambda)
    : kinds_(std::move(kinds)), norm_(norm), lambda_(lambda) {}

double MixedMetric::continuous_part(std::span<const double> a,
                                    std::span<const double> b) const {
  double acc = 0;
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    if (kinds_[j] != ColumnKind::kContinuous) continue;
    const double diff = std::abs(a[j] - b[j]);
    if (norm_ == Norm::kMaxNorm) {
      acc = std::max(acc, diff);
    } else {
      acc += diff * diff;
    }
  }
  return norm_ == Norm::kMaxNorm ? acc : std::sqrt(acc);
}

std::size_t MixedMetric::mismatches(std::span<const double> a,
                                    std::span<const double> b) const {
  std::size_t m = 0;
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    if (kinds_[j] == ColumnKind::kCategorical && a[j] != b[j]) ++m;
  }
  return m;
}

double MixedMetric::between(std::span<const double> a,
                            std::span<const double> b) const {
  return continuous_part(a, b) +
         lambda_ * static_cast<double>(mismatches(a, b));
}

// --- ConditionMetric ---------------------------------------------------------

namespace {

std::vector<ColumnKind> kinds_of(const Dataset& d,
                                 const std::vector<std::string>& vars) {
  std::vector<ColumnKind> kinds;
  kinds.reserve(vars.size());
  for (const auto& v : vars) kinds.push_back(d.column(v).kind());
  return kinds;
}

}  // namespace

ConditionMetric::ConditionMetric(const Dataset& d,
                                 std::vector<std::string> conditioning_vars,
                                 const StandardizationStats& stats,
                                 DistanceConfig cfg)
    : vars_(std::move(conditioning_vars)),
      cfg_(cfg),
      metric_(kinds_of(d, vars_), cfg.norm, cfg.lambda) {
  cfg_.validate();
  std::set<std::string_view> seen;
  for (const auto& name : vars_) {
    if (!seen.insert(name).second) {
      throw ValidationError("conditioning variable '" + name +
                            "' listed twice");
    }
    const Column& c = d.column(name);
    columns_.push_back(&c);
    scales_.push_back(c.is_continuous() ? stats.at(name) : ColumnScale{});
  }
}

ConditionCoords ConditionMetric::encode(const ConditionPoint& point) const {
  std::vector<std::string> missing;
  for (const auto& name : vars_) {
    if (point.find(name) == point.end()) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("condition point is missing " + list);
  }
  if (point.size() != vars_.size()) {
    for (const auto& [name, _] : point) {
      if (std::find(vars_.begin(), vars_.end(), name) == vars_.end()) {
        throw ValidationError("'" + name + "' is not a conditioning variable");
      }
    }
  }

  ConditionCoords out(vars_.size());
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Column& c = *columns_[j];
    const Value& value = point.find(vars_[j])->second;
    if (c.is_continuous()) {
      const auto* x = std::get_if<double>(&value);
      if (x == nullptr || !std::isfinite(*x)) {
        throw ValidationError("condition value for '" + vars_[j] +
                              "' must be a finite number");
      }
      out[j] = scales_[j].standardize(*x);
    } else {
      const auto* label = std::get_if<std::string>(&value);
      std::optional<std::int32_t> code;
      if (label != nullptr) code = c.level_index(*label);
      if (!code) {
        throw ValidationError("condition value '" + format_value(value) +
                              "' is not a level of '" + vars_[j] + "'");
      }
      out[j] = static_cast<double>(*code);
    }
  }
  return out;
}

std::optional<ConditionCoords> ConditionMetric::encode_row(
    std::size_t row) const {
  ConditionCoords out(vars_.size());
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Column& c = *columns_[j];
    if (c.is_missing(row)) return std::nullopt;
    out[j] = c.is_continuous() ? scales_[j].standardize(c.number(row))
                               : static_cast<double>(c.code(row));
  }
  return out;
}

// --- Free functions ----------------------------------------------------------

double dissimilarity(const Dataset& d, std::size_t row,
                     const std::vector<std::string>& conditioning_vars,
                     const ConditionPoint& point,
                     const StandardizationStats& stats,
                     const DistanceConfig& cfg) {
  ConditionMetric metric(d, conditioning_vars, stats, cfg);
  const auto target = metric.encode(point);
  const auto obs = metric.encode_row(row);
  if (!obs) {
    throw ValidationError("row " + std::to_string(row) +
                          " is missing a conditioning value");
  }
  return metric.between(*obs, target);
}

NearbySet nearby_points(const Dataset& d,
                        const std::vector<std::string>& conditioning_vars,
                        const ConditionPoint& point,
                        const StandardizationStats& stats,
                        const DistanceConfig& cfg) {
  ConditionMetric metric(d, conditioning_vars, stats, cfg);
  const auto target = metric.encode(point);

  NearbySet out;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto obs = metric.encode_row(i);
    if (!obs) {
      ++out.excluded_missing;
      continue;
    }
    double dist;
    VisibilityBand band;
    if (cfg.factor_exact()) {
      if (metric.metric().mismatches(*obs, target) != 0) continue;
      dist = metric.metric().continuous_part(*obs, target);
      band = visibility_band(dist, kFactorExactSigma);
    } else {
      dist = metric.between(*obs, target);
      if (*cfg.sigma == 0.0) {
        band = dist <= kExactMatchTolerance ? VisibilityBand::kNear
                                            : VisibilityBand::kHidden;
      } else {
        band = visibility_band(dist, *cfg.sigma);
      }
    }
    if (band == VisibilityBand::kHidden) continue;
    out.points.push_back(NearbyPoint{i, dist, band});
  }
  return out;
}

}  // namespace sectionview
