#ifndef SECTIONVIEW_DISTANCE_H_
#define SECTIONVIEW_DISTANCE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sectionview/dataset.h"

namespace sectionview {

// Values of the conditioning predictors that locate a section.
using ConditionPoint = Row;

enum class Norm { kEuclidean, kMaxNorm };

std::string_view to_string(Norm norm);
// Accepts "euclidean" and "maxnorm"; throws ValidationError otherwise.
Norm parse_norm(std::string_view text);

struct DistanceConfig {
  Norm norm = Norm::kEuclidean;
  // Weight of each categorical mismatch.
  double lambda = 1.0;
  // Visibility threshold. nullopt selects factor-exact mode: categorical
  // levels must match and continuous coordinates are banded against a unit
  // threshold.
  std::optional<double> sigma = 1.0;

  bool factor_exact() const { return !sigma.has_value(); }
  // Throws ValidationError on negative or non-finite parameters.
  void validate() const;
  bool operator==(const DistanceConfig&) const = default;
};

inline constexpr double kFactorExactSigma = 1.0;
// Distances at or below this count as zero when sigma == 0.
inline constexpr double kExactMatchTolerance = 1e-12;

enum class VisibilityBand { kNear = 0, kMid = 1, kFar = 2, kHidden = 3 };

std::string_view to_string(VisibilityBand band);
VisibilityBand parse_band(std::string_view text);

// Half-open bands: [0, 0.3s) near, [0.3s, 0.7s) mid, [0.7s, s) far, else
// hidden. Requires sigma > 0.
VisibilityBand visibility_band(double d, double sigma);

// Coordinates of a point in conditioning space: standardized values for
// continuous variables and level indices for categorical ones.
using ConditionCoords = std::vector<double>;

// The mixed-type dissimilarity over encoded coordinates:
// ||z_a - z_b||_p over the continuous block plus lambda times the number of
// categorical mismatches.
class MixedMetric {
 public:
  MixedMetric(std::vector<ColumnKind> kinds, Norm norm, double lambda);

  const std::vector<ColumnKind>& kinds() const { return kinds_; }
  Norm norm() const { return norm_; }
  double lambda() const { return lambda_; }

  double continuous_part(std::span<const double> a,
                         std::span<const double> b) const;
  std::size_t mismatches(std::span<const double> a,
                         std::span<const double> b) const;
  double between(std::span<const double> a, std::span<const double> b) const;

 private:
  std::vector<ColumnKind> kinds_;
  Norm norm_;
  double lambda_;
};

// MixedMetric bound to a dataset's conditioning columns and their
// standardization. Coordinates follow the order of `vars()`. The dataset
// must outlive the metric.
class ConditionMetric {
 public:
  // Throws UnknownVariable for variables absent from `d`.
  ConditionMetric(const Dataset& d, std::vector<std::string> conditioning_vars,
                  const StandardizationStats& stats, DistanceConfig cfg);

  const std::vector<std::string>& vars() const { return vars_; }
  const DistanceConfig& config() const { return cfg_; }
  const MixedMetric& metric() const { return metric_; }

  // Throws ValidationError when `point` misses a conditioning variable,
  // names a variable outside the set, or carries an invalid value.
  ConditionCoords encode(const ConditionPoint& point) const;
  // nullopt when the row is missing any conditioning value.
  std::optional<ConditionCoords> encode_row(std::size_t row) const;

  double between(std::span<const double> a, std::span<const double> b) const {
    return metric_.between(a, b);
  }

 private:
  std::vector<std::string> vars_;
  std::vector<const Column*> columns_;
  std::vector<ColumnScale> scales_;
  DistanceConfig cfg_;
  MixedMetric metric_;
};

// Dissimilarity between row `row` of `d` and `point`. Throws
// ValidationError if the row is missing a conditioning value.
double dissimilarity(const Dataset& d, std::size_t row,
                     const std::vector<std::string>& conditioning_vars,
                     const ConditionPoint& point,
                     const StandardizationStats& stats,
                     const DistanceConfig& cfg);

struct NearbyPoint {
  std::size_t row = 0;
  double distance = 0;
  VisibilityBand band = VisibilityBand::kNear;
  bool operator==(const NearbyPoint&) const = default;
};

struct NearbySet {
  // Visible rows in ascending row order.
  std::vector<NearbyPoint> points;
  // Rows skipped because a conditioning value was missing.
  std::size_t excluded_missing = 0;
};

NearbySet nearby_points(const Dataset& d,
                        const std::vector<std::string>& conditioning_vars,
                        const ConditionPoint& point,
                        const StandardizationStats& stats,
                        const DistanceConfig& cfg);

}  // namespace sectionview

#endif  // SECTIONVIEW_DISTANCE_H_
