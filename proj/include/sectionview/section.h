#ifndef SECTIONVIEW_SECTION_H_
#define SECTIONVIEW_SECTION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sectionview/dataset.h"
#include "sectionview/distance.h"
#include "sectionview/models.h"

namespace sectionview {

inline constexpr int kDefaultResolution = 41;
inline constexpr int kMaxResolution = 1000;

struct SectionSpec {
  // One or two predictors varied along the section.
  std::vector<std::string> section_vars;
  // Points per continuous section axis.
  int resolution = kDefaultResolution;
  // Values of every other model predictor.
  ConditionPoint condition;
  DistanceConfig distance;
  bool operator==(const SectionSpec&) const = default;
};

struct Grid {
  std::vector<std::string> vars;
  // Per-variable axis values: equally spaced over the observed range for
  // continuous variables, all levels for categorical ones.
  std::vector<std::vector<Value>> axes;
  // Cartesian product of the axes, first variable fastest.
  std::vector<std::vector<Value>> points;
  // Variables whose observed range is a single value.
  std::vector<std::string> degenerate;
  bool operator==(const Grid&) const = default;
};

// Throws ValidationError for resolution < 2 (or above kMaxResolution) on a
// continuous variable, a variable without observations, or a bad variable
// count.
Grid make_grid(const Dataset& d, const std::vector<std::string>& section_vars,
               int resolution);

// Cells of the response type x section predictor type table.
enum class DisplayKind {
  kCont1Cont,
  kCont1Cat,
  kCont2Cont,
  kCont2Cat,
  kCont1Cont1Cat,
  kCat2Cont,
  kCat2Cat,
  kCat1Cont1Cat,
};

std::string_view to_string(DisplayKind kind);
DisplayKind parse_display_kind(std::string_view text);

// Throws UnsupportedSection for a class response with one section variable.
DisplayKind display_kind(ResponseType response,
                         const std::vector<ColumnKind>& section_kinds);

struct NearbyObservation {
  std::size_t row = 0;
  // Observed values of the section variables (nullopt when missing).
  std::vector<std::optional<Value>> section_values;
  std::optional<Value> response;
  double distance = 0;
  VisibilityBand band = VisibilityBand::kNear;
  bool operator==(const NearbyObservation&) const = default;
};

struct SectionResult {
  SectionSpec spec;
  // Model names in evaluation order.
  std::vector<std::string> models;
  ResponseInfo response;
  DisplayKind display_kind = DisplayKind::kCont1Cont;
  Grid grid;
  // Aligned with grid.points for every model.
  std::map<std::string, std::vector<Prediction>> predictions;
  std::vector<NearbyObservation> nearby;
  std::size_t excluded_missing = 0;
  bool operator==(const SectionResult&) const = default;
};

// Predictors used by any of the models, in first-use order.
std::vector<std::string> predictor_union(const std::vector<NamedModel>& models);

// Predicts every model over the section grid at the spec's condition point
// and collects the observations visible from the section. Models run
// concurrently. Throws ValidationError when section variables and condition
// do not partition the models' predictors, UnsupportedSection for blank
// display cells, and ModelFailure when a model's predict fails.
SectionResult evaluate_section(const std::vector<NamedModel>& models,
                               const Dataset& d, const SectionSpec& spec);

}  // namespace sectionview

#endif  // SECTIONVIEW_SECTION_H_
