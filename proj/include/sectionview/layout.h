#ifndef SECTIONVIEW_LAYOUT_H_
#define SECTIONVIEW_LAYOUT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sectionview/dataset.h"

namespace sectionview {

struct Point2 {
  double x = 0;
  double y = 0;
  bool operator==(const Point2&) const = default;
};

// Convex hull by Andrew's monotone chain. Vertices are counter-clockwise,
// starting at the lowest-x (then lowest-y) point, with collinear points
// dropped. Collinear input yields its two extreme points; identical points
// yield one vertex. Throws ValidationError on empty input.
std::vector<Point2> convex_hull(std::span<const Point2> points);

// Absolute shoelace area; fewer than 3 vertices give 0.
double polygon_area(std::span<const Point2> polygon);

// Hull area over bounding-rectangle area for the complete (x, y) pairs.
// Returns 1 for fewer than 3 pairs or a zero-area rectangle.
double hull_area_ratio(const Column& x, const Column& y);

// Observed level pairs over all possible level pairs.
double factor_combo_ratio(const Column& a, const Column& b);

inline constexpr int kMixedPairBins = 4;

// Occupied (x-bin, level) cells over 4 * |levels|, with x cut into 4
// equal-width bins over its range. Returns 1 when x has zero range or no
// complete pairs.
double mixed_pair_ratio(const Column& x, const Column& g);

// Dispatches to the ratio matching the two column types.
double pair_ratio(const Column& a, const Column& b);

enum class SelectorKind { kHistogram, kBarplot, kScatter, kHist2d, kBoxplot, kSpineplot };

std::string_view to_string(SelectorKind kind);

struct SelectorSpec {
  std::vector<std::string> vars;  // one or two names
  SelectorKind kind = SelectorKind::kHistogram;
  bool operator==(const SelectorSpec&) const = default;
};

struct PairScore {
  std::string a, b;  // a < b lexicographically
  double ratio = 1;
  double gain = 0;   // 1 - ratio
  bool operator==(const PairScore&) const = default;
};

struct SelectorLayout {
  std::vector<SelectorSpec> selectors;
  // Every scored pair, sorted by descending gain then by name pair.
  std::vector<PairScore> pair_scores;
  bool operator==(const SelectorLayout&) const = default;
};

inline constexpr double kDefaultPairingGain = 0.25;

SelectorKind selector_kind(const Dataset& d, const std::vector<std::string>& vars);

// Orders conditioning variables into selector plots. With `user_order`,
// the listed variables come first as univariate selectors in that order,
// followed by any unlisted conditioning variables in dataset order.
// Otherwise pairs are chosen greedily by gain = 1 - ratio, taking the best
// remaining pair while its gain exceeds `min_gain`; leftovers become
// univariate selectors in dataset order.
SelectorLayout plan_selectors(
    const Dataset& d, const std::vector<std::string>& conditioning_vars,
    const std::optional<std::vector<std::string>>& user_order = std::nullopt,
    double min_gain = kDefaultPairingGain);

}  // namespace sectionview

#endif  // SECTIONVIEW_LAYOUT_H_
