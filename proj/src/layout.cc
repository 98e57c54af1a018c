#include "sectionview/layout.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "sectionview/errors.h"

namespace sectionview {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  if (points.empty()) throw ValidationError("convex hull of no points");
  std::vector<Point2> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("convex hull of non-finite point");
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

double polygon_area(std::span<const Point2> polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    twice += polygon[j].x * polygon[i].y - polygon[i].x * polygon[j].y;
  }
  return std::abs(twice) / 2.0;
}

double hull_area_ratio(const Column& x, const Column& y) {
  if (!x.is_continuous() || !y.is_continuous()) {
    throw TypeError("hull area ratio needs two continuous columns");
  }
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.is_missing(i) || y.is_missing(i)) continue;
    pts.push_back({x.number(i), y.number(i)});
  }
  if (pts.size() < 3) return 1.0;
  double x_lo = pts[0].x, x_hi = pts[0].x, y_lo = pts[0].y, y_hi = pts[0].y;
  for (const auto& p : pts) {
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  const double rect = (x_hi - x_lo) * (y_hi - y_lo);
  if (!(rect > 0)) return 1.0;
  const auto hull = convex_hull(pts);
  return std::clamp(polygon_area(hull) / rect, 0.0, 1.0);
}

double factor_combo_ratio(const Column& a, const Column& b) {
  if (!a.is_categorical() || !b.is_categorical()) {
    throw TypeError("factor combination ratio needs two categorical columns");
  }
  const std::size_t possible = a.levels().size() * b.levels().size();
  if (possible == 0) return 1.0;
  std::set<std::pair<std::int32_t, std::int32_t>> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_missing(i) || b.is_missing(i)) continue;
    seen.emplace(a.code(i), b.code(i));
  }
  if (seen.empty()) return 1.0;
  return static_cast<double>(seen.size()) / static_cast<double>(possible);
}

double mixed_pair_ratio(const Column& x, const Column& g) {
  if (!x.is_continuous() || !g.is_categorical()) {
    throw TypeError("mixed pair ratio needs a continuous and a categorical column");
  }
  double lo = 0, hi = 0;
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.is_missing(i) || g.is_missing(i)) continue;
    const double v = x.number(i);
    if (!any) {
      lo = hi = v;
      any = true;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!any || !(hi > lo) || g.levels().empty()) return 1.0;

  std::set<std::pair<int, std::int32_t>> occupied;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.is_missing(i) || g.is_missing(i)) continue;
    auto bin = static_cast<int>(
        std::floor((x.number(i) - lo) / (hi - lo) * kMixedPairBins));
    bin = std::clamp(bin, 0, kMixedPairBins - 1);
    occupied.emplace(bin, g.code(i));
  }
  return static_cast<double>(occupied.size()) /
         static_cast<double>(kMixedPairBins * g.levels().size());
}

double pair_ratio(const Column& a, const Column& b) {
  if (a.is_continuous() && b.is_continuous()) return hull_area_ratio(a, b);
  if (a.is_categorical() && b.is_categorical()) return factor_combo_ratio(a, b);
  return a.is_continuous() ? mixed_pair_ratio(a, b) : mixed_pair_ratio(b, a);
}

std::string_view to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::kHistogram:
      return "histogram";
    case SelectorKind::kBarplot:
      return "barplot";
    case SelectorKind::kScatter:
      return "scatter";
    case SelectorKind::kHist2d:
      return "hist2d";
    case SelectorKind::kBoxplot:
      return "boxplot";
    case SelectorKind::kSpineplot:
      break;
  }
  return "spineplot";
}

SelectorKind selector_kind(const Dataset& d,
                           const std::vector<std::string>& vars) {
  if (vars.size() == 1) {
    return d.column(vars[0]).is_continuous() ? SelectorKind::kHistogram
                                             : SelectorKind::kBarplot;
  }
  if (vars.size() != 2) throw ValidationError("selectors take one or two variables");
  const bool a = d.column(vars[0]).is_continuous();
  const bool b = d.column(vars[1]).is_continuous();
  if (a && b) {
    return d.rows() > kScatterMaxRows ? SelectorKind::kHist2d
                                      : SelectorKind::kScatter;
  }
  if (!a && !b) return SelectorKind::kSpineplot;
  return SelectorKind::kBoxplot;
}

SelectorLayout plan_selectors(
    const Dataset& d, const std::vector<std::string>& conditioning_vars,
    const std::optional<std::vector<std::string>>& user_order,
    double min_gain) {
  std::set<std::string> vars;
  for (const auto& v : conditioning_vars) {
    d.column(v);
    if (!vars.insert(v).second) {
      throw ValidationError("conditioning variable '" + v + "' listed twice");
    }
  }
  // Leftovers are emitted in dataset column order.
  const auto in_dataset_order = [&](const std::set<std::string>& remaining) {
    std::vector<std::string> out;
    for (const auto& name : d.names()) {
      if (remaining.count(name)) out.push_back(name);
    }
    return out;
  };

  SelectorLayout layout;
  if (user_order) {
    std::set<std::string> remaining = vars;
    for (const auto& v : *user_order) {
      d.column(v);
      if (!vars.count(v)) {
        throw ValidationError("'" + v + "' in ordering is not a conditioning variable");
      }
      if (!remaining.erase(v)) {
        throw ValidationError("'" + v + "' appears twice in ordering");
      }
      layout.selectors.push_back({{v}, selector_kind(d, {v})});
    }
    for (const auto& v : in_dataset_order(remaining)) {
      layout.selectors.push_back({{v}, selector_kind(d, {v})});
    }
    return layout;
  }

  const std::vector<std::string> names(vars.begin(), vars.end());
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      const double ratio =
          pair_ratio(d.column(names[i]), d.column(names[j]));
      layout.pair_scores.push_back({names[i], names[j], ratio, 1.0 - ratio});
    }
  }
  std::stable_sort(layout.pair_scores.begin(), layout.pair_scores.end(),
                   [](const PairScore& l, const PairScore& r) {
                     if (l.gain != r.gain) return l.gain > r.gain;
                     return std::tie(l.a, l.b) < std::tie(r.a, r.b);
                   });

  std::set<std::string> remaining = vars;
  for (const auto& score : layout.pair_scores) {
    if (!(score.gain > min_gain)) break;
    if (!remaining.count(score.a) || !remaining.count(score.b)) continue;
    remaining.erase(score.a);
    remaining.erase(score.b);
    std::vector<std::string> pair{score.a, score.b};
    if (d.column_index(pair[0]) > d.column_index(pair[1])) {
      std::swap(pair[0], pair[1]);
    }
    const auto kind = selector_kind(d, pair);
    layout.selectors.push_back({std::move(pair), kind});
  }
  for (const auto& v : in_dataset_order(remaining)) {
    layout.selectors.push_back({{v}, selector_kind(d, {v})});
  }
  return layout;
}

}  // namespace sectionview
