#include <doctest.h>

#include <algorithm>

#include "sectionview/errors.h"
#include "sectionview/layout.h"
#include "support.h"

using namespace sectionview;
using support::cat;
using support::cont;

TEST_CASE("convex hull") {
  SUBCASE("square with an interior point") {
    const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}};
    const auto hull = convex_hull(pts);
    CHECK(hull == std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(polygon_area(hull) == 1);
  }
  SUBCASE("collinear points give a segment") {
    const std::vector<Point2> pts{{1, 1}, {0, 0}, {2, 2}};
    const auto hull = convex_hull(pts);
    CHECK(hull == std::vector<Point2>{{0, 0}, {2, 2}});
    CHECK(polygon_area(hull) == 0);
  }
  SUBCASE("triangle") {
    const std::vector<Point2> pts{{0, 1}, {1, 0}, {0, 0}};
    const auto hull = convex_hull(pts);
    CHECK(hull == std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}});
    CHECK(polygon_area(hull) == 0.5);
  }
  SUBCASE("duplicates") {
    const std::vector<Point2> pts{{2, 3}, {2, 3}};
    CHECK(convex_hull(pts) == std::vector<Point2>{{2, 3}});
  }
  CHECK_THROWS_AS(convex_hull(std::vector<Point2>{}), ValidationError);
}

TEST_CASE("hull area is invariant under permutation and interior points") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Point2> pts(60);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const double area = polygon_area(convex_hull(pts));
  std::shuffle(pts.begin(), pts.end(), rng);
  CHECK(polygon_area(convex_hull(pts)) == doctest::Approx(area).epsilon(1e-12));
  const auto hull = convex_hull(pts);
  // Centroid of the hull vertices lies inside a convex polygon.
  Point2 c{0, 0};
  for (const auto& v : hull) {
    c.x += v.x / hull.size();
    c.y += v.y / hull.size();
  }
  pts.push_back(c);
  CHECK(polygon_area(convex_hull(pts)) == doctest::Approx(area).epsilon(1e-12));
}

TEST_CASE("hull area ratio") {
  CHECK(hull_area_ratio(cont("x", {0, 1, 2, 3}), cont("y", {0, 1, 2, 3})) == 0);
  CHECK(hull_area_ratio(cont("x", {0, 2, 0, 2}), cont("y", {0, 0, 5, 5})) == 1);
  CHECK(hull_area_ratio(cont("x", {0, 1}), cont("y", {0, 1})) == 1);
  CHECK(hull_area_ratio(cont("x", {1, 1, 1}), cont("y", {0, 1, 2})) == 1);

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(rng);
    y[i] = u(rng);
  }
  const double r = hull_area_ratio(cont("x", x), cont("y", y));
  CHECK(r > 0.9);
  CHECK(r < 1.0);
}

TEST_CASE("factor combination ratio") {
  CHECK(factor_combo_ratio(cat("a", {"p", "p", "q", "q"}), cat("b", {"u", "v", "u", "v"})) == 1);
  CHECK(factor_combo_ratio(cat("a", {"1", "2", "3"}), cat("b", {"1", "2", "3"})) ==
        doctest::Approx(1.0 / 3));
  CHECK(factor_combo_ratio(cat("a", {"z", "z"}), cat("b", {"w", "w"})) == 1);
  // Relabeling levels changes nothing.
  CHECK(factor_combo_ratio(cat("a", {"3", "1", "2"}), cat("b", {"c", "a", "b"})) ==
        doctest::Approx(1.0 / 3));
}

TEST_CASE("mixed pair ratio") {
  const Column x = cont("x", {0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(mixed_pair_ratio(x, cat("g", {"a", "b", "a", "b", "a", "b", "a", "b", "a"})) == 1);
  CHECK(mixed_pair_ratio(x, cat("g", {"a", "a", "a", "a", "b", "b", "b", "b", "b"})) ==
        doctest::Approx(0.5));
  CHECK(mixed_pair_ratio(cont("x", {2, 2, 2}), cat("g", {"a", "b", "a"})) == 1);
  CHECK(pair_ratio(cat("g", {"a", "a", "a", "a", "b", "b", "b", "b", "b"}), x) ==
        doctest::Approx(0.5));
}

TEST_CASE("selector kinds follow variable types") {
  const Dataset d({cont("x", {1, 2, 3}), cont("y", {3, 1, 2}), cat("g", {"a", "b", "a"}),
                   cat("h", {"u", "u", "v"})});
  CHECK(selector_kind(d, {"x"}) == SelectorKind::kHistogram);
  CHECK(selector_kind(d, {"g"}) == SelectorKind::kBarplot);
  CHECK(selector_kind(d, {"x", "y"}) == SelectorKind::kScatter);
  CHECK(selector_kind(d, {"x", "g"}) == SelectorKind::kBoxplot);
  CHECK(selector_kind(d, {"g", "h"}) == SelectorKind::kSpineplot);
  CHECK(to_string(SelectorKind::kHist2d) == "hist2d");
}

TEST_CASE("greedy pairing") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x1(300), x2(300), x3(300), x4(300);
  for (std::size_t i = 0; i < 300; ++i) {
    x1[i] = u(rng);
    x2[i] = x1[i] + 0.01 * u(rng);
    x3[i] = u(rng);
    x4[i] = u(rng);
  }
  const Dataset d({cont("x1", x1), cont("x2", x2), cont("x3", x3), cont("x4", x4)});

  SUBCASE("diagonal pair is paired") {
    const auto layout = plan_selectors(d, {"x1", "x2"});
    REQUIRE(layout.selectors.size() == 1);
    CHECK(layout.selectors[0].vars == std::vector<std::string>{"x1", "x2"});
    CHECK(layout.selectors[0].kind == SelectorKind::kScatter);
    CHECK(layout.pair_scores[0].gain > 0.9);
  }
  SUBCASE("independent pair stays univariate") {
    const auto layout = plan_selectors(d, {"x3", "x4"});
    REQUIRE(layout.selectors.size() == 2);
    CHECK(layout.selectors[0].vars == std::vector<std::string>{"x3"});
    CHECK(layout.selectors[1].vars == std::vector<std::string>{"x4"});
    CHECK(layout.pair_scores[0].gain < 0.1);
  }
  SUBCASE("pairs first, leftovers in dataset order") {
    const auto layout = plan_selectors(d, {"x4", "x3", "x2", "x1"});
    REQUIRE(layout.selectors.size() == 3);
    CHECK(layout.selectors[0].vars == std::vector<std::string>{"x1", "x2"});
    CHECK(layout.selectors[1].vars == std::vector<std::string>{"x3"});
    CHECK(layout.selectors[2].vars == std::vector<std::string>{"x4"});
    CHECK(layout.pair_scores.size() == 6);
    CHECK(std::is_sorted(layout.pair_scores.begin(), layout.pair_scores.end(),
                         [](const PairScore& a, const PairScore& b) { return a.gain > b.gain; }));
  }
  SUBCASE("user order disables pairing") {
    const auto layout = plan_selectors(d, {"x1", "x2", "x3"},
                                       std::vector<std::string>{"x3", "x1", "x2"});
    REQUIRE(layout.selectors.size() == 3);
    CHECK(layout.selectors[0].vars == std::vector<std::string>{"x3"});
    CHECK(layout.selectors[1].vars == std::vector<std::string>{"x1"});
    CHECK(layout.selectors[2].vars == std::vector<std::string>{"x2"});
  }
  SUBCASE("threshold is configurable") {
    const auto layout = plan_selectors(d, {"x1", "x2"}, std::nullopt, 0.999);
    CHECK(layout.selectors.size() == 2);
  }
  SUBCASE("empty conditioning set") {
    const auto layout = plan_selectors(d, {});
    CHECK(layout.selectors.empty());
    CHECK(layout.pair_scores.empty());
  }
  CHECK_THROWS_AS(plan_selectors(d, {"nope"}), UnknownVariable);
}

TEST_CASE("categorical pairs") {
  const Dataset d({cat("a", {"1", "2", "3", "1", "2", "3"}),
                   cat("b", {"1", "2", "3", "1", "2", "3"}),
                   cat("c", {"x", "y", "x", "y", "x", "y"})});
  const auto layout = plan_selectors(d, {"a", "b", "c"});
  REQUIRE(layout.selectors.size() == 2);
  CHECK(layout.selectors[0].vars == std::vector<std::string>{"a", "b"});
  CHECK(layout.selectors[0].kind == SelectorKind::kSpineplot);
  CHECK(layout.selectors[1].vars == std::vector<std::string>{"c"});
}
