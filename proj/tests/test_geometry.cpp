// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/geometry.hpp"

#include <random>

#include <doctest.h>

#include "fixtures.hpp"

using namespace evqa::geom;

namespace {

// Random convex quad: four points on a circle at sorted angles.
Quad random_convex_quad(std::mt19937& gen) {
  std::uniform_real_distribution<double> center(20.0, 80.0);
  std::uniform_real_distribution<double> radius(5.0, 18.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979);
  const double cx = center(gen), cy = center(gen), r = radius(gen);
  std::array<double, 4> angles{angle(gen), angle(gen), angle(gen), angle(gen)};
  std::sort(angles.begin(), angles.end());
  // Nudge near-duplicate angles apart so the quad stays non-degenerate.
  for (int i = 1; i < 4; ++i) {
    if (angles[i] - angles[i - 1] < 0.15) angles[i] = angles[i - 1] + 0.15;
  }
  Quad q;
  for (int i = 0; i < 4; ++i) {
    q[i] = Point{cx + r * std::cos(angles[i]), cy + r * std::sin(angles[i])};
  }
  return q;
}

Polygon to_polygon(const Quad& q) { return Polygon(q.begin(), q.end()); }

}  // namespace

TEST_CASE("polygon area") {
  const Polygon unit = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
  CHECK(polygon_area(unit) == doctest::Approx(1.0));
  const Polygon tri = {Point{0, 0}, Point{2, 0}, Point{0, 2}};
  CHECK(polygon_area(tri) == doctest::Approx(2.0));
  const Polygon rect = {Point{0, 0}, Point{4, 0}, Point{4, 2}, Point{0, 2}};
  CHECK(polygon_area(rect) == doctest::Approx(8.0));

  SUBCASE("signed area flips with orientation") {
    Polygon cw(unit.rbegin(), unit.rend());
    CHECK(signed_area(unit) == doctest::Approx(1.0));
    CHECK(signed_area(cw) == doctest::Approx(-1.0));
  }

  SUBCASE("degenerate input") {
    const Polygon line = {Point{0, 0}, Point{1, 0}, Point{2, 0}};
    CHECK(polygon_area(line) == doctest::Approx(0.0));
    CHECK(is_degenerate(line));
    const Polygon dup = {Point{0, 0}, Point{0, 0}, Point{1, 1}};
    CHECK(is_degenerate(dup));
    CHECK_FALSE(is_degenerate(unit));
  }
}

TEST_CASE("clip_convex") {
  const Polygon square = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};

  SUBCASE("identity") {
    const Polygon out = clip_convex(square, square);
    CHECK(polygon_area(out) == doctest::Approx(1.0));
  }
  SUBCASE("disjoint") {
    const Polygon far = {Point{5, 5}, Point{6, 5}, Point{6, 6}, Point{5, 6}};
    CHECK(clip_convex(square, far).empty());
  }
  SUBCASE("overlapping rectangles") {
    const Polygon a = {Point{0, 0}, Point{2, 0}, Point{2, 1}, Point{0, 1}};
    const Polygon b = {Point{1, 0}, Point{3, 0}, Point{3, 1}, Point{1, 1}};
    const Polygon out = clip_convex(a, b);
    CHECK(polygon_area(out) == doctest::Approx(1.0));
  }
  SUBCASE("non-convex clip polygon is rejected") {
    const Polygon arrow = {Point{0, 0}, Point{4, 0}, Point{2, 1}, Point{4, 4}};
    CHECK_THROWS_AS(clip_convex(square, arrow), std::invalid_argument);
  }
  SUBCASE("output area never exceeds either input") {
    std::mt19937 gen(23);
    for (int i = 0; i < 100; ++i) {
      const Quad a = random_convex_quad(gen);
      const Quad b = random_convex_quad(gen);
      const double out = polygon_area(clip_convex(to_polygon(a), to_polygon(b)));
      CHECK(out <= polygon_area(std::span<const Point>(a)) + 1e-9);
      CHECK(out <= polygon_area(std::span<const Point>(b)) + 1e-9);
    }
  }
}

TEST_CASE("iou basics") {
  const Quad a = fixtures::rect(0, 0, 2, 1);
  CHECK(iou(a, a) == doctest::Approx(1.0));

  const Quad b = fixtures::rect(1, 0, 3, 1);
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0));

  const Quad far = fixtures::rect(10, 10, 12, 11);
  CHECK(iou(a, far) == 0.0);

  SUBCASE("degenerate boxes score zero with a flag") {
    const Quad line = {Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{3, 0}};
    bool degenerate = false;
    CHECK(iou(a, line, &degenerate) == 0.0);
    CHECK(degenerate);
    const Quad bowtie = {Point{0, 0}, Point{1, 1}, Point{1, 0}, Point{0, 1}};
    CHECK(iou(a, bowtie, &degenerate) == 0.0);
    CHECK(degenerate);
  }
}

TEST_CASE("iou is symmetric and self-identical") {
  std::mt19937 gen(29);
  for (int i = 0; i < 200; ++i) {
    const Quad a = random_convex_quad(gen);
    const Quad b = random_convex_quad(gen);
    CHECK(std::abs(iou(a, b) - iou(b, a)) <= 1e-12);
    CHECK(iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
  }
}

TEST_CASE("iou is invariant under common rigid transforms") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> angle(0.0, 6.28);
  std::uniform_real_distribution<double> shift(0.0, 50.0);
  for (int i = 0; i < 50; ++i) {
    const Quad a = random_convex_quad(gen);
    const Quad b = random_convex_quad(gen);
    const double base = iou(a, b);
    const double th = angle(gen);
    const double tx = shift(gen), ty = shift(gen);
    auto transform = [&](const Quad& q) {
      Quad out;
      for (int k = 0; k < 4; ++k) {
        const double x = q[k].x(), y = q[k].y();
        out[k] = Point{x * std::cos(th) - y * std::sin(th) + tx,
                       x * std::sin(th) + y * std::cos(th) + ty};
      }
      return out;
    };
    CHECK(iou(transform(a), transform(b)) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("iou agrees with the Monte-Carlo oracle") {
  std::mt19937 gen(37);
  for (int i = 0; i < 50; ++i) {
    const Quad a = random_convex_quad(gen);
    const Quad b = random_convex_quad(gen);
    const double exact = iou(a, b);
    const double mc = fixtures::monte_carlo_iou(a, b, 100000, 1000 + i);
    CHECK(std::abs(exact - mc) <= 0.01);
  }
}

TEST_CASE("non-convex quads intersect piecewise") {
  // Arrow-head: reflex vertex at (2,1).
  const Quad arrow = {Point{0, 0}, Point{4, 0}, Point{2, 1}, Point{4, 4}};
  REQUIRE_FALSE(is_convex(std::span<const Point>(arrow)));
  REQUIRE(is_simple_quad(arrow));
  CHECK(convex_pieces(arrow).size() == 2);
  CHECK(iou(arrow, arrow) == doctest::Approx(1.0).epsilon(1e-12));

  const Quad box = fixtures::rect(0, 0, 4, 4);
  const double exact = iou(arrow, box);
  const double mc = fixtures::monte_carlo_iou(arrow, box, 200000, 99);
  CHECK(std::abs(exact - mc) <= 0.01);

  // Area of the arrow: two triangles across the interior diagonal.
  const auto pieces = convex_pieces(arrow);
  double total = 0;
  for (const auto& p : pieces) total += polygon_area(p);
  CHECK(total == doctest::Approx(polygon_area(std::span<const Point>(arrow))));
}
