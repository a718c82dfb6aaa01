// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_GEOMETRY_HPP
#define EVQA_GEOMETRY_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

// Planar polygon helpers for quadrilateral evidence boxes. All functions are
// pure; polygons are counter-clockwise unless stated otherwise.
namespace evqa::geom {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;
using Quad = std::array<Point, 4>;

// Absolute tolerance (pixels) for vertex dedup and collinearity tests.
inline constexpr double kVertexTol = 1e-9;

// Cross product of (b-a) x (c-a). Positive when a->b->c turns left.
inline double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Signed shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Point> poly);

// Unsigned area. Degenerate inputs (< 3 distinct vertices) yield 0.
double polygon_area(std::span<const Point> poly);

// Fewer than 3 distinct vertices, or area below tolerance.
bool is_degenerate(std::span<const Point> poly, double tol = kVertexTol);

bool is_convex(std::span<const Point> poly, double tol = kVertexTol);

// True when no two non-adjacent edges intersect and no adjacent edges
// overlap beyond their shared vertex.
bool is_simple_quad(const Quad& q, double tol = kVertexTol);

// Sutherland-Hodgman clipping of `subject` against a convex `clip` polygon.
// Returns the intersection (possibly empty). Collinear/duplicate output
// vertices are deduplicated with kVertexTol. Throws std::invalid_argument
// when `clip` is not convex.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

// Splits a simple quad into convex pieces: the quad itself when convex,
// otherwise the two triangles across its interior diagonal. Accepts either
// orientation; pieces come out counter-clockwise.
std::vector<Polygon> convex_pieces(const Quad& q);

// Intersection area of two simple quads (piecewise over convex pieces).
double intersection_area(const Quad& a, const Quad& b);

// area(a ∩ b) / area(a ∪ b), in [0,1]. Degenerate input scores 0; if
// `degenerate` is non-null it is set accordingly.
double iou(const Quad& a, const Quad& b, bool* degenerate = nullptr);

}  // namespace evqa::geom

#endif  // EVQA_GEOMETRY_HPP
