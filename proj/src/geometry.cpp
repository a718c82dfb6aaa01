// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evqa::geom {
namespace {

// Strips consecutive duplicates and collinear runs from a closed ring.
Polygon dedup_ring(Polygon poly, double tol) {
  // Duplicate pass first so the collinearity pass sees distinct neighbours.
  Polygon out;
  out.reserve(poly.size());
  for (const Point& p : poly) {
    if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) {
    out.pop_back();
  }
  if (out.size() < 3) return out.size() < 3 ? Polygon{} : out;

  Polygon flat;
  flat.reserve(out.size());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = out[(i + n - 1) % n];
    const Point& cur = out[i];
    const Point& next = out[(i + 1) % n];
    // Distance from cur to the prev->next chord.
    const double chord = (next - prev).norm();
    const double dist =
        chord <= tol ? 0.0 : std::abs(cross(prev, next, cur)) / chord;
    if (dist > tol) flat.push_back(cur);
  }
  if (flat.size() < 3) return {};
  return flat;
}

bool segments_intersect_interior(const Point& a1, const Point& a2,
                                 const Point& b1, const Point& b2,
                                 double tol) {
  const double d1 = cross(b1, b2, a1);
  const double d2 = cross(b1, b2, a2);
  const double d3 = cross(a1, a2, b1);
  const double d4 = cross(a1, a2, b2);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
    return true;
  }
  auto on_segment = [tol](const Point& p, const Point& q, const Point& r) {
    if (std::abs(cross(p, q, r)) > tol) return false;
    return r.x() >= std::min(p.x(), q.x()) - tol &&
           r.x() <= std::max(p.x(), q.x()) + tol &&
           r.y() >= std::min(p.y(), q.y()) - tol &&
           r.y() <= std::max(p.y(), q.y()) + tol;
  };
  return on_segment(b1, b2, a1) || on_segment(b1, b2, a2) ||
         on_segment(a1, a2, b1) || on_segment(a1, a2, b2);
}

Polygon normalize_ccw(std::span<const Point> poly) {
  Polygon p(poly.begin(), poly.end());
  if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace

double signed_area(std::span<const Point> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double polygon_area(std::span<const Point> poly) {
  return std::abs(signed_area(poly));
}

bool is_degenerate(std::span<const Point> poly, double tol) {
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if ((poly[i] - poly[j]).norm() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) ++distinct;
  }
  if (distinct < 3) return true;
  return polygon_area(poly) <= tol;
}

bool is_convex(std::span<const Point> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c =
        cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
    if (std::abs(c) <= tol) continue;  // collinear corner is fine
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

bool is_simple_quad(const Quad& q, double tol) {
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      if ((q[i] - q[j]).norm() <= tol) return false;
    }
  }
  // Opposite edges must not touch at all.
  if (segments_intersect_interior(q[0], q[1], q[2], q[3], tol)) return false;
  if (segments_intersect_interior(q[1], q[2], q[3], q[0], tol)) return false;
  // Adjacent edges share exactly their common vertex: the far endpoint of
  // one must not lie on the other.
  auto on_open_segment = [tol](const Point& p, const Point& q2,
                               const Point& r) {
    if (std::abs(cross(p, q2, r)) > tol) return false;
    const double t = (r - p).dot(q2 - p) / (q2 - p).squaredNorm();
    return t > tol && t < 1.0 - tol;
  };
  const std::array<std::array<int, 4>, 4> adj = {{
      {0, 1, 1, 2},  // edge 01 vs edge 12, shared vertex 1
      {1, 2, 2, 3},
      {2, 3, 3, 0},
      {3, 0, 0, 1},
  }};
  for (const auto& e : adj) {
    if (on_open_segment(q[e[2]], q[e[3]], q[e[0]])) return false;
    if (on_open_segment(q[e[0]], q[e[1]], q[e[3]])) return false;
  }
  return true;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  if (!is_convex(clip)) {
    throw std::invalid_argument("clip_convex: clip polygon is not convex");
  }
  const Polygon clip_ccw = normalize_ccw(clip);
  Polygon out = subject;
  const std::size_t m = clip_ccw.size();
  for (std::size_t e2 = 0, e1 = m - 1; e2 != m && !out.empty(); e1 = e2++) {
    const Point& ca = clip_ccw[e1];
    const Point& cb = clip_ccw[e2];
    Polygon in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t v2 = 0, v1 = n - 1; v2 != n; v1 = v2++) {
      const double d1 = cross(ca, cb, in[v1]);
      const double d2 = cross(ca, cb, in[v2]);
      const bool in1 = d1 >= 0.0;
      const bool in2 = d2 >= 0.0;
      if (in1 != in2) {
        const double t = d1 / (d1 - d2);
        out.push_back(in[v1] + t * (in[v2] - in[v1]));
      }
      if (in2) out.push_back(in[v2]);
    }
  }
  return dedup_ring(std::move(out), kVertexTol);
}

std::vector<Polygon> convex_pieces(const Quad& q) {
  const Polygon ring = normalize_ccw(q);
  if (ring.size() < 3) return {};
  if (is_convex(ring)) return {ring};
  const Quad c = {ring[0], ring[1], ring[2], ring[3]};
  auto tri = [](const Point& a, const Point& b, const Point& p) {
    return Polygon{a, b, p};
  };
  // A simple quad has an interior diagonal from its reflex vertex; the two
  // triangles across it both come out counter-clockwise.
  const double a02 = signed_area(tri(c[0], c[1], c[2]));
  const double b02 = signed_area(tri(c[0], c[2], c[3]));
  if (a02 > kVertexTol && b02 > kVertexTol) {
    return {tri(c[0], c[1], c[2]), tri(c[0], c[2], c[3])};
  }
  return {tri(c[0], c[1], c[3]), tri(c[1], c[2], c[3])};
}

double intersection_area(const Quad& a, const Quad& b) {
  double total = 0.0;
  const auto pa = convex_pieces(a);
  const auto pb = convex_pieces(b);
  for (const Polygon& x : pa) {
    for (const Polygon& y : pb) {
      total += polygon_area(clip_convex(x, y));
    }
  }
  return total;
}

double iou(const Quad& a, const Quad& b, bool* degenerate) {
  const bool bad = is_degenerate(std::span<const Point>(a)) ||
                   is_degenerate(std::span<const Point>(b)) ||
                   !is_simple_quad(a) || !is_simple_quad(b);
  if (degenerate) *degenerate = bad;
  if (bad) return 0.0;
  const double inter = intersection_area(a, b);
  const double uni = polygon_area(std::span<const Point>(a)) +
                     polygon_area(std::span<const Point>(b)) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace evqa::geom
