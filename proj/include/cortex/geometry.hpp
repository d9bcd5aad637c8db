#pragma once

// Axis-aligned rectangle geometry in CSS pixels (y grows downward).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace cortex {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  constexpr double left() const { return x; }
  constexpr double top() const { return y; }
  constexpr double right() const { return x + w; }
  constexpr double bottom() const { return y + h; }
  constexpr double area() const { return w * h; }
  constexpr Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  constexpr bool empty() const { return w <= 0.0 || h <= 0.0; }

  constexpr Rect translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }

  static constexpr Rect from_edges(double l, double t, double r, double b) {
    return {l, t, r - l, b - t};
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// A straight segment between two points. May be degenerate (a == b).
struct Segment2D {
  Point a;
  Point b;

  double length() const { return std::hypot(b.x - a.x, b.y - a.y); }
  Point midpoint() const { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

  friend bool operator==(const Segment2D&, const Segment2D&) = default;
};

/// Closed-set intersection; touching rectangles yield a zero-width or zero-height rect.
inline std::optional<Rect> intersection(const Rect& a, const Rect& b) {
  const double l = std::max(a.left(), b.left());
  const double t = std::max(a.top(), b.top());
  const double r = std::min(a.right(), b.right());
  const double btm = std::min(a.bottom(), b.bottom());
  if (l > r || t > btm) return std::nullopt;
  return Rect::from_edges(l, t, r, btm);
}

inline double intersection_area(const Rect& a, const Rect& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// True when the open interiors overlap (positive-area intersection).
inline bool interiors_overlap(const Rect& a, const Rect& b) {
  return intersection_area(a, b) > 0.0;
}

/// Smallest rectangle containing both.
inline Rect hull(const Rect& a, const Rect& b) {
  return Rect::from_edges(std::min(a.left(), b.left()), std::min(a.top(), b.top()),
                          std::max(a.right(), b.right()), std::max(a.bottom(), b.bottom()));
}

/// Decomposes a - b into at most four disjoint rectangles (top band, bottom band,
/// left and right slabs of the middle band). Pieces with zero area are dropped.
inline std::vector<Rect> difference(const Rect& a, const Rect& b) {
  std::vector<Rect> out;
  auto push = [&](double l, double t, double r, double btm) {
    if (r > l && btm > t) out.push_back(Rect::from_edges(l, t, r, btm));
  };
  if (!interiors_overlap(a, b)) {
    push(a.left(), a.top(), a.right(), a.bottom());
    return out;
  }
  const double mid_top = std::max(a.top(), b.top());
  const double mid_bottom = std::min(a.bottom(), b.bottom());
  push(a.left(), a.top(), a.right(), mid_top);
  push(a.left(), mid_bottom, a.right(), a.bottom());
  push(a.left(), mid_top, std::max(a.left(), b.left()), mid_bottom);
  push(std::min(a.right(), b.right()), mid_top, a.right(), mid_bottom);
  return out;
}

inline double difference_area(const Rect& a, const Rect& b) {
  double total = 0.0;
  for (const Rect& piece : difference(a, b)) total += piece.area();
  return total;
}

namespace detail {

// Gap between closed intervals [a0,a1] and [b0,b1]; 0 when they overlap or touch.
inline double interval_gap(double a0, double a1, double b0, double b1) {
  if (a1 < b0) return b0 - a1;
  if (b1 < a0) return a0 - b1;
  return 0.0;
}

}  // namespace detail

/// Minimum Euclidean distance between two closed rectangles. Plain sqrt rather
/// than hypot: it is correctly rounded, so equal gaps give equal distances.
inline double box_distance(const Rect& a, const Rect& b) {
  const double dx = detail::interval_gap(a.left(), a.right(), b.left(), b.right());
  const double dy = detail::interval_gap(a.top(), a.bottom(), b.top(), b.bottom());
  return std::sqrt(dx * dx + dy * dy);
}

/// The minimum-distance line joining two rectangles.
///
/// On each axis the closest coordinates are the facing edges when the projections
/// are disjoint, or the midpoint of the projection overlap otherwise. When the
/// interiors overlap there is no separating gap and the centers are joined.
inline Segment2D min_distance_segment(const Rect& a, const Rect& b) {
  if (interiors_overlap(a, b)) return {a.center(), b.center()};

  auto axis = [](double a0, double a1, double b0, double b1) -> std::array<double, 2> {
    if (a1 < b0) return {a1, b0};
    if (b1 < a0) return {a0, b1};
    const double mid = (std::max(a0, b0) + std::min(a1, b1)) / 2.0;
    return {mid, mid};
  };
  const auto xs = axis(a.left(), a.right(), b.left(), b.right());
  const auto ys = axis(a.top(), a.bottom(), b.top(), b.bottom());
  return {{xs[0], ys[0]}, {xs[1], ys[1]}};
}

/// Whether the segment passes through the open interior of `r`. Touching the
/// boundary does not count. A degenerate segment is tested as a point.
inline bool segment_hits_interior(const Segment2D& s, const Rect& r) {
  // Liang-Barsky clip against the closed rectangle, then probe the chord midpoint:
  // if the line meets the open interior at all, the whole open chord lies inside it.
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const std::array<double, 4> p{-dx, dx, -dy, dy};
  const std::array<double, 4> q{s.a.x - r.left(), r.right() - s.a.x, s.a.y - r.top(),
                                r.bottom() - s.a.y};
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  const double tm = (t0 + t1) / 2.0;
  const double mx = s.a.x + tm * dx;
  const double my = s.a.y + tm * dy;
  return mx > r.left() && mx < r.right() && my > r.top() && my < r.bottom();
}

}  // namespace cortex
