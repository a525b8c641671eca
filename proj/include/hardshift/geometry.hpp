#pragma once

#include <cmath>
#include <compare>

namespace hardshift {

/// Particle position in the plane. Lengths are in units of the disk diameter.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Maximum norm max(|x|, |y|).
inline double max_norm(Point p) { return std::fmax(std::fabs(p.x), std::fabs(p.y)); }

inline double euclid(Point p, Point q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Lexicographic order (x first, then y), exact floating comparison.
inline bool lex_less(Point a, Point b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

inline Point shifted_e1(Point p, double amount) { return {p.x + amount, p.y}; }

}  // namespace hardshift
