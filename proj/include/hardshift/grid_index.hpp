#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hardshift/geometry.hpp"

namespace hardshift {

/// Uniform cell list over the plane. Queries of radius r <= cell_size only
/// inspect the 3x3 block of cells around the query location and return exactly
/// the points at Euclidean distance <= r (closed ball).
class GridIndex {
 public:
  explicit GridIndex(double cell_size);
  GridIndex(std::span<const Point> points, double cell_size);

  /// Appends a point; its id is the insertion index.
  int insert(Point p);

  double cell_size() const { return cell_size_; }
  std::size_t size() const { return points_.size(); }
  const Point& point(int id) const { return points_[static_cast<std::size_t>(id)]; }

  std::vector<int> neighbors_within(Point p, double r) const;

  /// Calls fn(id, distance) for every stored point with distance <= r.
  template <typename Fn>
  void for_each_within(Point p, double r, Fn&& fn) const {
    if (r > cell_size_) throw std::invalid_argument("query radius exceeds grid cell size");
    const std::int64_t cx = cell_coord(p.x);
    const std::int64_t cy = cell_coord(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = buckets_.find(key(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (const int id : it->second) {
          const double d = euclid(p, points_[static_cast<std::size_t>(id)]);
          if (d <= r) fn(id, d);
        }
      }
    }
  }

 private:
  std::int64_t cell_coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_size_));
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  double cell_size_;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

}  // namespace hardshift
