#include "hardshift/grid_index.hpp"

namespace hardshift {

GridIndex::GridIndex(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("grid cell size must be positive");
  }
}

GridIndex::GridIndex(std::span<const Point> points, double cell_size) : GridIndex(cell_size) {
  points_.reserve(points.size());
  for (const Point& p : points) insert(p);
}

int GridIndex::insert(Point p) {
  const int id = static_cast<int>(points_.size());
  points_.push_back(p);
  buckets_[key(cell_coord(p.x), cell_coord(p.y))].push_back(id);
  return id;
}

std::vector<int> GridIndex::neighbors_within(Point p, double r) const {
  std::vector<int> out;
  for_each_within(p, r, [&](int id, double) { out.push_back(id); });
  return out;
}

}  // namespace hardshift
