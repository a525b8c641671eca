#include "hardshift/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardshift {

std::vector<Point> boundary_triangular(int n, double spacing) {
  if (!(spacing > 1.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("triangular boundary spacing must exceed 1");
  }
  const double row = spacing * std::sqrt(3.0) / 2.0;
  const double outer = n + 2.0;
  const int rows = static_cast<int>(std::ceil(outer / row));
  const int cols = static_cast<int>(std::ceil(outer / spacing)) + 1;
  std::vector<Point> out;
  for (int j = -rows; j <= rows; ++j) {
    const double offset = (j % 2 != 0) ? spacing / 2.0 : 0.0;
    for (int i = -cols; i <= cols; ++i) {
      const Point p{i * spacing + offset, j * row};
      const double r = max_norm(p);
      if (r > n && r <= outer) out.push_back(p);
    }
  }
  return out;
}

GibbsChain::GibbsChain(int n, double z, std::vector<Point> boundary, std::uint64_t seed, MoveMix mix)
    : n_(n),
      z_(z),
      area_(4.0 * n * static_cast<double>(n)),
      mix_(mix),
      seed_(seed),
      rng_(seed),
      cells_per_side_(2 * n + 5),
      cells_(static_cast<std::size_t>(cells_per_side_) * static_cast<std::size_t>(cells_per_side_)) {
  if (n < 1) throw std::invalid_argument("sampler needs n >= 1");
  if (!(z > 0.0)) throw std::invalid_argument("sampler needs z > 0");
  if (mix.insert < 0 || mix.remove < 0 || mix.insert + mix.remove > 1.0) {
    throw std::invalid_argument("invalid move mix");
  }
  boundary_ = std::move(boundary);
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    const double r = max_norm(boundary_[b]);
    if (!(r > n)) throw std::invalid_argument("boundary particle inside the box");
    // Only the band within distance 1 of the box can touch an interior disk.
    if (r <= n + 1.5) cell_at(boundary_[b]).push_back(-static_cast<int>(b) - 1);
  }
}

GibbsChain::GibbsChain(const Configuration& initial, double z, std::uint64_t seed, MoveMix mix)
    : GibbsChain(initial.n, z, initial.boundary, seed, mix) {
  validate_layout(initial);
  for (const Point& p : initial.interior) {
    if (overlaps(p, -1)) throw std::invalid_argument("initial configuration violates the hard core");
    add_particle(p);
  }
}

std::vector<int>& GibbsChain::cell_at(Point p) {
  const auto clamp = [&](double v) {
    const int c = static_cast<int>(std::floor(v + n_ + 2.0));
    return std::clamp(c, 0, cells_per_side_ - 1);
  };
  return cells_[static_cast<std::size_t>(clamp(p.x)) * static_cast<std::size_t>(cells_per_side_) +
                static_cast<std::size_t>(clamp(p.y))];
}

bool GibbsChain::overlaps(Point p, int ignore) const {
  const int cx = static_cast<int>(std::floor(p.x + n_ + 2.0));
  const int cy = static_cast<int>(std::floor(p.y + n_ + 2.0));
  for (int i = std::max(cx - 1, 0); i <= std::min(cx + 1, cells_per_side_ - 1); ++i) {
    for (int j = std::max(cy - 1, 0); j <= std::min(cy + 1, cells_per_side_ - 1); ++j) {
      for (const int id : cells_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cells_per_side_) +
                                 static_cast<std::size_t>(j)]) {
        if (id == ignore) continue;
        const Point q = id >= 0 ? interior_[static_cast<std::size_t>(id)]
                                : boundary_[static_cast<std::size_t>(-id - 1)];
        if (euclid(p, q) <= 1.0) return true;
      }
    }
  }
  return false;
}

void GibbsChain::add_particle(Point p) {
  interior_.push_back(p);
  cell_at(p).push_back(static_cast<int>(interior_.size() - 1));
}

void GibbsChain::remove_particle(std::size_t i) {
  const auto erase_id = [](std::vector<int>& cell, int id) {
    cell.erase(std::find(cell.begin(), cell.end(), id));
  };
  erase_id(cell_at(interior_[i]), static_cast<int>(i));
  const std::size_t last = interior_.size() - 1;
  if (i != last) {
    auto& cell = cell_at(interior_[last]);
    *std::find(cell.begin(), cell.end(), static_cast<int>(last)) = static_cast<int>(i);
    interior_[i] = interior_[last];
  }
  interior_.pop_back();
}

void GibbsChain::move_particle(std::size_t i, Point to) {
  auto& from_cell = cell_at(interior_[i]);
  auto& to_cell = cell_at(to);
  if (&from_cell != &to_cell) {
    from_cell.erase(std::find(from_cell.begin(), from_cell.end(), static_cast<int>(i)));
    to_cell.push_back(static_cast<int>(i));
  }
  interior_[i] = to;
}

void GibbsChain::propose_insert() {
  ++insert_.proposed;
  const Point p{rng_.uniform(-n_, n_), rng_.uniform(-n_, n_)};
  if (overlaps(p, -1)) return;
  const double ratio = z_ * area_ / static_cast<double>(interior_.size() + 1);
  if (ratio < 1.0 && rng_.uniform() >= ratio) return;
  add_particle(p);
  ++insert_.accepted;
}

void GibbsChain::propose_remove() {
  ++remove_.proposed;
  if (interior_.empty()) return;
  const std::size_t i = rng_.index(interior_.size());
  const double ratio = static_cast<double>(interior_.size()) / (z_ * area_);
  if (ratio < 1.0 && rng_.uniform() >= ratio) return;
  remove_particle(i);
  ++remove_.accepted;
}

void GibbsChain::propose_translate() {
  ++translate_.proposed;
  if (interior_.empty()) return;
  const std::size_t i = rng_.index(interior_.size());
  const double h = mix_.translate_side / 2.0;
  const Point to{interior_[i].x + rng_.uniform(-h, h), interior_[i].y + rng_.uniform(-h, h)};
  if (max_norm(to) > n_) return;
  if (overlaps(to, static_cast<int>(i))) return;
  move_particle(i, to);
  ++translate_.accepted;
}

void GibbsChain::step() {
  const double u = rng_.uniform();
  if (u < mix_.insert) {
    propose_insert();
  } else if (u < mix_.insert + mix_.remove) {
    propose_remove();
  } else {
    propose_translate();
  }
}

void GibbsChain::sweep() {
  const std::size_t steps = frozen_sweep_ ? frozen_sweep_ : std::max<std::size_t>(interior_.size(), 1);
  for (std::size_t s = 0; s < steps; ++s) step();
  ++sweeps_;
}

Configuration GibbsChain::configuration() const {
  Configuration cfg;
  cfg.n = n_;
  cfg.interior = interior_;
  cfg.boundary = boundary_;
  return cfg;
}

void run_chain(int n, double z, const std::vector<Point>& boundary, const SampleSchedule& schedule,
               std::uint64_t seed, const std::function<void(const Configuration&, std::size_t)>& emit,
               MoveMix mix) {
  GibbsChain chain(n, z, boundary, seed, mix);
  for (std::uint64_t s = 0; s < schedule.burn_in_sweeps; ++s) chain.sweep();
  chain.freeze_sweep_length();
  for (std::uint64_t i = 0; i < schedule.samples; ++i) {
    for (std::uint64_t s = 0; s < schedule.thin_sweeps; ++s) chain.sweep();
    const Configuration cfg = chain.configuration();
    if (i % 64 == 0 && !is_hard_core(cfg)) throw std::logic_error("sampler produced a hard-core violation");
    emit(cfg, static_cast<std::size_t>(i));
  }
}

std::vector<Configuration> sample(int n, double z, const std::vector<Point>& boundary,
                                  const SampleSchedule& schedule, std::uint64_t seed) {
  std::vector<Configuration> out;
  out.reserve(schedule.samples);
  run_chain(n, z, boundary, schedule, seed, [&](const Configuration& c, std::size_t) { out.push_back(c); });
  return out;
}

std::vector<Configuration> sample(const ModelParams& params, const std::vector<Point>& boundary,
                                  const SampleSchedule& schedule, std::uint64_t seed) {
  return sample(params.n, params.z, boundary, schedule, seed);
}

}  // namespace hardshift
