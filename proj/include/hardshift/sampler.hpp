#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "hardshift/configuration.hpp"
#include "hardshift/params.hpp"
#include "hardshift/rng.hpp"

namespace hardshift {

/// Triangular lattice with nearest-neighbour distance `spacing`, anchored at
/// the origin and clipped to the band n < max_norm <= n + 2.
/// Throws std::invalid_argument for spacing <= 1.
std::vector<Point> boundary_triangular(int n, double spacing);

/// Move probabilities; translation takes the remaining mass.
struct MoveMix {
  double insert = 0.25;
  double remove = 0.25;
  double translate_side = 0.4;  // side of the uniform displacement square
};

struct MoveStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

/// Grand-canonical Metropolis chain for the hard disk Gibbs measure in
/// [-n, n]^2 with activity z and frozen boundary particles. One chain is
/// single-threaded; identical seeds give bit-identical trajectories.
class GibbsChain {
 public:
  GibbsChain(int n, double z, std::vector<Point> boundary, std::uint64_t seed, MoveMix mix = {});
  /// Starts from a given hard-core configuration.
  GibbsChain(const Configuration& initial, double z, std::uint64_t seed, MoveMix mix = {});

  /// One insertion, deletion or translation proposal.
  void step();
  /// max(N, 1) steps, or the frozen length once freeze_sweep_length() ran.
  /// A length that tracks N makes the sweep-to-sweep kernel state dependent
  /// and biases it, so sampling must happen with a frozen length.
  void sweep();
  void freeze_sweep_length() { frozen_sweep_ = std::max<std::size_t>(interior_.size(), 1); }
  std::size_t frozen_sweep_length() const { return frozen_sweep_; }

  int n() const { return n_; }
  double z() const { return z_; }
  std::size_t count() const { return interior_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t sweeps() const { return sweeps_; }
  const MoveStats& insert_stats() const { return insert_; }
  const MoveStats& remove_stats() const { return remove_; }
  const MoveStats& translate_stats() const { return translate_; }

  std::span<const Point> interior() const { return interior_; }
  Configuration configuration() const;

 private:
  bool overlaps(Point p, int ignore) const;
  std::vector<int>& cell_at(Point p);
  void add_particle(Point p);
  void remove_particle(std::size_t i);
  void move_particle(std::size_t i, Point to);

  void propose_insert();
  void propose_remove();
  void propose_translate();

  int n_;
  double z_;
  double area_;
  MoveMix mix_;
  std::uint64_t seed_;
  Rng rng_;
  std::uint64_t sweeps_ = 0;
  std::size_t frozen_sweep_ = 0;

  std::vector<Point> boundary_;
  std::vector<Point> interior_;
  // Cell list with unit cells over [-n-2, n+2]^2. Entries >= 0 are interior
  // slots, entries < 0 encode boundary particle -(b+1).
  int cells_per_side_;
  std::vector<std::vector<int>> cells_;

  MoveStats insert_;
  MoveStats remove_;
  MoveStats translate_;
};

struct SampleSchedule {
  std::uint64_t burn_in_sweeps = 0;
  std::uint64_t samples = 0;
  std::uint64_t thin_sweeps = 1;
};

/// Runs one chain and hands every recorded configuration to `emit` together
/// with its sample index. Every 64th emitted sample is re-checked for the hard
/// core (std::logic_error on violation).
void run_chain(int n, double z, const std::vector<Point>& boundary, const SampleSchedule& schedule,
               std::uint64_t seed, const std::function<void(const Configuration&, std::size_t)>& emit,
               MoveMix mix = {});

std::vector<Configuration> sample(int n, double z, const std::vector<Point>& boundary,
                                  const SampleSchedule& schedule, std::uint64_t seed);
std::vector<Configuration> sample(const ModelParams& params, const std::vector<Point>& boundary,
                                  const SampleSchedule& schedule, std::uint64_t seed);

}  // namespace hardshift
