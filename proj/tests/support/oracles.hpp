#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "hardshift/configuration.hpp"
#include "hardshift/params.hpp"

namespace oracle {

using hardshift::Configuration;
using hardshift::Point;

// Closed forms evaluated directly, independent of the library code paths.
double epsilon(double z);
double target_shift(int n, double z, double delta);
double tau(double s, int n, double z, double delta);

/// Reach of every interior particle by breadth-first search over the O(m^2)
/// adjacency (|x - x'|_2 <= 1 + eps).
std::vector<double> bfs_reach(const Configuration& cfg, double eps);

/// Pairs at distance <= 1 by a full double loop over interior ++ boundary.
std::size_t overlapping_pairs(const Configuration& cfg);

/// Uniform hard-core configuration: up to `count` sequential random insertions
/// in [-n, n]^2 (rejected insertions are dropped).
Configuration random_hard_core(int n, std::size_t count, std::vector<Point> boundary, std::mt19937_64& rng);

/// Small clustered configuration in the decay ring n^(2/3) < |x| < n so that
/// slow-down ramps and the base slope are active.
Configuration ring_cluster(int n, std::size_t count, std::vector<Point> boundary, std::mt19937_64& rng);

/// Particle-count histogram of the hard disk measure on [-n, n]^2 with the
/// given boundary, by rejection from Poisson(z * area) uniform points.
std::map<std::size_t, double> rejection_count_distribution(int n, double z, const std::vector<Point>& boundary,
                                                           std::size_t accepted, std::mt19937_64& rng,
                                                           double* mean_count = nullptr);

double total_variation(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b);

/// Chain of particles along +e1 starting at `start`.
std::vector<Point> outward_chain(Point start, std::size_t count, double spacing);

}  // namespace oracle
