#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardshift/geometry.hpp"

namespace hardshift {

/// Interior particles live in the box [-n, n]^2; boundary particles are the
/// frozen configuration outside of it.
struct Configuration {
  int n = 0;
  std::vector<Point> interior;
  std::vector<Point> boundary;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Index into the concatenation interior ++ boundary.
struct ParticlePair {
  std::size_t first;
  std::size_t second;
  double distance;
};

/// Checks finiteness and box membership (interior max-norm <= n, boundary
/// max-norm > n). Throws std::invalid_argument with a description on failure.
void validate_layout(const Configuration& cfg);

/// All unordered pairs at Euclidean distance <= 1. Indices refer to
/// interior ++ boundary. An empty result means cfg is a hard-core configuration.
std::vector<ParticlePair> check_hard_core(const Configuration& cfg);

bool is_hard_core(const Configuration& cfg);

// Serialization. JSON: {"n": int, "interior": [[x,y],...], "boundary": [[x,y],...]}.
// CSV: header "kind,x,y", kind in {interior, boundary}. Reals use 17 significant digits.
std::string to_json(const Configuration& cfg);
Configuration config_from_json(const std::string& text);
std::string to_csv(const Configuration& cfg);
/// CSV carries no box parameter, so it is passed separately.
Configuration config_from_csv(const std::string& text, int n);

/// Chooses the format from the extension (.json or .csv).
Configuration load_configuration(const std::filesystem::path& path, int n_for_csv = 0);
void save_configuration(const std::filesystem::path& path, const Configuration& cfg);

std::string format_real(double v);

}  // namespace hardshift
