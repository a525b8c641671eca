#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardshift/geometry.hpp"

namespace hardshift {

/// Invalid experiment specification or input file (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitPropertyFailure = 1, kExitUsage = 2 };

/// Everything a run depends on. Serialized verbatim into summary.json.
struct ExperimentSpec {
  std::string task = "verify";  // sample | transform | invert | verify | bounds | msd | sweep
  int n = 32;
  double z = 0.5;
  double delta = 0.5;
  std::string boundary = "triangular";  // triangular | empty | file:PATH
  double spacing = 1.1;
  std::uint64_t burn_in = 200;
  std::uint64_t samples = 100;
  std::uint64_t thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  std::string out = "out";
  std::string input;  // transform and invert
  bool roundtrip = true;
  bool dump_envelope = false;
  Point anchor{0.0, 0.0};
  double radius = 0.5;
  std::vector<int> sweep_n;         // empty: {n}
  std::vector<double> sweep_delta;  // empty: {delta}
};

nlohmann::json spec_to_json(const ExperimentSpec& spec);
/// Overlays the keys present in `j` onto `base`. Unknown keys and wrong types
/// raise UsageError.
ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base = {});
ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base = {});

/// Throws UsageError describing the first invalid field.
void validate(const ExperimentSpec& spec);

std::vector<Point> make_boundary(const ExperimentSpec& spec, int n);

/// Seed of chain c: derive_seed(seed, c); of sweep point p, chain c:
/// derive_seed(derive_seed(seed, p), c).
std::vector<std::uint64_t> chain_seeds(std::uint64_t master, int chains);

/// Runs the task and writes its artifacts into spec.out. Returns kExitOk or
/// kExitPropertyFailure; invalid specs and inputs raise UsageError.
int run(const ExperimentSpec& spec, std::ostream& log);

}  // namespace hardshift
