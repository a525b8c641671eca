#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardshift/configuration.hpp"
#include "hardshift/params.hpp"
#include "hardshift/stats.hpp"
#include "hardshift/transform.hpp"

namespace hardshift {

// ---------------------------------------------------------------------------
// Clusters and good configurations

/// Connected components of the interior particles under |x - x'|_2 <= 1 + eps.
/// reach[i] is the largest max-norm inside the component of particle i.
struct ClusterReport {
  std::vector<double> reach;
  std::vector<int> cluster;  // smallest interior index in the component
  bool good = true;          // reach[i] <= |x_i| + 3 ln n for all i
  double worst_excess = 0.0;  // max_i reach[i] - |x_i|
};

ClusterReport cluster_reach(const Configuration& cfg, const ModelParams& params);
bool is_good(const Configuration& cfg, const ModelParams& params);

// ---------------------------------------------------------------------------
// Single-configuration property suite

struct PropertyCheck {
  bool checked = false;
  bool passed = true;
  std::string witness;  // first failure, empty when passed

  void fail(std::string w) {
    if (passed) witness = std::move(w);
    passed = false;
  }
};

struct VerificationReport {
  PropertyCheck boundary_fixed;    // boundary untouched by T, T-bar and the inverse
  PropertyCheck center_shift;      // exact target shift near the centre (good configurations, theorem regime)
  PropertyCheck lipschitz;         // |t(x) - t(y)| <= delta |x - y|
  PropertyCheck roundtrip;         // both compositions with the inverse, plus enumeration reconstruction
  PropertyCheck hard_core;         // images of a hard-core configuration stay hard-core
  PropertyCheck monotonicity;      // shifts non-decreasing, attained values stable, |deriv| <= delta
  PropertyCheck density_positive;  // phi, phi_bar > 0
  PropertyCheck chain_bounds;      // tau_n(|a(x)|) <= t(x) <= tau_n(|x|), link lengths <= 1+eps
  PropertyCheck no_flattening;     // m' = m + 1 (good configurations, theorem regime)

  std::size_t m = 0;
  bool good = true;
  double phi = 1.0;
  double phi_bar = 1.0;
  double log_phi_phi_bar = 0.0;
  double max_shift = 0.0;
  double roundtrip_error = 0.0;  // max over both compositions and coordinates
  int m_prime = 1;

  /// Failure of the boundary, Lipschitz, round-trip, hard core or monotonicity check.
  bool hard_failure() const;
  bool all_passed() const;
};

struct VerifyOptions {
  bool roundtrip = true;       // run the inverse (most expensive part)
  double roundtrip_tol = 1e-9;
  double lipschitz_slack = 1e-12;
  double center_tol = 1e-12;
};

VerificationReport verify_properties(const Configuration& cfg, const ModelParams& params,
                                     const VerifyOptions& options = {});

// ---------------------------------------------------------------------------
// Finite-difference Jacobian of the full map

/// Central-difference Jacobian of (interior coordinates) -> (shifted interior
/// coordinates), 2m x 2m, and the absolute value of its determinant.
/// Requires m <= 12 and step > 0 (std::invalid_argument otherwise).
double fd_jacobian(const Configuration& cfg, const ModelParams& params, double step);

/// Per-step (active constraint, smooth piece) labels. Two configurations with
/// equal signatures are built by the same smooth branch of the construction.
std::vector<std::pair<ConstraintId, int>> piece_signature(const Configuration& cfg, const TransformTrace& trace,
                                                          const ModelParams& params);

/// True when moving any single coordinate by +-margin changes the order, an
/// active constraint or a smooth piece (or breaks the hard core).
bool near_switch_locus(const Configuration& cfg, const ModelParams& params, double margin);

// ---------------------------------------------------------------------------
// Monte Carlo checks

struct TestFunction {
  std::string name;
  std::function<double(const Configuration&)> fn;
};

/// f = 1, f = interior count, f = count in [0, n/2] x [-n/2, n/2].
std::vector<TestFunction> default_test_functions(const ModelParams& params);

/// Per-sample values f(T X) phi(X) and f(X) for each test function.
struct CovTerms {
  std::vector<double> weighted;  // f(T X) * phi(X)
  std::vector<double> plain;     // f(X)
};

CovTerms change_of_variables_terms(const Configuration& cfg, const TransformTrace& trace,
                                   std::span<const TestFunction> fns);

struct DiscrepancyRow {
  std::string name;
  MeanEstimate weighted;
  MeanEstimate plain;
  MeanEstimate difference;  // paired per-sample difference
  double studentized = 0.0;  // difference.mean / difference.se
};

std::vector<DiscrepancyRow> change_of_variables_check(std::span<const CovTerms> terms,
                                                      std::span<const TestFunction> fns);
std::vector<DiscrepancyRow> change_of_variables_check(std::span<const Configuration> samples,
                                                      const ModelParams& params,
                                                      std::span<const TestFunction> fns);

struct BoundStats {
  std::size_t samples = 0;
  std::size_t bad = 0;
  double good_fraction = 1.0;
  double bad_upper99 = 1.0;       // one-sided 99% Clopper-Pearson bound on P(not good)
  double bad_bound = 0.0;         // 1/n
  MeanEstimate abs_log_phi_phi_bar;
  double abs_log_bound = 0.0;     // 120 delta^2
  bool theorem_regime = false;
  std::string warning;
};

/// Inputs are per-sample good flags and log(phi * phi_bar) values.
BoundStats bound_checks(std::span<const char> good, std::span<const double> log_phi_phi_bar,
                        const ModelParams& params);
BoundStats bound_checks(std::span<const Configuration> samples, const ModelParams& params);

// ---------------------------------------------------------------------------
// Tagged-particle displacement

/// Picks a particle (interior index) or nothing.
using ParticleRule = std::function<std::optional<std::size_t>(const Configuration&)>;

/// The particle within max-norm distance `radius` of `anchor` if it is the only
/// one there, otherwise nothing.
ParticleRule unique_near_anchor_rule(Point anchor, double radius);

struct TaggedSample {
  bool present = false;
  double displacement = 0.0;  // max-norm distance to the anchor
  bool compatible = true;     // rule commutes with T and with T-bar on this sample
};

TaggedSample tagged_sample(const Configuration& cfg, const TransformTrace& trace, const ParticleRule& rule,
                           Point anchor);

struct DisplacementStats {
  std::size_t samples = 0;
  double threshold = 0.0;            // (delta eps / 2) sqrt(ln n)
  double p_present = 0.0;
  Interval p_present_ci;
  double p_far = 0.0;                // P(|xi - anchor| >= threshold)
  Interval p_far_ci;
  MeanEstimate msd;                  // E[|xi - anchor|^2 1{xi present}]
  double msd_bound = 0.0;            // delta^2 eps^2 ln n / 32
  double compatible_fraction = 1.0;
  bool premise_met = false;          // P(present) > 1/2 (CI), all samples compatible, delta <= 1/30
  std::string premise_note;
  bool bound_holds = true;           // only meaningful when premise_met
};

/// Throws std::invalid_argument when the anchor lies outside [-sqrt(n)/2, sqrt(n)/2]^2.
void require_anchor(Point anchor, const ModelParams& params);

DisplacementStats tagged_displacement(std::span<const TaggedSample> records, const ModelParams& params);
DisplacementStats tagged_displacement(std::span<const Configuration> samples, const ModelParams& params,
                                      Point anchor, double radius = 0.5);

}  // namespace hardshift
