#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardshift/configuration.hpp"
#include "hardshift/params.hpp"
#include "hardshift/shift_profile.hpp"

namespace hardshift {

/// Record of the recursive construction of the shift map for one configuration.
/// Entry k-1 of each list belongs to construction step k.
struct TransformTrace {
  std::vector<int> order;               // interior index of P^k
  std::vector<double> shifts;           // tau^k, non-decreasing
  std::vector<ConstraintId> active;     // constraint attaining t^k(P^k)
  std::vector<double> derivs;           // e1 derivative of t^k at P^k
  int m_prime = 1;                      // first step using the flattening rule, m+1 if none
  double phi = 1.0;                     // prod |1 + deriv|
  double phi_bar = 1.0;                 // prod |1 - deriv|
  double log_phi = 0.0;
  double log_phi_bar = 0.0;

  std::size_t size() const { return order.size(); }
  /// Shift of every interior particle, indexed like Configuration::interior.
  std::vector<double> shift_by_particle() const;

  friend bool operator==(const TransformTrace&, const TransformTrace&) = default;
};

enum class Direction : int { Forward = 1, Mirror = -1 };

/// Builds the trace with a lazy-deletion min-heap; each step only revisits
/// particles within 1+eps of the previous one. Requires a hard-core
/// configuration (std::invalid_argument otherwise).
TransformTrace build_forward(const Configuration& cfg, const ModelParams& params);

/// O(m^2) construction: a linear argmin scan per step, and every remaining
/// particle is compared against each new slow-down. Reference for build_forward.
TransformTrace build_forward_naive(const Configuration& cfg, const ModelParams& params);

/// Profile t^k: base, boundary slow-downs and the slow-downs of steps 1..k-1.
ShiftProfileState replay_profile(const Configuration& cfg, const TransformTrace& trace,
                                 const ModelParams& params, int k);

/// Shifts interior particles by +-shift along e1; boundary is copied unchanged.
Configuration apply(const Configuration& cfg, const TransformTrace& trace, Direction direction);

struct ShearPreimage {
  Point point;   // y with y + t(y) e1 = target
  double shift;  // t(y)
};

/// Solves y + t(y) e1 = target on the horizontal line through target by
/// bisection over [target.x - max_shift, target.x]. The map s -> s + t(s, y)
/// has slope >= 1 - delta, so the root is unique. Throws std::runtime_error if
/// 200 iterations do not suffice.
ShearPreimage solve_shear_inverse(const ShiftProfileState& state, Point target);

struct InverseResult {
  Configuration original;
  std::vector<int> order;      // index in the transformed interior of step k
  std::vector<double> shifts;  // reconstructed tau^k
};

/// Exact inverse of the forward map: rebuilds the enumeration from the image
/// alone and undoes the shifts.
InverseResult invert_with_trace(const Configuration& transformed, const ModelParams& params);
Configuration invert(const Configuration& transformed, const ModelParams& params);

/// Chain of influence x_0 -> x_1 -> ... obtained by following the active
/// constraint of each particle back to the base profile or the boundary.
struct InfluenceChain {
  std::vector<int> members;           // interior indices, members[0] is the particle itself
  std::optional<int> boundary_root;   // boundary index when the chain ends at the boundary

  std::size_t length() const { return members.size() - 1 + (boundary_root ? 1 : 0); }
  /// Max norm of the ancestor; the boundary counts as n.
  double ancestor_norm(const Configuration& cfg) const;
};

std::vector<InfluenceChain> influence_chains(const TransformTrace& trace, const Configuration& cfg);

/// phi for Forward, phi_bar for Mirror.
double density(const TransformTrace& trace, Direction direction);

/// One JSON object per line: {"k","id","P":[x,y],"tau","active","deriv"}.
std::string trace_to_jsonl(const TransformTrace& trace, const Configuration& cfg);

}  // namespace hardshift
