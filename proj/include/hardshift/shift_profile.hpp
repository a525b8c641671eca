#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardshift/geometry.hpp"
#include "hardshift/grid_index.hpp"
#include "hardshift/params.hpp"

namespace hardshift {

/// Base profile: delta eps sqrt(ln n) up to n^(2/3), logarithmic decay to 0 at n.
double tau_n(double s, const ModelParams& params);

/// Which constraint of a shift profile attains the minimum.
enum class ConstraintKind : std::uint8_t { Base, Boundary, Step };

struct ConstraintId {
  ConstraintKind kind = ConstraintKind::Base;
  /// Boundary: index into the configuration's boundary list.
  /// Step: construction step k (1-based); the slow-down centred at P^k.
  int index = 0;

  static ConstraintId base() { return {}; }
  static ConstraintId boundary(int i) { return {ConstraintKind::Boundary, i}; }
  static ConstraintId step(int k) { return {ConstraintKind::Step, k}; }

  friend bool operator==(const ConstraintId&, const ConstraintId&) = default;
};

/// Tie-break order among equal constraint values: base profile first, then
/// boundary slow-downs, then slow-downs in construction order.
bool takes_priority(ConstraintId a, ConstraintId b);

/// "base", "boundary:<i>" or "step:<k>".
std::string to_string(ConstraintId id);
ConstraintId constraint_from_string(const std::string& s);

/// Cone-shaped cap around an already shifted particle at `center` with shift
/// `base`. Equal to base within distance 1, ramps with slope height/eps up to
/// distance 1+eps and imposes nothing beyond. When the required height exceeds
/// delta*eps the cap is flattened to the constant `base` everywhere.
struct Slowdown {
  Point center;
  double base = 0.0;
  double height = 0.0;
  bool flattened = false;
};

Slowdown make_slowdown(Point p, double t, const ModelParams& params);

/// Value of a non-flattened slow-down at distance `dist` <= 1+eps of its centre.
inline double slowdown_ramp_value(const Slowdown& s, double dist, double eps) {
  return dist <= 1.0 ? s.base : s.base + (s.height / eps) * (dist - 1.0);
}

/// e1 derivative of the base profile tau_n(max_norm(x)).
double base_derivative_e1(Point x, const ModelParams& params);
/// e1 derivative of a slow-down (0 on flat pieces and for flattened slow-downs).
double slowdown_derivative_e1(const Slowdown& s, Point x, double eps);

struct EnvelopeValue {
  double value = 0.0;
  ConstraintId active;
};

/// The shift profile t^k: pointwise minimum of the base profile, the boundary
/// slow-downs and the slow-downs accumulated during construction.
class ShiftProfileState {
 public:
  /// Materializes slow-downs (base 0) for boundary particles with
  /// n < max_norm <= n + 1 + eps + 0.5; farther ones never reach the box.
  ShiftProfileState(const ModelParams& params, std::span<const Point> boundary);

  const ModelParams& params() const { return params_; }

  /// Adds the slow-down of the next construction step; returns its id.
  ConstraintId append(Point center, double base);

  int steps() const { return static_cast<int>(steps_.size()); }
  const Slowdown& slowdown(ConstraintId id) const;
  std::span<const Slowdown> step_slowdowns() const { return steps_; }
  std::span<const Slowdown> boundary_slowdowns() const { return boundary_; }
  std::span<const int> boundary_indices() const { return boundary_index_; }

  /// Minimum and an attaining constraint under the takes_priority tie rule.
  EnvelopeValue eval(Point x) const;
  /// Same result by scanning every constraint (reference implementation).
  EnvelopeValue eval_bruteforce(Point x) const;

  double derivative_e1(Point x) const { return derivative_e1(x, eval(x).active); }
  double derivative_e1(Point x, ConstraintId active) const;

  /// Value of a single constraint at x, +infinity outside its support.
  double value_of(ConstraintId id, Point x) const;

  /// Lowest flattened slow-down, if any. It caps the profile everywhere.
  std::optional<EnvelopeValue> flat_cap() const;

 private:
  struct GridEntry {
    ConstraintId id;
    std::size_t slot;  // position in boundary_ or steps_
  };

  void add_to_index(const Slowdown& s, ConstraintId id, std::size_t slot);
  static void consider(EnvelopeValue& best, double value, ConstraintId id);

  ModelParams params_;
  std::vector<Slowdown> boundary_;
  std::vector<int> boundary_index_;
  std::vector<Slowdown> steps_;
  GridIndex grid_;
  std::vector<GridEntry> grid_entries_;
  double flat_value_ = std::numeric_limits<double>::infinity();
  ConstraintId flat_id_;
};

}  // namespace hardshift
