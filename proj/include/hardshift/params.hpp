#pragma once

namespace hardshift {

/// Model parameters: half box side n, activity z and Lipschitz budget delta,
/// together with the derived slow-down range epsilon and the centre shift.
struct ModelParams {
  int n = 0;
  double z = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;       // min(1/(48 z), 1/4)
  double target_shift = 0.0;  // delta * epsilon * sqrt(ln n)
  bool theorem_regime = false;  // n >= 200

  // Cached quantities of the base profile.
  double ln_n = 0.0;          // natural log of n
  double plateau_edge = 0.0;  // n^(2/3)
  double decay_coeff = 0.0;   // 3 delta epsilon / sqrt(ln n)

  double log_n() const { return ln_n; }
  /// Maximal value of the base profile; every shift lies in [0, max_shift()].
  double max_shift() const { return target_shift; }
};

/// Validates (n >= 8, z > 0, 0 < delta <= 1/2) and fills the derived fields.
/// Throws std::invalid_argument otherwise.
ModelParams derive_params(int n, double z, double delta);

}  // namespace hardshift
