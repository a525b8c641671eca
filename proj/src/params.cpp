#include "hardshift/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hardshift {

ModelParams derive_params(int n, double z, double delta) {
  if (n < 8) throw std::invalid_argument("n must be >= 8, got " + std::to_string(n));
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("z must be positive and finite");
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2]");

  ModelParams p;
  p.n = n;
  p.z = z;
  p.delta = delta;
  p.epsilon = std::min(1.0 / (48.0 * z), 0.25);
  p.target_shift = delta * p.epsilon * std::sqrt(std::log(static_cast<double>(n)));
  p.theorem_regime = n >= 200;
  p.ln_n = std::log(static_cast<double>(n));
  p.plateau_edge = std::pow(static_cast<double>(n), 2.0 / 3.0);
  p.decay_coeff = 3.0 * delta * p.epsilon / std::sqrt(p.ln_n);
  return p;
}

}  // namespace hardshift
