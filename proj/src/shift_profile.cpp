#include "hardshift/shift_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardshift {

double tau_n(double s, const ModelParams& params) {
  if (s <= params.plateau_edge) return params.target_shift;
  if (s >= params.n) return 0.0;
  return params.decay_coeff * (params.ln_n - std::log(s));
}

bool takes_priority(ConstraintId a, ConstraintId b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  return a.index < b.index;
}

std::string to_string(ConstraintId id) {
  switch (id.kind) {
    case ConstraintKind::Base:
      return "base";
    case ConstraintKind::Boundary:
      return "boundary:" + std::to_string(id.index);
    case ConstraintKind::Step:
      return "step:" + std::to_string(id.index);
  }
  return "base";
}

ConstraintId constraint_from_string(const std::string& s) {
  if (s == "base") return ConstraintId::base();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad constraint id '" + s + "'");
  const std::string kind = s.substr(0, colon);
  const int index = std::stoi(s.substr(colon + 1));
  if (kind == "boundary") return ConstraintId::boundary(index);
  if (kind == "step") return ConstraintId::step(index);
  throw std::invalid_argument("bad constraint id '" + s + "'");
}

Slowdown make_slowdown(Point p, double t, const ModelParams& params) {
  Slowdown s;
  s.center = p;
  s.base = t;
  s.height = std::fabs(tau_n(max_norm(p) - 1.0 - params.epsilon, params) - t);
  s.flattened = s.height > params.delta * params.epsilon;
  return s;
}

double base_derivative_e1(Point x, const ModelParams& params) {
  const double s = max_norm(x);
  if (!(s > params.plateau_edge && s < params.n)) return 0.0;
  // On the diagonal |x| = |y| the x branch of the max norm is taken.
  if (std::fabs(x.x) < std::fabs(x.y)) return 0.0;
  const double slope = -params.decay_coeff / s;
  return x.x > 0.0 ? slope : -slope;
}

double slowdown_derivative_e1(const Slowdown& s, Point x, double eps) {
  if (s.flattened) return 0.0;
  const double d = euclid(x, s.center);
  if (!(d > 1.0 && d < 1.0 + eps)) return 0.0;
  return (s.height / eps) * (x.x - s.center.x) / d;
}

ShiftProfileState::ShiftProfileState(const ModelParams& params, std::span<const Point> boundary)
    : params_(params), grid_(1.0 + params.epsilon) {
  const double reach = params.n + 1.0 + params.epsilon + 0.5;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const double r = max_norm(boundary[i]);
    if (!(r > params.n && r <= reach)) continue;
    const Slowdown s = make_slowdown(boundary[i], 0.0, params);
    const ConstraintId id = ConstraintId::boundary(static_cast<int>(i));
    boundary_.push_back(s);
    boundary_index_.push_back(static_cast<int>(i));
    add_to_index(s, id, boundary_.size() - 1);
  }
}

void ShiftProfileState::add_to_index(const Slowdown& s, ConstraintId id, std::size_t slot) {
  if (s.flattened) {
    if (s.base < flat_value_) {
      flat_value_ = s.base;
      flat_id_ = id;
    }
    return;
  }
  grid_.insert(s.center);
  grid_entries_.push_back({id, slot});
}

ConstraintId ShiftProfileState::append(Point center, double base) {
  const Slowdown s = make_slowdown(center, base, params_);
  steps_.push_back(s);
  const ConstraintId id = ConstraintId::step(static_cast<int>(steps_.size()));
  add_to_index(s, id, steps_.size() - 1);
  return id;
}

const Slowdown& ShiftProfileState::slowdown(ConstraintId id) const {
  switch (id.kind) {
    case ConstraintKind::Step:
      return steps_.at(static_cast<std::size_t>(id.index - 1));
    case ConstraintKind::Boundary: {
      const auto it = std::lower_bound(boundary_index_.begin(), boundary_index_.end(), id.index);
      if (it == boundary_index_.end() || *it != id.index) {
        throw std::out_of_range("boundary particle has no materialized slow-down");
      }
      return boundary_[static_cast<std::size_t>(it - boundary_index_.begin())];
    }
    case ConstraintKind::Base:
      break;
  }
  throw std::invalid_argument("the base profile is not a slow-down");
}

void ShiftProfileState::consider(EnvelopeValue& best, double value, ConstraintId id) {
  if (value < best.value || (value == best.value && takes_priority(id, best.active))) {
    best.value = value;
    best.active = id;
  }
}

EnvelopeValue ShiftProfileState::eval(Point x) const {
  EnvelopeValue best{tau_n(max_norm(x), params_), ConstraintId::base()};
  const double eps = params_.epsilon;
  grid_.for_each_within(x, 1.0 + eps, [&](int gid, double d) {
    const GridEntry& e = grid_entries_[static_cast<std::size_t>(gid)];
    const Slowdown& s = e.id.kind == ConstraintKind::Step ? steps_[e.slot] : boundary_[e.slot];
    consider(best, slowdown_ramp_value(s, d, eps), e.id);
  });
  if (flat_value_ <= best.value) consider(best, flat_value_, flat_id_);
  return best;
}

EnvelopeValue ShiftProfileState::eval_bruteforce(Point x) const {
  EnvelopeValue best{tau_n(max_norm(x), params_), ConstraintId::base()};
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    consider(best, value_of(ConstraintId::boundary(boundary_index_[i]), x),
             ConstraintId::boundary(boundary_index_[i]));
  }
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    const ConstraintId id = ConstraintId::step(static_cast<int>(k + 1));
    consider(best, value_of(id, x), id);
  }
  return best;
}

double ShiftProfileState::value_of(ConstraintId id, Point x) const {
  if (id.kind == ConstraintKind::Base) return tau_n(max_norm(x), params_);
  const Slowdown& s = slowdown(id);
  if (s.flattened) return s.base;
  const double d = euclid(x, s.center);
  if (d > 1.0 + params_.epsilon) return std::numeric_limits<double>::infinity();
  return slowdown_ramp_value(s, d, params_.epsilon);
}

double ShiftProfileState::derivative_e1(Point x, ConstraintId active) const {
  if (active.kind == ConstraintKind::Base) return base_derivative_e1(x, params_);
  return slowdown_derivative_e1(slowdown(active), x, params_.epsilon);
}

std::optional<EnvelopeValue> ShiftProfileState::flat_cap() const {
  if (flat_value_ == std::numeric_limits<double>::infinity()) return std::nullopt;
  return EnvelopeValue{flat_value_, flat_id_};
}

}  // namespace hardshift
