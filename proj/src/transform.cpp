#include "hardshift/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hardshift {

namespace {

constexpr int kMaxBisection = 200;

// Heap entry ordered by (value, lexicographic position). Entries become stale
// when the particle's value decreases or it is taken; values only decrease.
struct HeapEntry {
  double value;
  Point key;
  int id;
};

struct HeapAfter {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.value != b.value) return a.value > b.value;
    return lex_less(b.key, a.key);
  }
};

using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapAfter>;

void require_hard_core(const Configuration& cfg) {
  validate_layout(cfg);
  const auto pairs = check_hard_core(cfg);
  if (!pairs.empty()) {
    throw std::invalid_argument("configuration violates the hard core (" + std::to_string(pairs.size()) +
                                " pairs at distance <= 1)");
  }
}

bool improves(const EnvelopeValue& current, double value, ConstraintId id) {
  return value < current.value || (value == current.value && takes_priority(id, current.active));
}

int initial_m_prime(const ShiftProfileState& state, int m) {
  for (const Slowdown& s : state.boundary_slowdowns()) {
    if (s.flattened) return 0;
  }
  return m + 1;
}

void record_step(TransformTrace& trace, int id, const EnvelopeValue& ev, double deriv) {
  trace.order.push_back(id);
  trace.shifts.push_back(ev.value);
  trace.active.push_back(ev.active);
  trace.derivs.push_back(deriv);
}

void finish_densities(TransformTrace& trace) {
  trace.phi = trace.phi_bar = 1.0;
  trace.log_phi = trace.log_phi_bar = 0.0;
  for (const double d : trace.derivs) {
    trace.phi *= std::fabs(1.0 + d);
    trace.phi_bar *= std::fabs(1.0 - d);
    trace.log_phi += std::log(std::fabs(1.0 + d));
    trace.log_phi_bar += std::log(std::fabs(1.0 - d));
  }
}

}  // namespace

std::vector<double> TransformTrace::shift_by_particle() const {
  std::vector<double> out(order.size(), 0.0);
  for (std::size_t k = 0; k < order.size(); ++k) out[static_cast<std::size_t>(order[k])] = shifts[k];
  return out;
}

TransformTrace build_forward(const Configuration& cfg, const ModelParams& params) {
  require_hard_core(cfg);
  const auto& pts = cfg.interior;
  const int m = static_cast<int>(pts.size());
  const double reach = 1.0 + params.epsilon;

  ShiftProfileState state(params, cfg.boundary);
  const GridIndex grid(pts, reach);

  TransformTrace trace;
  trace.m_prime = initial_m_prime(state, m);
  trace.order.reserve(pts.size());

  std::vector<EnvelopeValue> cur(pts.size());
  std::vector<char> done(pts.size(), 0);
  std::vector<HeapEntry> initial;
  initial.reserve(pts.size());
  for (int i = 0; i < m; ++i) {
    cur[i] = state.eval(pts[i]);
    initial.push_back({cur[i].value, pts[i], i});
  }
  MinHeap heap(HeapAfter{}, std::move(initial));

  double flat_cap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) {
    while (done[heap.top().id] || heap.top().value != cur[heap.top().id].value) heap.pop();
    const int id = heap.top().id;
    heap.pop();
    done[id] = 1;
    const EnvelopeValue ev = cur[id];
    record_step(trace, id, ev, state.derivative_e1(pts[id], ev.active));

    const ConstraintId sid = state.append(pts[id], ev.value);
    const Slowdown& s = state.slowdown(sid);
    if (s.flattened) {
      trace.m_prime = std::min(trace.m_prime, k);
      if (ev.value < flat_cap) {
        flat_cap = ev.value;
        for (int j = 0; j < m; ++j) {
          if (done[j] || !improves(cur[j], ev.value, sid)) continue;
          cur[j] = {ev.value, sid};
          heap.push({ev.value, pts[j], j});
        }
      }
      continue;
    }
    grid.for_each_within(pts[id], reach, [&](int j, double d) {
      if (done[j]) return;
      const double v = slowdown_ramp_value(s, d, params.epsilon);
      if (!improves(cur[j], v, sid)) return;
      cur[j] = {v, sid};
      heap.push({v, pts[j], j});
    });
  }
  finish_densities(trace);
  return trace;
}

TransformTrace build_forward_naive(const Configuration& cfg, const ModelParams& params) {
  require_hard_core(cfg);
  const auto& pts = cfg.interior;
  const int m = static_cast<int>(pts.size());

  ShiftProfileState state(params, cfg.boundary);
  TransformTrace trace;
  trace.m_prime = initial_m_prime(state, m);
  std::vector<char> done(pts.size(), 0);
  // Current envelope value at every particle, refreshed against each new
  // slow-down in turn: O(m) per step without any spatial index.
  std::vector<EnvelopeValue> cur(pts.size());
  for (int j = 0; j < m; ++j) cur[j] = state.eval_bruteforce(pts[j]);

  for (int k = 1; k <= m; ++k) {
    int best = -1;
    for (int j = 0; j < m; ++j) {
      if (done[j]) continue;
      if (best < 0 || cur[j].value < cur[best].value ||
          (cur[j].value == cur[best].value && lex_less(pts[j], pts[best]))) {
        best = j;
      }
    }
    done[best] = 1;
    const EnvelopeValue ev = cur[best];
    record_step(trace, best, ev, state.derivative_e1(pts[best], ev.active));
    const ConstraintId sid = state.append(pts[best], ev.value);
    if (state.slowdown(sid).flattened) trace.m_prime = std::min(trace.m_prime, k);
    for (int j = 0; j < m; ++j) {
      if (done[j]) continue;
      const double v = state.value_of(sid, pts[j]);
      if (v < cur[j].value || (v == cur[j].value && takes_priority(sid, cur[j].active))) cur[j] = {v, sid};
    }
  }
  finish_densities(trace);
  return trace;
}

ShiftProfileState replay_profile(const Configuration& cfg, const TransformTrace& trace,
                                 const ModelParams& params, int k) {
  ShiftProfileState state(params, cfg.boundary);
  const int upto = std::min<int>(k - 1, static_cast<int>(trace.size()));
  for (int l = 0; l < upto; ++l) state.append(cfg.interior[trace.order[l]], trace.shifts[l]);
  return state;
}

Configuration apply(const Configuration& cfg, const TransformTrace& trace, Direction direction) {
  if (trace.size() != cfg.interior.size()) throw std::invalid_argument("trace does not match configuration");
  Configuration out = cfg;
  const double sign = static_cast<int>(direction);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    Point& p = out.interior[static_cast<std::size_t>(trace.order[k])];
    p.x += sign * trace.shifts[k];
  }
  return out;
}

ShearPreimage solve_shear_inverse(const ShiftProfileState& state, Point target) {
  const auto residual = [&](double s) { return s + state.eval({s, target.y}).value - target.x; };

  double lo = target.x - state.params().max_shift();
  double hi = target.x;
  // The residual at lo can be a rounding error above zero when t(lo) equals
  // max_shift; widen by a few ulps at a time.
  double widen = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(target.x));
  for (int i = 0; i < 40 && residual(lo) > 0.0; ++i, widen *= 2.0) lo -= widen;
  if (residual(lo) > 0.0 || residual(hi) < 0.0) {
    throw std::runtime_error("shear inverse: root not bracketed");
  }
  int it = 0;
  for (; it < kMaxBisection; ++it) {
    if (hi - lo <= 1e-14) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (it == kMaxBisection) throw std::runtime_error("shear inverse: bisection did not converge");

  // On constant pieces of the profile the preimage has an exactly representable
  // shift; prefer it so that ties between particles survive the round trip.
  const double guess = state.eval({hi, target.y}).value;
  const Point snapped{target.x - guess, target.y};
  if (state.eval(snapped).value == guess) return {snapped, guess};

  const double r_lo = std::fabs(residual(lo));
  const double r_hi = std::fabs(residual(hi));
  const double y = r_lo < r_hi ? lo : hi;
  const double t = state.eval({y, target.y}).value;
  return {{target.x - t, target.y}, t};
}

InverseResult invert_with_trace(const Configuration& transformed, const ModelParams& params) {
  validate_layout(transformed);
  const auto& pts = transformed.interior;
  const int m = static_cast<int>(pts.size());
  // A new slow-down changes the preimage of q only if the bisection bracket
  // [q.x - max_shift, q.x] passes within 1+eps of its centre.
  const double reach = 1.0 + params.epsilon + params.max_shift();

  ShiftProfileState state(params, transformed.boundary);
  const GridIndex grid(pts, reach);

  std::vector<double> cur(pts.size());
  std::vector<char> done(pts.size(), 0);
  std::vector<HeapEntry> initial;
  initial.reserve(pts.size());
  for (int j = 0; j < m; ++j) {
    cur[j] = solve_shear_inverse(state, pts[j]).shift;
    initial.push_back({cur[j], pts[j], j});
  }
  MinHeap heap(HeapAfter{}, std::move(initial));

  InverseResult result;
  result.original = transformed;
  result.order.reserve(pts.size());
  result.shifts.reserve(pts.size());

  const auto refresh = [&](int j) {
    const double v = solve_shear_inverse(state, pts[j]).shift;
    if (v == cur[j]) return;
    cur[j] = v;
    heap.push({v, pts[j], j});
  };

  double flat_cap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) {
    while (done[heap.top().id] || heap.top().value != cur[heap.top().id]) heap.pop();
    const int id = heap.top().id;
    heap.pop();
    done[id] = 1;
    const double tau = cur[id];
    const Point original{pts[id].x - tau, pts[id].y};
    result.order.push_back(id);
    result.shifts.push_back(tau);
    result.original.interior[static_cast<std::size_t>(id)] = original;

    const ConstraintId sid = state.append(original, tau);
    if (state.slowdown(sid).flattened) {
      if (tau < flat_cap) {
        flat_cap = tau;
        for (int j = 0; j < m; ++j) {
          if (!done[j]) refresh(j);
        }
      }
      continue;
    }
    grid.for_each_within(original, reach, [&](int j, double) {
      if (!done[j]) refresh(j);
    });
  }
  return result;
}

Configuration invert(const Configuration& transformed, const ModelParams& params) {
  return invert_with_trace(transformed, params).original;
}

double InfluenceChain::ancestor_norm(const Configuration& cfg) const {
  if (boundary_root) return static_cast<double>(cfg.n);
  return max_norm(cfg.interior[static_cast<std::size_t>(members.back())]);
}

std::vector<InfluenceChain> influence_chains(const TransformTrace& trace, const Configuration& cfg) {
  std::vector<InfluenceChain> out(cfg.interior.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    InfluenceChain& chain = out[static_cast<std::size_t>(trace.order[k])];
    std::size_t step = k;
    chain.members.push_back(trace.order[step]);
    for (;;) {
      const ConstraintId a = trace.active[step];
      if (a.kind == ConstraintKind::Base) break;
      if (a.kind == ConstraintKind::Boundary) {
        chain.boundary_root = a.index;
        break;
      }
      step = static_cast<std::size_t>(a.index - 1);
      chain.members.push_back(trace.order[step]);
    }
  }
  return out;
}

double density(const TransformTrace& trace, Direction direction) {
  return direction == Direction::Forward ? trace.phi : trace.phi_bar;
}

std::string trace_to_jsonl(const TransformTrace& trace, const Configuration& cfg) {
  std::string out;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const int id = trace.order[k];
    const Point p = cfg.interior[static_cast<std::size_t>(id)];
    out += "{\"k\":" + std::to_string(k + 1) + ",\"id\":" + std::to_string(id) + ",\"P\":[" + format_real(p.x) +
           "," + format_real(p.y) + "],\"tau\":" + format_real(trace.shifts[k]) + ",\"active\":\"" +
           to_string(trace.active[k]) + "\",\"deriv\":" + format_real(trace.derivs[k]) + "}\n";
  }
  return out;
}

}  // namespace hardshift
