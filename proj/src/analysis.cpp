#include "hardshift/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "hardshift/grid_index.hpp"
#include "hardshift/shift_profile.hpp"

namespace hardshift {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      parent_[static_cast<std::size_t>(i)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(i)])];
      i = parent_[static_cast<std::size_t>(i)];
    }
    return i;
  }

  // The smaller index becomes the root, so roots are component minima.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }

 private:
  std::vector<int> parent_;
};

std::string fmt(double v) { return format_real(v); }

double max_coordinate_error(const std::vector<Point>& a, const std::vector<Point>& b) {
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max({err, std::fabs(a[i].x - b[i].x), std::fabs(a[i].y - b[i].y)});
  }
  return err;
}

int piece_of(const ShiftProfileState& state, ConstraintId id, Point x) {
  const ModelParams& p = state.params();
  if (id.kind == ConstraintKind::Base) {
    const double s = max_norm(x);
    if (s <= p.plateau_edge) return 0;
    if (s >= p.n) return 3;
    return std::fabs(x.x) >= std::fabs(x.y) ? 1 : 2;
  }
  const Slowdown& sd = state.slowdown(id);
  if (sd.flattened) return 0;
  return euclid(x, sd.center) <= 1.0 ? 1 : 2;
}

std::vector<double> flatten(const std::vector<Point>& pts) {
  std::vector<double> v;
  v.reserve(2 * pts.size());
  for (const Point& p : pts) {
    v.push_back(p.x);
    v.push_back(p.y);
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

ClusterReport cluster_reach(const Configuration& cfg, const ModelParams& params) {
  const auto& pts = cfg.interior;
  const double link = 1.0 + params.epsilon;
  const GridIndex grid(pts, link);
  DisjointSets sets(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    grid.for_each_within(pts[i], link, [&](int j, double) { sets.unite(static_cast<int>(i), j); });
  }

  ClusterReport report;
  report.cluster.resize(pts.size());
  report.reach.assign(pts.size(), 0.0);
  std::vector<double> root_reach(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int r = sets.find(static_cast<int>(i));
    report.cluster[i] = r;
    root_reach[static_cast<std::size_t>(r)] = std::max(root_reach[static_cast<std::size_t>(r)], max_norm(pts[i]));
  }
  const double allowance = 3.0 * params.ln_n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    report.reach[i] = root_reach[static_cast<std::size_t>(report.cluster[i])];
    const double excess = report.reach[i] - max_norm(pts[i]);
    report.worst_excess = std::max(report.worst_excess, excess);
    if (report.reach[i] > max_norm(pts[i]) + allowance) report.good = false;
  }
  return report;
}

bool is_good(const Configuration& cfg, const ModelParams& params) { return cluster_reach(cfg, params).good; }

// ---------------------------------------------------------------------------

bool VerificationReport::hard_failure() const {
  return !boundary_fixed.passed || !lipschitz.passed || !roundtrip.passed || !hard_core.passed ||
         !monotonicity.passed;
}

bool VerificationReport::all_passed() const {
  return !hard_failure() && center_shift.passed && density_positive.passed && chain_bounds.passed &&
         no_flattening.passed;
}

VerificationReport verify_properties(const Configuration& cfg, const ModelParams& params,
                                     const VerifyOptions& options) {
  VerificationReport rep;
  const TransformTrace trace = build_forward(cfg, params);
  const std::vector<double> shift = trace.shift_by_particle();
  const auto& pts = cfg.interior;
  rep.m = pts.size();
  rep.phi = trace.phi;
  rep.phi_bar = trace.phi_bar;
  rep.log_phi_phi_bar = trace.log_phi + trace.log_phi_bar;
  rep.m_prime = trace.m_prime;
  for (const double t : shift) rep.max_shift = std::max(rep.max_shift, t);

  const Configuration forward = apply(cfg, trace, Direction::Forward);
  const Configuration mirror = apply(cfg, trace, Direction::Mirror);

  // Fixed boundary and the hard core for the forward and mirror images.
  rep.boundary_fixed.checked = true;
  if (forward.boundary != cfg.boundary) rep.boundary_fixed.fail("forward map moved a boundary particle");
  if (mirror.boundary != cfg.boundary) rep.boundary_fixed.fail("mirror map moved a boundary particle");
  rep.hard_core.checked = true;
  for (const auto* image : {&forward, &mirror}) {
    const auto pairs = check_hard_core(*image);
    if (!pairs.empty()) {
      rep.hard_core.fail("pair (" + std::to_string(pairs[0].first) + "," + std::to_string(pairs[0].second) +
                         ") at distance " + fmt(pairs[0].distance) +
                         (image == &forward ? " after T" : " after T-bar"));
    }
  }

  // Monotonicity, stability of attained values, derivative bound.
  rep.monotonicity.checked = true;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace.shifts[k] < trace.shifts[k - 1]) {
      rep.monotonicity.fail("tau^" + std::to_string(k + 1) + " < tau^" + std::to_string(k));
    }
  }
  const ShiftProfileState final_state = replay_profile(cfg, trace, params, static_cast<int>(trace.size()) + 1);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const Point p = pts[static_cast<std::size_t>(trace.order[k])];
    const double again = final_state.eval(p).value;
    if (again != trace.shifts[k]) {
      rep.monotonicity.fail("final profile at P^" + std::to_string(k + 1) + " is " + fmt(again) + " != tau " +
                            fmt(trace.shifts[k]));
    }
    if (again > tau_n(max_norm(p), params)) rep.monotonicity.fail("final profile exceeds the base profile");
    if (std::fabs(trace.derivs[k]) > params.delta + 1e-12) {
      rep.monotonicity.fail("|deriv| > delta at step " + std::to_string(k + 1));
    }
  }

  // Lipschitz bound on particle pairs. Shifts lie in [0, max_shift], so pairs farther apart
  // than max_shift / delta satisfy the bound automatically.
  rep.lipschitz.checked = true;
  {
    const double radius = std::max(2.0, params.max_shift() / params.delta);
    const GridIndex grid(pts, radius);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      grid.for_each_within(pts[i], radius, [&](int j, double d) {
        if (static_cast<std::size_t>(j) <= i) return;
        const double diff = std::fabs(shift[i] - shift[static_cast<std::size_t>(j)]);
        if (diff > params.delta * d + options.lipschitz_slack) {
          rep.lipschitz.fail("particles " + std::to_string(i) + "," + std::to_string(j) + ": |dt| = " + fmt(diff) +
                             " > delta*d = " + fmt(params.delta * d));
        }
      });
    }
  }

  // Densities are products of factors |1 +- d| with |d| <= 1/2.
  rep.density_positive.checked = true;
  if (!(trace.phi > 0.0) || !(trace.phi_bar > 0.0)) rep.density_positive.fail("non-positive density");

  // Influence chains.
  rep.chain_bounds.checked = true;
  const auto chains = influence_chains(trace, cfg);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const InfluenceChain& c = chains[i];
    const double lo = tau_n(c.ancestor_norm(cfg), params);
    const double hi = tau_n(max_norm(pts[i]), params);
    if (shift[i] < lo || shift[i] > hi) {
      rep.chain_bounds.fail("particle " + std::to_string(i) + ": shift " + fmt(shift[i]) + " outside [" + fmt(lo) +
                            ", " + fmt(hi) + "]");
    }
  }
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const ConstraintId a = trace.active[k];
    if (a.kind != ConstraintKind::Step || a.index >= trace.m_prime) continue;
    const double d = euclid(pts[static_cast<std::size_t>(trace.order[k])],
                            pts[static_cast<std::size_t>(trace.order[static_cast<std::size_t>(a.index - 1)])]);
    if (d > 1.0 + params.epsilon) {
      rep.chain_bounds.fail("link from step " + std::to_string(k + 1) + " has length " + fmt(d));
    }
  }

  // Good configurations: exact centre shift, m' = m + 1 and the ancestor bound.
  const ClusterReport clusters = cluster_reach(cfg, params);
  rep.good = clusters.good;
  if (rep.good && params.theorem_regime) {
    rep.center_shift.checked = true;
    rep.no_flattening.checked = true;
    const double inner = std::sqrt(static_cast<double>(params.n));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (max_norm(pts[i]) <= inner && std::fabs(shift[i] - params.target_shift) > options.center_tol) {
        rep.center_shift.fail("particle " + std::to_string(i) + " shifted by " + fmt(shift[i]) + " instead of " +
                              fmt(params.target_shift));
      }
      const double bound = max_norm(pts[i]) + 3.0 * params.ln_n + 2.0;
      if (chains[i].ancestor_norm(cfg) > bound) {
        rep.chain_bounds.fail("particle " + std::to_string(i) + ": ancestor norm " +
                              fmt(chains[i].ancestor_norm(cfg)) + " > " + fmt(bound));
      }
    }
    if (trace.m_prime != static_cast<int>(trace.size()) + 1) {
      rep.no_flattening.fail("flattening used at step " + std::to_string(trace.m_prime));
    }
  }

  // Round trips, and the fixed boundary for the inverse.
  if (options.roundtrip) {
    rep.roundtrip.checked = true;
    const InverseResult back = invert_with_trace(forward, params);
    if (back.original.boundary != cfg.boundary) rep.boundary_fixed.fail("inverse moved a boundary particle");
    if (back.order != trace.order) rep.roundtrip.fail("inverse enumeration differs from the forward enumeration");
    const double e1 = max_coordinate_error(back.original.interior, pts);

    const Configuration pre = invert(cfg, params);
    if (pre.boundary != cfg.boundary) rep.boundary_fixed.fail("inverse moved a boundary particle");
    if (!is_hard_core(pre)) rep.hard_core.fail("inverse image violates the hard core");
    const Configuration again = apply(pre, build_forward(pre, params), Direction::Forward);
    const double e2 = max_coordinate_error(again.interior, pts);

    rep.roundtrip_error = std::max(e1, e2);
    if (e1 > options.roundtrip_tol) rep.roundtrip.fail("inverse after forward: error " + fmt(e1));
    if (e2 > options.roundtrip_tol) rep.roundtrip.fail("forward after inverse: error " + fmt(e2));
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<ConstraintId, int>> piece_signature(const Configuration& cfg, const TransformTrace& trace,
                                                          const ModelParams& params) {
  ShiftProfileState state(params, cfg.boundary);
  std::vector<std::pair<ConstraintId, int>> sig;
  sig.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const Point p = cfg.interior[static_cast<std::size_t>(trace.order[k])];
    sig.emplace_back(trace.active[k], piece_of(state, trace.active[k], p));
    state.append(p, trace.shifts[k]);
  }
  return sig;
}

bool near_switch_locus(const Configuration& cfg, const ModelParams& params, double margin) {
  const TransformTrace base = build_forward(cfg, params);
  const auto sig = piece_signature(cfg, base, params);
  for (std::size_t i = 0; i < cfg.interior.size(); ++i) {
    for (int coord = 0; coord < 2; ++coord) {
      for (const double sign : {-1.0, 1.0}) {
        Configuration moved = cfg;
        double& c = coord == 0 ? moved.interior[i].x : moved.interior[i].y;
        c += sign * margin;
        if (max_norm(moved.interior[i]) > cfg.n || !is_hard_core(moved)) return true;
        const TransformTrace t = build_forward(moved, params);
        if (t.order != base.order || piece_signature(moved, t, params) != sig) return true;
      }
    }
  }
  return false;
}

double fd_jacobian(const Configuration& cfg, const ModelParams& params, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const std::size_t m = cfg.interior.size();
  if (m > 12) throw std::invalid_argument("fd_jacobian supports at most 12 interior particles");
  if (m == 0) return 1.0;

  const auto image = [&](const Configuration& c) {
    return flatten(apply(c, build_forward(c, params), Direction::Forward).interior);
  };
  const std::size_t dim = 2 * m;
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    Configuration plus = cfg;
    Configuration minus = cfg;
    double& cp = col % 2 == 0 ? plus.interior[col / 2].x : plus.interior[col / 2].y;
    double& cm = col % 2 == 0 ? minus.interior[col / 2].x : minus.interior[col / 2].y;
    cp += step;
    cm -= step;
    const std::vector<double> fp = image(plus);
    const std::vector<double> fm = image(minus);
    for (std::size_t row = 0; row < dim; ++row) {
      jac(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = (fp[row] - fm[row]) / (2.0 * step);
    }
  }
  return std::fabs(jac.determinant());
}

// ---------------------------------------------------------------------------

std::vector<TestFunction> default_test_functions(const ModelParams& params) {
  const double half = params.n / 2.0;
  return {
      {"one", [](const Configuration&) { return 1.0; }},
      {"count_total", [](const Configuration& c) { return static_cast<double>(c.interior.size()); }},
      {"count_window",
       [half](const Configuration& c) {
         double count = 0.0;
         for (const Point& p : c.interior) {
           if (p.x >= 0.0 && p.x <= half && std::fabs(p.y) <= half) count += 1.0;
         }
         return count;
       }},
  };
}

CovTerms change_of_variables_terms(const Configuration& cfg, const TransformTrace& trace,
                                   std::span<const TestFunction> fns) {
  const Configuration image = apply(cfg, trace, Direction::Forward);
  CovTerms t;
  for (const TestFunction& f : fns) {
    t.weighted.push_back(f.fn(image) * trace.phi);
    t.plain.push_back(f.fn(cfg));
  }
  return t;
}

std::vector<DiscrepancyRow> change_of_variables_check(std::span<const CovTerms> terms,
                                                      std::span<const TestFunction> fns) {
  std::vector<DiscrepancyRow> rows;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    std::vector<double> w, p, d;
    w.reserve(terms.size());
    p.reserve(terms.size());
    d.reserve(terms.size());
    for (const CovTerms& t : terms) {
      w.push_back(t.weighted[f]);
      p.push_back(t.plain[f]);
      d.push_back(t.weighted[f] - t.plain[f]);
    }
    DiscrepancyRow row;
    row.name = fns[f].name;
    row.weighted = batch_mean(w);
    row.plain = batch_mean(p);
    row.difference = batch_mean(d);
    row.studentized = row.difference.se > 0.0 ? row.difference.mean / row.difference.se
                                              : (row.difference.mean == 0.0 ? 0.0 : INFINITY);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DiscrepancyRow> change_of_variables_check(std::span<const Configuration> samples,
                                                      const ModelParams& params,
                                                      std::span<const TestFunction> fns) {
  std::vector<CovTerms> terms;
  terms.reserve(samples.size());
  for (const Configuration& c : samples) terms.push_back(change_of_variables_terms(c, build_forward(c, params), fns));
  return change_of_variables_check(terms, fns);
}

BoundStats bound_checks(std::span<const char> good, std::span<const double> log_phi_phi_bar,
                        const ModelParams& params) {
  BoundStats s;
  s.samples = good.size();
  s.bad = static_cast<std::size_t>(std::count(good.begin(), good.end(), 0));
  s.good_fraction = s.samples ? 1.0 - static_cast<double>(s.bad) / static_cast<double>(s.samples) : 1.0;
  s.bad_upper99 = clopper_pearson_upper(s.bad, s.samples, 0.99);
  s.bad_bound = 1.0 / params.n;
  std::vector<double> abs_log(log_phi_phi_bar.size());
  std::transform(log_phi_phi_bar.begin(), log_phi_phi_bar.end(), abs_log.begin(),
                 [](double v) { return std::fabs(v); });
  s.abs_log_phi_phi_bar = batch_mean(abs_log);
  s.abs_log_bound = 120.0 * params.delta * params.delta;
  s.theorem_regime = params.theorem_regime;
  if (!params.theorem_regime) {
    s.warning = "n = " + std::to_string(params.n) + " < 200: quantitative bounds are not guaranteed";
  }
  return s;
}

BoundStats bound_checks(std::span<const Configuration> samples, const ModelParams& params) {
  std::vector<char> good;
  std::vector<double> logs;
  for (const Configuration& c : samples) {
    const TransformTrace t = build_forward(c, params);
    good.push_back(is_good(c, params) ? 1 : 0);
    logs.push_back(t.log_phi + t.log_phi_bar);
  }
  return bound_checks(good, logs, params);
}

// ---------------------------------------------------------------------------

ParticleRule unique_near_anchor_rule(Point anchor, double radius) {
  return [anchor, radius](const Configuration& cfg) -> std::optional<std::size_t> {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < cfg.interior.size(); ++i) {
      const Point d{cfg.interior[i].x - anchor.x, cfg.interior[i].y - anchor.y};
      if (max_norm(d) > radius) continue;
      if (found) return std::nullopt;
      found = i;
    }
    return found;
  };
}

TaggedSample tagged_sample(const Configuration& cfg, const TransformTrace& trace, const ParticleRule& rule,
                           Point anchor) {
  TaggedSample s;
  const auto picked = rule(cfg);
  s.present = picked.has_value();
  if (s.present) {
    const Point p = cfg.interior[*picked];
    s.displacement = max_norm({p.x - anchor.x, p.y - anchor.y});
  }
  for (const Direction dir : {Direction::Forward, Direction::Mirror}) {
    const auto image_pick = rule(apply(cfg, trace, dir));
    if (image_pick.has_value() != picked.has_value() || (picked && *image_pick != *picked)) s.compatible = false;
  }
  return s;
}

void require_anchor(Point anchor, const ModelParams& params) {
  if (!is_finite(anchor) || max_norm(anchor) > std::sqrt(static_cast<double>(params.n)) / 2.0) {
    throw std::invalid_argument("anchor must lie in [-sqrt(n)/2, sqrt(n)/2]^2");
  }
}

DisplacementStats tagged_displacement(std::span<const TaggedSample> records, const ModelParams& params) {
  DisplacementStats st;
  st.samples = records.size();
  st.threshold = params.delta * params.epsilon / 2.0 * std::sqrt(params.ln_n);
  st.msd_bound = params.delta * params.delta * params.epsilon * params.epsilon * params.ln_n / 32.0;

  std::size_t present = 0, far = 0, compatible = 0;
  std::vector<double> sq;
  sq.reserve(records.size());
  for (const TaggedSample& r : records) {
    present += r.present;
    far += r.present && r.displacement >= st.threshold;
    compatible += r.compatible;
    sq.push_back(r.present ? r.displacement * r.displacement : 0.0);
  }
  const double total = static_cast<double>(std::max<std::size_t>(st.samples, 1));
  st.p_present = static_cast<double>(present) / total;
  st.p_present_ci = clopper_pearson(present, st.samples, 0.99);
  st.p_far = static_cast<double>(far) / total;
  st.p_far_ci = clopper_pearson(far, st.samples, 0.99);
  st.msd = batch_mean(sq);
  st.compatible_fraction = static_cast<double>(compatible) / total;

  std::ostringstream note;
  bool ok = true;
  if (!(st.p_present_ci.lower > 0.5)) {
    ok = false;
    note << "P(xi present) not shown > 1/2 (99% CI lower " << st.p_present_ci.lower << "); ";
  }
  if (compatible != st.samples) {
    ok = false;
    note << "rule not compatible with the shift on " << (st.samples - compatible) << " samples; ";
  }
  if (params.delta > 1.0 / 30.0) {
    ok = false;
    note << "delta > 1/30; ";
  }
  if (!params.theorem_regime) {
    ok = false;
    note << "n < 200; ";
  }
  st.premise_met = ok;
  st.premise_note = ok ? "premises held" : note.str().substr(0, note.str().size() - 2);
  st.bound_holds = !ok || st.p_far_ci.upper >= 0.125;
  return st;
}

DisplacementStats tagged_displacement(std::span<const Configuration> samples, const ModelParams& params,
                                      Point anchor, double radius) {
  require_anchor(anchor, params);
  const ParticleRule rule = unique_near_anchor_rule(anchor, radius);
  std::vector<TaggedSample> records;
  records.reserve(samples.size());
  for (const Configuration& c : samples) records.push_back(tagged_sample(c, build_forward(c, params), rule, anchor));
  return tagged_displacement(records, params);
}

}  // namespace hardshift
