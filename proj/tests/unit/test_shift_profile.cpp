#include <doctest.h>

#include <cmath>
#include <random>

#include "hardshift/sampler.hpp"
#include "hardshift/shift_profile.hpp"
#include "hardshift/transform.hpp"
#include "oracles.hpp"

using namespace hardshift;

namespace {

// Smooth piece of a constraint at x, used to stay away from kinks.
int piece(const ShiftProfileState& st, ConstraintId id, Point x) {
  const ModelParams& p = st.params();
  if (id.kind == ConstraintKind::Base) {
    const double s = max_norm(x);
    if (s <= p.plateau_edge) return 0;
    if (s >= p.n) return 3;
    return std::fabs(x.x) >= std::fabs(x.y) ? 1 : 2;
  }
  const Slowdown& sd = st.slowdown(id);
  if (sd.flattened) return 10;
  return euclid(x, sd.center) <= 1.0 ? 11 : 12;
}

bool near_kink(const ShiftProfileState& st, Point x, double margin) {
  const EnvelopeValue ev = st.eval(x);
  const int pc = piece(st, ev.active, x);
  for (const Point d : {Point{margin, 0}, Point{-margin, 0}, Point{0, margin}, Point{0, -margin}}) {
    const Point y{x.x + d.x, x.y + d.y};
    const EnvelopeValue e2 = st.eval(y);
    if (!(e2.active == ev.active) || piece(st, e2.active, y) != pc) return true;
  }
  return false;
}

ShiftProfileState random_state(const ModelParams& p, std::mt19937_64& rng, int appends) {
  ShiftProfileState st(p, boundary_triangular(p.n, 1.1));
  std::uniform_real_distribution<double> u(-p.n, p.n);
  for (int i = 0; i < appends; ++i) {
    const Point c{u(rng), u(rng)};
    st.append(c, st.eval(c).value);
  }
  return st;
}

ShiftProfileState construction_state(const ModelParams& p, std::mt19937_64& rng) {
  const Configuration cfg = oracle::random_hard_core(p.n, 3 * p.n * p.n, boundary_triangular(p.n, 1.1), rng);
  const TransformTrace tr = build_forward(cfg, p);
  return replay_profile(cfg, tr, p, static_cast<int>(tr.size()) + 1);
}

}  // namespace

TEST_CASE("tau_n examples") {
  const ModelParams p = derive_params(256, 1.0, 0.5);
  CHECK(tau_n(256, p) == 0.0);
  CHECK(tau_n(1000, p) == 0.0);
  CHECK(tau_n(0, p) == p.target_shift);
  CHECK(tau_n(100, p) == doctest::Approx(0.0124789).epsilon(1e-5));
  const double edge = std::pow(256.0, 2.0 / 3.0);
  CHECK(std::fabs(tau_n(edge, p) - p.target_shift) <= 1e-15);
  CHECK(std::fabs(tau_n(std::nextafter(edge, 1e9), p) - p.target_shift) <= 1e-12);
}

TEST_CASE("tau_n matches the closed form and is non-increasing") {
  for (const int n : {8, 32, 256, 1000}) {
    for (const double z : {0.05, 0.5, 2.0}) {
      const ModelParams p = derive_params(n, z, 0.3);
      double prev = INFINITY;
      for (double s = 0; s <= n + 2; s += 0.0625) {
        const double v = tau_n(s, p);
        CHECK(std::fabs(v - oracle::tau(s, n, z, 0.3)) <= 1e-15);
        CHECK(v <= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("make_slowdown examples") {
  const ModelParams p = derive_params(256, 1.0, 0.5);
  const Point q{150, 20};
  const Slowdown flat = make_slowdown(q, tau_n(150 - 1 - p.epsilon, p), p);
  CHECK(flat.height == 0.0);
  CHECK_FALSE(flat.flattened);

  const Slowdown b = make_slowdown({256.3, 4}, 0.0, p);
  CHECK(b.height == doctest::Approx(tau_n(256.3 - 1 - p.epsilon, p)));
  CHECK(b.height <= p.delta * p.epsilon);
  CHECK_FALSE(b.flattened);

  const double half = std::pow(256.0, 2.0 / 3.0) / 2.0;
  const Slowdown deep = make_slowdown({half, 0}, 0.0, p);
  CHECK(deep.height == doctest::Approx(p.target_shift));
  CHECK(deep.flattened);
}

TEST_CASE("boundary slow-downs are never flattened") {
  for (const int n : {8, 16, 32, 256, 1024}) {
    for (const double z : {0.01, 0.5, 3.0}) {
      const ModelParams p = derive_params(n, z, 0.5);
      const ShiftProfileState st(p, boundary_triangular(n, 1.05));
      CHECK_FALSE(st.flat_cap().has_value());
      for (const Slowdown& s : st.boundary_slowdowns()) CHECK(s.height <= p.delta * p.epsilon);
    }
  }
}

TEST_CASE("envelope examples") {
  const ModelParams p = derive_params(256, 1.0, 0.5);
  ShiftProfileState st(p, {});
  const EnvelopeValue a = st.eval({3, 4});
  CHECK(a.value == p.target_shift);
  CHECK(a.active == ConstraintId::base());

  const Point c{200, 10};
  const double t = 0.5 * tau_n(200, p);
  const ConstraintId id = st.append(c, t);
  CHECK(id == ConstraintId::step(1));
  const EnvelopeValue at = st.eval(c);
  CHECK(at.value == std::min(tau_n(200, p), t));
  CHECK(at.active == id);
  CHECK(st.value_of(id, {c.x + 1 + p.epsilon + 1e-9, c.y}) == INFINITY);
  const EnvelopeValue far = st.eval({c.x + 3, c.y});
  CHECK(far.value == tau_n(203, p));
  CHECK(far.active == ConstraintId::base());

  // A flattened slow-down caps the profile everywhere.
  const ConstraintId flat = st.append({0, 0}, 0.001);
  REQUIRE(st.slowdown(flat).flattened);
  CHECK(st.eval({-100, 50}).value == 0.001);
  CHECK(st.eval({-100, 50}).active == flat);
  CHECK(st.flat_cap()->value == 0.001);
}

TEST_CASE("ramp values") {
  const ModelParams p = derive_params(64, 0.05, 0.5);
  const Slowdown s{{0, 0}, 0.01, 0.1, false};
  CHECK(slowdown_ramp_value(s, 0.5, p.epsilon) == 0.01);
  CHECK(slowdown_ramp_value(s, 1.0, p.epsilon) == 0.01);
  CHECK(slowdown_ramp_value(s, 1.0 + p.epsilon, p.epsilon) == doctest::Approx(0.11));
}

TEST_CASE("derivative examples") {
  const ModelParams p = derive_params(256, 1.0, 0.5);
  ShiftProfileState st(p, {});
  CHECK(st.derivative_e1({1, 2}) == 0.0);

  const double s = 100;
  CHECK(base_derivative_e1({s, 0}, p) == doctest::Approx(-3 * p.delta * p.epsilon / (std::sqrt(std::log(256.0)) * s)));
  CHECK(base_derivative_e1({-s, 3}, p) == doctest::Approx(3 * p.delta * p.epsilon / (std::sqrt(std::log(256.0)) * s)));
  CHECK(base_derivative_e1({3, s}, p) == 0.0);
  // diagonal takes the x branch
  CHECK(base_derivative_e1({s, s}, p) == base_derivative_e1({s, 0}, p));

  const Point c{150, 0};
  const ConstraintId id = st.append(c, 0.0);
  const Slowdown& sd = st.slowdown(id);
  REQUIRE_FALSE(sd.flattened);
  const Point x{c.x + 1 + p.epsilon / 2, 0};
  CHECK(st.eval(x).active == id);
  CHECK(st.derivative_e1(x) == doctest::Approx(sd.height / p.epsilon));
}

TEST_CASE("constraint ids") {
  for (const ConstraintId id : {ConstraintId::base(), ConstraintId::boundary(7), ConstraintId::step(12)}) {
    CHECK(constraint_from_string(to_string(id)) == id);
  }
  CHECK(takes_priority(ConstraintId::base(), ConstraintId::boundary(0)));
  CHECK(takes_priority(ConstraintId::boundary(5), ConstraintId::step(1)));
  CHECK(takes_priority(ConstraintId::step(1), ConstraintId::step(2)));
  CHECK_FALSE(takes_priority(ConstraintId::step(2), ConstraintId::step(2)));
  CHECK_THROWS(constraint_from_string("side:3"));
}

TEST_CASE("grid evaluation equals brute force on random states") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 1000; ++rep) {
    const ModelParams p = derive_params(12, rep % 2 ? 0.05 : 0.8, 0.5);
    const ShiftProfileState st = random_state(p, rng, 1 + rep % 40);
    std::uniform_real_distribution<double> u(-p.n - 1, p.n + 1);
    for (int q = 0; q < 5; ++q) {
      const Point x{u(rng), u(rng)};
      const EnvelopeValue a = st.eval(x);
      const EnvelopeValue b = st.eval_bruteforce(x);
      REQUIRE(a.value == b.value);
      REQUIRE(a.active == b.active);
    }
  }
}

TEST_CASE("appending never raises the profile") {
  std::mt19937_64 rng(5);
  const ModelParams p = derive_params(16, 0.05, 0.5);
  ShiftProfileState st(p, boundary_triangular(16, 1.1));
  std::uniform_real_distribution<double> u(-16, 16);
  std::vector<Point> probes(300);
  for (Point& x : probes) x = {u(rng), u(rng)};
  std::vector<double> before(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) before[i] = st.eval(probes[i]).value;
  for (int k = 0; k < 200; ++k) {
    const Point c{u(rng), u(rng)};
    st.append(c, st.eval(c).value);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double v = st.eval(probes[i]).value;
      REQUIRE(v <= before[i]);
      before[i] = v;
    }
  }
}

TEST_CASE("construction profiles are delta-Lipschitz") {
  std::mt19937_64 rng(99);
  for (const double z : {0.05, 0.5}) {
    const ModelParams p = derive_params(12, z, 0.5);
    const ShiftProfileState st = construction_state(p, rng);
    std::uniform_real_distribution<double> u(-p.n - 1, p.n + 1);
    std::normal_distribution<double> step(0.0, 0.7);
    int violations = 0;
    for (int i = 0; i < 50000; ++i) {
      const Point x{u(rng), u(rng)};
      const Point y = i % 2 ? Point{u(rng), u(rng)} : Point{x.x + step(rng), x.y + step(rng)};
      if (std::fabs(st.eval(x).value - st.eval(y).value) > p.delta * euclid(x, y) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("e1 derivative agrees with central differences away from kinks") {
  std::mt19937_64 rng(17);
  const ModelParams p = derive_params(32, 0.05, 0.5);
  const ShiftProfileState st = construction_state(p, rng);
  std::uniform_real_distribution<double> u(-p.n, p.n);
  int tested = 0;
  while (tested < 3000) {
    const Point x{u(rng), u(rng)};
    if (near_kink(st, x, 1e-4)) continue;
    const double h = 1e-6;
    const double fd = (st.eval({x.x + h, x.y}).value - st.eval({x.x - h, x.y}).value) / (2 * h);
    REQUIRE(std::fabs(fd - st.derivative_e1(x)) <= 1e-5);
    CHECK(std::fabs(st.derivative_e1(x)) <= p.delta + 1e-12);
    ++tested;
  }
}
