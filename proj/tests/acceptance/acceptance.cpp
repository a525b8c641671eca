// Acceptance runner. Usage: acceptance <structure|oracle|statistical|theorem>...
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hardshift/analysis.hpp"
#include "hardshift/batch.hpp"
#include "hardshift/sampler.hpp"
#include "hardshift/transform.hpp"
#include "oracles.hpp"

using namespace hardshift;

namespace {

int failures = 0;

void criterion(const std::string& name, bool pass, double measured, double tolerance, const std::string& note = "") {
  std::printf("%s %s measured=%.10g tolerance=%.10g%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), measured,
              tolerance, note.empty() ? "" : " ", note.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& line) {
  std::printf("INFO %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool same_bits(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(Point)) != 0) return false;
  }
  return true;
}

double max_coord_error(const Configuration& a, const Configuration& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.interior.size(); ++i) {
    e = std::max({e, std::fabs(a.interior[i].x - b.interior[i].x), std::fabs(a.interior[i].y - b.interior[i].y)});
  }
  return e;
}

// ---------------------------------------------------------------------------

void structure_suite() {
  const ModelParams p = derive_params(32, 0.5, 0.5);
  const auto boundary = boundary_triangular(32, 1.1);
  const auto samples = sample(p, boundary, {200, 200, 2}, 20240);

  std::size_t boundary_bad = 0, hard_core_bad = 0, mono_bad = 0, lip_bad = 0;
  double lip_worst = -1e300, rt_worst = 0.0;
  std::size_t suite_failures[4] = {0, 0, 0, 0};

  for (const Configuration& x : samples) {
    const TransformTrace tr = build_forward(x, p);
    const Configuration fwd = apply(x, tr, Direction::Forward);
    const Configuration mir = apply(x, tr, Direction::Mirror);
    const Configuration inv = invert(x, p);
    const Configuration back = invert(fwd, p);
    const TransformTrace tr_inv = build_forward(inv, p);
    const Configuration again = apply(inv, tr_inv, Direction::Forward);

    for (const Configuration* c : {&fwd, &mir, &inv}) boundary_bad += !same_bits(c->boundary, x.boundary);
    for (const Configuration* c : {&fwd, &mir, &inv}) hard_core_bad += oracle::overlapping_pairs(*c);
    rt_worst = std::max({rt_worst, max_coord_error(back, x), max_coord_error(again, x)});

    for (std::size_t k = 1; k < tr.shifts.size(); ++k) mono_bad += tr.shifts[k] < tr.shifts[k - 1];

    // every pair of interior particles, and every interior particle against the
    // boundary (shift zero there)
    const auto t = tr.shift_by_particle();
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        const double slack = std::fabs(t[i] - t[j]) - p.delta * euclid(x.interior[i], x.interior[j]);
        lip_worst = std::max(lip_worst, slack);
        lip_bad += slack > 1e-12;
      }
      for (const Point& b : x.boundary) {
        const double slack = t[i] - p.delta * euclid(x.interior[i], b);
        lip_worst = std::max(lip_worst, slack);
        lip_bad += slack > 1e-12;
      }
    }

    const VerificationReport r = verify_properties(x, p);
    suite_failures[0] += !r.boundary_fixed.passed;
    suite_failures[1] += !r.lipschitz.passed;
    suite_failures[2] += !r.roundtrip.passed;
    suite_failures[3] += !(r.hard_core.passed && r.monotonicity.passed);
  }
  info(fmt("structure: %.0f configurations, n=32 z=0.5 delta=0.5", double(samples.size())));
  criterion("structure.boundary_bit_identical", boundary_bad == 0 && suite_failures[0] == 0,
            double(boundary_bad + suite_failures[0]), 0);
  criterion("structure.lipschitz_violations", lip_bad == 0 && suite_failures[1] == 0,
            double(lip_bad + suite_failures[1]), 0, fmt("worst_slack=%.3g", lip_worst));
  criterion("structure.roundtrip_max_error", rt_worst <= 1e-9 && suite_failures[2] == 0, rt_worst, 1e-9);
  criterion("structure.hard_core_violating_pairs", hard_core_bad == 0, double(hard_core_bad), 0);
  criterion("structure.monotonicity_violations", mono_bad == 0 && suite_failures[3] == 0,
            double(mono_bad + suite_failures[3]), 0);
}

// ---------------------------------------------------------------------------

void oracle_suite() {
  {
    const ModelParams p = derive_params(32, 0.05, 0.5);
    std::mt19937_64 rng(606);
    std::size_t checked = 0, tries = 0;
    double worst = 0.0;
    while (checked < 60 && tries < 5000) {
      ++tries;
      const std::size_t m = 2 + tries % 5;
      const Configuration cfg = oracle::ring_cluster(32, m, boundary_triangular(32, 1.1), rng);
      if (cfg.interior.size() != m || near_switch_locus(cfg, p, 1e-4)) continue;
      const TransformTrace tr = build_forward(cfg, p);
      worst = std::max(worst, std::fabs(fd_jacobian(cfg, p, 1e-6) - tr.phi) / tr.phi);
      ++checked;
    }
    criterion("oracle.jacobian_rel_error", checked >= 50 && worst <= 1e-4, worst, 1e-4,
              fmt("configs=%.0f (m<=6, step 1e-6)", double(checked)));
  }
  {
    std::mt19937_64 rng(707);
    std::size_t mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 8 + 8 * (rep % 4);
      const ModelParams p = derive_params(n, rep % 3 ? 0.5 : 0.05, rep % 2 ? 0.5 : 0.1);
      const Configuration cfg = rep % 2 ? oracle::random_hard_core(n, 40 * n, boundary_triangular(n, 1.1), rng)
                                        : oracle::ring_cluster(n, 30, boundary_triangular(n, 1.1), rng);
      mismatches += !(build_forward(cfg, p) == build_forward_naive(cfg, p));
    }
    criterion("oracle.heap_equals_naive_mismatches", mismatches == 0, double(mismatches), 0, "configs=200");
  }
  {
    std::mt19937_64 rng(808);
    std::size_t mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const ModelParams p = derive_params(16, rep % 2 ? 0.05 : 0.5, 0.5);
      const Configuration cfg = oracle::random_hard_core(16, 100 + 3 * rep, {}, rng);
      mismatches += cluster_reach(cfg, p).reach != oracle::bfs_reach(cfg, p.epsilon);
    }
    criterion("oracle.cluster_reach_equals_bfs_mismatches", mismatches == 0, double(mismatches), 0, "configs=200");
  }
  {
    const std::size_t draws = 100000;
    const auto b = boundary_triangular(4, 1.1);
    std::mt19937_64 rng(909);
    const auto exact = oracle::rejection_count_distribution(4, 0.2, b, draws, rng);
    std::map<std::size_t, double> mc;
    run_chain(4, 0.2, b, {200, draws, 5}, 1009,
              [&](const Configuration& c, std::size_t) { mc[c.interior.size()] += 1.0 / double(draws); });
    const double tv = oracle::total_variation(exact, mc);
    criterion("oracle.sampler_count_tv", tv <= 0.02, tv, 0.02, "n=4 z=0.2 samples=1e5 each");
  }
}

// ---------------------------------------------------------------------------

void statistical_suite() {
  const ModelParams p = derive_params(32, 0.5, 0.5);
  RecordOptions ro;
  ro.verify = false;
  ro.functions = default_test_functions(p);
  const int chains = 4;
  const auto recs = concat(chain_records(p, boundary_triangular(32, 1.1), {500, 25000, 1}, 4242, chains, ro));
  std::vector<CovTerms> terms;
  terms.reserve(recs.size());
  for (const auto& r : recs) terms.push_back(r.terms);
  const auto rows = change_of_variables_check(terms, ro.functions);
  info(fmt("statistical: %.0f samples from %.0f chains, n=32 z=0.5 delta=0.5", double(recs.size()), chains));
  for (const auto& row : rows) {
    const double d = std::fabs(row.difference.mean);
    criterion("statistical.change_of_variables." + row.name, d <= 3.0 * row.difference.se, d,
              3.0 * row.difference.se,
              fmt("weighted=%.6g plain=%.6g z=%.3g", row.weighted.mean, row.plain.mean, row.studentized));
  }
  std::vector<double> phi;
  for (const auto& r : recs) phi.push_back(r.phi);
  const MeanEstimate e = batch_mean(phi);
  criterion("statistical.mean_phi_is_one", std::fabs(e.mean - 1.0) <= 3.0 * e.se, std::fabs(e.mean - 1.0),
            3.0 * e.se, fmt("mean=%.8g se=%.3g", e.mean, e.se));
}

// ---------------------------------------------------------------------------

void theorem_suite() {
  const ModelParams p = derive_params(256, 0.5, 0.5);
  RecordOptions ro;
  ro.verify_options.roundtrip = false;
  const Point anchor{0, 0};
  ro.rule = unique_near_anchor_rule(anchor, 0.5);
  ro.anchor = anchor;
  const int chains = std::max(4, worker_threads());
  const std::uint64_t per_chain = (2000 + chains - 1) / chains;
  const auto recs =
      concat(chain_records(p, boundary_triangular(256, 1.1), {300, per_chain, 2}, 256256, chains, ro));

  std::vector<char> good;
  std::vector<double> logs;
  std::vector<TaggedSample> tagged;
  std::size_t center_checked = 0, center_failed = 0, hard = 0;
  double mean_m = 0.0;
  for (const auto& r : recs) {
    good.push_back(r.good);
    logs.push_back(r.log_phi_phi_bar);
    tagged.push_back(*r.tagged);
    center_checked += r.report->center_shift.checked;
    center_failed += r.report->center_shift.checked && !r.report->center_shift.passed;
    hard += r.report->hard_failure();
    mean_m += double(r.m) / double(recs.size());
  }
  const BoundStats bs = bound_checks(good, logs, p);
  info(fmt("theorem: %.0f samples, mean particle count %.1f, target shift %.16g", double(recs.size()), mean_m,
           p.target_shift));
  criterion("theorem.sample_count", recs.size() >= 2000, double(recs.size()), 2000);
  criterion("theorem.bad_probability_upper99", bs.bad_upper99 <= 1.0 / 256.0, bs.bad_upper99, 1.0 / 256.0,
            fmt("bad=%.0f good_fraction=%.6g", double(bs.bad), bs.good_fraction));
  criterion("theorem.mean_abs_log_phi_phi_bar", bs.abs_log_phi_phi_bar.mean <= 30.0, bs.abs_log_phi_phi_bar.mean,
            30.0, fmt("se=%.3g", bs.abs_log_phi_phi_bar.se));
  criterion("theorem.center_shift_failures", center_checked == std::count(good.begin(), good.end(), 1) &&
                                                 center_failed == 0,
            double(center_failed), 0, fmt("checked=%.0f target=%.16g tol=1e-12", double(center_checked), p.target_shift));
  criterion("theorem.structural_failures", hard == 0, double(hard), 0);

  const DisplacementStats ds = tagged_displacement(tagged, p);
  info(fmt("corollary: P(present)=%.4g [%.4g, %.4g]", ds.p_present, ds.p_present_ci.lower, ds.p_present_ci.upper));
  info(fmt("corollary: P(far)=%.4g [%.4g, %.4g]", ds.p_far, ds.p_far_ci.lower, ds.p_far_ci.upper) +
       fmt(" threshold=%.6g", ds.threshold));
  info(fmt("corollary: msd=%.6g se=%.3g bound=%.6g", ds.msd.mean, ds.msd.se, ds.msd_bound) +
       fmt(" compatible_fraction=%.6g", ds.compatible_fraction));
  if (ds.premise_met) {
    criterion("theorem.corollary_far_probability", ds.bound_holds, ds.p_far_ci.upper, 0.125, "upper CI >= bound");
  } else {
    info("theorem.corollary_far_probability premise-not-met: " + ds.premise_note);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, void (*)()> suites{{"structure", structure_suite},
                                                 {"oracle", oracle_suite},
                                                 {"statistical", statistical_suite},
                                                 {"theorem", theorem_suite}};
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <structure|oracle|statistical|theorem>...\n");
    return 2;
  }
  for (int i = 1; i < argc; ++i) {
    const auto it = suites.find(argv[i]);
    if (it == suites.end()) {
      std::fprintf(stderr, "unknown suite %s\n", argv[i]);
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    it->second();
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    info(std::string(argv[i]) + fmt(" finished in %.1f s", took.count()));
  }
  return failures == 0 ? 0 : 1;
}
