#include "hardshift/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "hardshift/analysis.hpp"
#include "hardshift/batch.hpp"
#include "hardshift/configuration.hpp"
#include "hardshift/params.hpp"
#include "hardshift/sampler.hpp"
#include "hardshift/shift_profile.hpp"
#include "hardshift/transform.hpp"

namespace hardshift {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTasks = {"sample", "transform", "invert", "verify", "bounds", "msd", "sweep"};

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json estimate_json(const MeanEstimate& e) { return {{"mean", e.mean}, {"se", e.se}, {"count", e.count}}; }

json interval_json(const Interval& iv) { return {iv.lower, iv.upper}; }

json params_json(const ModelParams& p) {
  return {{"n", p.n},
          {"z", p.z},
          {"delta", p.delta},
          {"epsilon", p.epsilon},
          {"target_shift", p.target_shift},
          {"theorem_regime", p.theorem_regime},
          {"ln_n", p.ln_n}};
}

json check_json(const PropertyCheck& c) {
  return {{"checked", c.checked}, {"passed", c.passed}, {"witness", c.witness}};
}

json report_json(const VerificationReport& r) {
  return {{"m", r.m},
          {"good", r.good},
          {"phi", r.phi},
          {"phi_bar", r.phi_bar},
          {"log_phi_phi_bar", r.log_phi_phi_bar},
          {"max_shift", r.max_shift},
          {"roundtrip_error", r.roundtrip_error},
          {"m_prime", r.m_prime},
          {"hard_failure", r.hard_failure()},
          {"all_passed", r.all_passed()},
          {"properties",
           {{"boundary_fixed", check_json(r.boundary_fixed)},
            {"center_shift", check_json(r.center_shift)},
            {"lipschitz", check_json(r.lipschitz)},
            {"roundtrip", check_json(r.roundtrip)},
            {"hard_core", check_json(r.hard_core)},
            {"monotonicity", check_json(r.monotonicity)},
            {"density_positive", check_json(r.density_positive)},
            {"chain_bounds", check_json(r.chain_bounds)},
            {"no_flattening", check_json(r.no_flattening)}}}};
}

json bounds_json(const BoundStats& b) {
  return {{"samples", b.samples},
          {"bad", b.bad},
          {"good_fraction", b.good_fraction},
          {"bad_upper99", b.bad_upper99},
          {"bad_bound", b.bad_bound},
          {"bad_bound_holds", b.bad_upper99 <= b.bad_bound},
          {"abs_log_phi_phi_bar", estimate_json(b.abs_log_phi_phi_bar)},
          {"abs_log_bound", b.abs_log_bound},
          {"abs_log_bound_holds", b.abs_log_phi_phi_bar.mean <= b.abs_log_bound},
          {"theorem_regime", b.theorem_regime},
          {"warning", b.warning}};
}

json displacement_json(const DisplacementStats& d) {
  return {{"samples", d.samples},
          {"threshold", d.threshold},
          {"p_present", d.p_present},
          {"p_present_ci99", interval_json(d.p_present_ci)},
          {"p_far", d.p_far},
          {"p_far_ci99", interval_json(d.p_far_ci)},
          {"msd", estimate_json(d.msd)},
          {"msd_bound", d.msd_bound},
          {"compatible_fraction", d.compatible_fraction},
          {"premise_met", d.premise_met},
          {"premise_note", d.premise_note},
          {"bound_holds", d.bound_holds}};
}

std::string csv_real(double v) { return std::isfinite(v) ? format_real(v) : std::string(); }

const char* kVerificationHeader =
    "sample,chain,index,m,good,phi,phi_bar,log_phi_phi_bar,max_shift,roundtrip_error,reach_excess,hard_failure\n";

void append_verification_row(std::ostringstream& csv, std::size_t sample, std::size_t chain, std::size_t index,
                             const SampleRecord& r) {
  const bool verified = r.report.has_value();
  csv << sample << ',' << chain << ',' << index << ',' << r.m << ',' << (r.good ? 1 : 0) << ','
      << csv_real(r.phi) << ',' << csv_real(r.phi_bar) << ',' << csv_real(r.log_phi_phi_bar) << ','
      << csv_real(r.max_shift) << ',' << (verified && r.report->roundtrip.checked ? csv_real(r.report->roundtrip_error) : "")
      << ',' << csv_real(r.reach_excess) << ',' << (verified ? (r.report->hard_failure() ? "1" : "0") : "") << '\n';
}

SampleSchedule schedule_of(const ExperimentSpec& s) { return {s.burn_in, s.samples, s.thin}; }

json run_header(const ExperimentSpec& spec, const ModelParams& params) {
  json seeds = json::array();
  for (const std::uint64_t s : chain_seeds(spec.seed, spec.chains)) seeds.push_back(s);
  return {{"spec", spec_to_json(spec)},
          {"params", params_json(params)},
          {"seed_rule", "chain c uses splitmix64(seed ^ splitmix64(c))"},
          {"chain_seeds", seeds}};
}

// ---------------------------------------------------------------------------

int run_sample(const ExperimentSpec& spec, const fs::path& out, std::ostream& log) {
  const ModelParams params = derive_params(spec.n, spec.z, spec.delta);
  const auto boundary = make_boundary(spec, spec.n);
  const auto chains = sample_chains(spec.n, spec.z, boundary, schedule_of(spec), spec.seed, spec.chains);

  std::ofstream f(out / "samples.jsonl", std::ios::binary);
  std::vector<double> counts;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) {
      const Configuration& cfg = chains[c][i];
      f << "{\"chain\":" << c << ",\"index\":" << i << ",\"config\":" << to_json(cfg) << "}\n";
      counts.push_back(static_cast<double>(cfg.interior.size()));
    }
  }
  json summary = run_header(spec, params);
  summary["samples_written"] = counts.size();
  summary["interior_count"] = estimate_json(batch_mean(counts));
  summary["boundary_count"] = boundary.size();
  write_json(out / "summary.json", summary);
  log << "wrote " << counts.size() << " samples to " << (out / "samples.jsonl").string() << "\n";
  return kExitOk;
}

Configuration load_input(const ExperimentSpec& spec) {
  try {
    return load_configuration(spec.input, spec.n);
  } catch (const std::exception& e) {
    throw UsageError("cannot read input configuration: " + std::string(e.what()));
  }
}

void dump_envelope(const fs::path& path, const Configuration& cfg, const TransformTrace& trace,
                   const ModelParams& params) {
  const ShiftProfileState state = replay_profile(cfg, trace, params, static_cast<int>(trace.size()) + 1);
  std::ostringstream csv;
  csv << "s,base,profile\n";
  const int points = 4 * params.n;
  for (int i = 0; i <= points; ++i) {
    const double s = params.n * static_cast<double>(i) / points;
    csv << format_real(s) << ',' << format_real(tau_n(s, params)) << ','
        << format_real(state.eval({s, 0.0}).value) << '\n';
  }
  write_text(path, csv.str());
}

int run_transform(const ExperimentSpec& spec, const fs::path& out, std::ostream& log) {
  const Configuration cfg = load_input(spec);
  const ModelParams params = derive_params(cfg.n, spec.z, spec.delta);
  if (!is_hard_core(cfg)) throw UsageError("input configuration violates the hard core");
  const TransformTrace trace = build_forward(cfg, params);

  save_configuration(out / "transformed.json", apply(cfg, trace, Direction::Forward));
  save_configuration(out / "mirrored.json", apply(cfg, trace, Direction::Mirror));
  write_text(out / "trace.jsonl", trace_to_jsonl(trace, cfg));
  if (spec.dump_envelope) dump_envelope(out / "envelope.csv", cfg, trace, params);

  VerifyOptions vo;
  vo.roundtrip = spec.roundtrip;
  RecordOptions ro;
  ro.verify_options = vo;
  const SampleRecord rec = make_record(cfg, params, ro);
  std::ostringstream csv;
  csv << kVerificationHeader;
  append_verification_row(csv, 0, 0, 0, rec);
  write_text(out / "verification.csv", csv.str());
  write_json(out / "report.json", report_json(*rec.report));

  json summary = run_header(spec, params);
  summary["input_n"] = cfg.n;
  summary["m"] = trace.size();
  summary["phi"] = trace.phi;
  summary["phi_bar"] = trace.phi_bar;
  summary["m_prime"] = trace.m_prime;
  summary["hard_failure"] = rec.report->hard_failure();
  summary["all_passed"] = rec.report->all_passed();
  write_json(out / "summary.json", summary);
  log << "transformed " << trace.size() << " particles, phi = " << trace.phi << "\n";
  if (rec.report->hard_failure()) {
    log << "property failure:\n" << report_json(*rec.report)["properties"].dump(2) << "\n";
    return kExitPropertyFailure;
  }
  return kExitOk;
}

int run_invert(const ExperimentSpec& spec, const fs::path& out, std::ostream& log) {
  const Configuration cfg = load_input(spec);
  const ModelParams params = derive_params(cfg.n, spec.z, spec.delta);
  InverseResult inv;
  try {
    inv = invert_with_trace(cfg, params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("input is not invertible: ") + e.what());
  }
  save_configuration(out / "inverted.json", inv.original);

  std::ostringstream lines;
  for (std::size_t k = 0; k < inv.order.size(); ++k) {
    lines << "{\"k\":" << k + 1 << ",\"id\":" << inv.order[k] << ",\"tau\":" << format_real(inv.shifts[k]) << "}\n";
  }
  write_text(out / "inverse_trace.jsonl", lines.str());

  // Re-applying the forward map must return the input.
  const bool preimage_valid = is_hard_core(inv.original);
  double err = INFINITY;
  if (preimage_valid) {
    const Configuration again = apply(inv.original, build_forward(inv.original, params), Direction::Forward);
    err = 0.0;
    for (std::size_t i = 0; i < again.interior.size(); ++i) {
      err = std::max({err, std::fabs(again.interior[i].x - cfg.interior[i].x),
                      std::fabs(again.interior[i].y - cfg.interior[i].y)});
    }
  }
  json summary = run_header(spec, params);
  summary["input_n"] = cfg.n;
  summary["m"] = inv.order.size();
  summary["preimage_hard_core"] = preimage_valid;
  summary["roundtrip_error"] = err;
  const bool ok = preimage_valid && err <= VerifyOptions{}.roundtrip_tol && inv.original.boundary == cfg.boundary;
  summary["hard_failure"] = !ok;
  write_json(out / "summary.json", summary);
  log << "inverted " << inv.order.size() << " particles, round-trip error " << err << "\n";
  return ok ? kExitOk : kExitPropertyFailure;
}

struct Aggregate {
  std::size_t samples = 0;
  std::size_t hard_failures = 0;
  std::size_t all_passed = 0;
  std::map<std::string, std::size_t> failures;
  std::map<std::string, std::size_t> checked;
  std::map<std::string, std::string> witness;
  double max_roundtrip = 0.0;
  double max_shift = 0.0;
  double max_jacobian_err = 0.0;
  std::size_t jacobian_checked = 0;
};

void accumulate(Aggregate& a, std::size_t sample, const SampleRecord& r) {
  ++a.samples;
  a.max_shift = std::max(a.max_shift, r.max_shift);
  if (r.jacobian_rel_err) {
    ++a.jacobian_checked;
    a.max_jacobian_err = std::max(a.max_jacobian_err, *r.jacobian_rel_err);
  }
  if (!r.report) return;
  const VerificationReport& v = *r.report;
  a.hard_failures += v.hard_failure();
  a.all_passed += v.all_passed();
  a.max_roundtrip = std::max(a.max_roundtrip, v.roundtrip_error);
  const std::pair<const char*, const PropertyCheck*> checks[] = {
      {"boundary_fixed", &v.boundary_fixed}, {"center_shift", &v.center_shift},
      {"lipschitz", &v.lipschitz},           {"roundtrip", &v.roundtrip},
      {"hard_core", &v.hard_core},           {"monotonicity", &v.monotonicity},
      {"density_positive", &v.density_positive}, {"chain_bounds", &v.chain_bounds},
      {"no_flattening", &v.no_flattening}};
  for (const auto& [name, c] : checks) {
    a.checked[name] += c->checked;
    if (c->passed) {
      a.failures.try_emplace(name, 0);
      continue;
    }
    if (a.failures[name]++ == 0) a.witness[name] = "sample " + std::to_string(sample) + ": " + c->witness;
  }
}

json aggregate_json(const Aggregate& a) {
  json props = json::object();
  for (const auto& [name, f] : a.failures) {
    props[name] = {{"checked", a.checked.at(name)}, {"failures", f}};
    if (f) props[name]["witness"] = a.witness.at(name);
  }
  return {{"samples", a.samples},
          {"hard_failures", a.hard_failures},
          {"all_passed_samples", a.all_passed},
          {"properties", props},
          {"max_roundtrip_error", a.max_roundtrip},
          {"max_shift", a.max_shift},
          {"jacobian", {{"checked", a.jacobian_checked}, {"max_rel_err", a.max_jacobian_err}}}};
}

int run_verify(const ExperimentSpec& spec, const fs::path& out, std::ostream& log, bool full) {
  const ModelParams params = derive_params(spec.n, spec.z, spec.delta);
  const auto boundary = make_boundary(spec, spec.n);
  RecordOptions ro;
  ro.verify = full;
  ro.verify_options.roundtrip = spec.roundtrip;
  ro.jacobian = full;
  if (full) ro.functions = default_test_functions(params);
  const auto per_chain = chain_records(params, boundary, schedule_of(spec), spec.seed, spec.chains, ro);

  std::ostringstream csv;
  csv << kVerificationHeader;
  Aggregate agg;
  std::vector<char> good;
  std::vector<double> logs;
  std::vector<CovTerms> terms;
  std::vector<double> reach_excess;
  std::size_t sample = 0;
  for (std::size_t c = 0; c < per_chain.size(); ++c) {
    for (std::size_t i = 0; i < per_chain[c].size(); ++i, ++sample) {
      const SampleRecord& r = per_chain[c][i];
      append_verification_row(csv, sample, c, i, r);
      accumulate(agg, sample, r);
      good.push_back(r.good ? 1 : 0);
      logs.push_back(r.log_phi_phi_bar);
      reach_excess.push_back(r.reach_excess);
      if (full) terms.push_back(r.terms);
    }
  }
  write_text(out / "verification.csv", csv.str());

  const BoundStats bounds = bound_checks(good, logs, params);
  json summary = run_header(spec, params);
  if (!bounds.warning.empty()) log << "warning: " << bounds.warning << "\n";

  if (!full) {
    write_json(out / "bounds.json", bounds_json(bounds));
    summary["bounds"] = bounds_json(bounds);
    write_json(out / "summary.json", summary);
    log << "good fraction " << bounds.good_fraction << ", mean |log phi phi_bar| "
        << bounds.abs_log_phi_phi_bar.mean << "\n";
    return kExitOk;
  }

  json report = aggregate_json(agg);
  report["params"] = params_json(params);
  report["good_fraction"] = bounds.good_fraction;
  report["abs_log_phi_phi_bar"] = estimate_json(bounds.abs_log_phi_phi_bar);
  report["cluster_reach_excess"] = {
      {"mean", batch_mean(reach_excess).mean},
      {"max", reach_excess.empty() ? 0.0 : *std::max_element(reach_excess.begin(), reach_excess.end())},
      {"allowance", 3.0 * params.ln_n}};
  const auto fns = default_test_functions(params);
  json cov = json::array();
  for (const DiscrepancyRow& row : change_of_variables_check(terms, fns)) {
    cov.push_back({{"function", row.name},
                   {"weighted", estimate_json(row.weighted)},
                   {"plain", estimate_json(row.plain)},
                   {"difference", estimate_json(row.difference)},
                   {"studentized", row.studentized}});
  }
  report["change_of_variables"] = cov;
  write_json(out / "report.json", report);

  summary["hard_failures"] = agg.hard_failures;
  summary["all_passed"] = agg.all_passed == agg.samples;
  summary["good_fraction"] = bounds.good_fraction;
  write_json(out / "summary.json", summary);

  log << "verified " << agg.samples << " samples: " << agg.all_passed << " passed every check, " << agg.hard_failures
      << " hard failures\n";
  if (agg.hard_failures) {
    log << "property failure:\n" << report["properties"].dump(2) << "\n";
    return kExitPropertyFailure;
  }
  return kExitOk;
}

DisplacementStats measure_displacement(const ExperimentSpec& spec, int n, double delta, std::uint64_t seed,
                                       BoundStats* bounds, double* mean_count) {
  const ModelParams params = derive_params(n, spec.z, delta);
  try {
    require_anchor(spec.anchor, params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  RecordOptions ro;
  ro.verify = false;
  ro.rule = unique_near_anchor_rule(spec.anchor, spec.radius);
  ro.anchor = spec.anchor;
  const auto records =
      concat(chain_records(params, make_boundary(spec, n), schedule_of(spec), seed, spec.chains, ro));
  std::vector<TaggedSample> tagged;
  std::vector<char> good;
  std::vector<double> logs;
  double count = 0.0;
  for (const SampleRecord& r : records) {
    tagged.push_back(*r.tagged);
    good.push_back(r.good ? 1 : 0);
    logs.push_back(r.log_phi_phi_bar);
    count += static_cast<double>(r.m);
  }
  if (bounds) *bounds = bound_checks(good, logs, params);
  if (mean_count) *mean_count = records.empty() ? 0.0 : count / static_cast<double>(records.size());
  return tagged_displacement(tagged, params);
}

int run_msd(const ExperimentSpec& spec, const fs::path& out, std::ostream& log) {
  const ModelParams params = derive_params(spec.n, spec.z, spec.delta);
  const DisplacementStats d = measure_displacement(spec, spec.n, spec.delta, spec.seed, nullptr, nullptr);
  json j = displacement_json(d);
  j["anchor"] = {spec.anchor.x, spec.anchor.y};
  j["radius"] = spec.radius;
  write_json(out / "msd.json", j);
  json summary = run_header(spec, params);
  summary["msd"] = j;
  write_json(out / "summary.json", summary);
  log << "P(present) " << d.p_present << ", P(far) " << d.p_far << ", msd " << d.msd.mean << " ("
      << d.premise_note << ")\n";
  return kExitOk;
}

int run_sweep(const ExperimentSpec& spec, const fs::path& out, std::ostream& log) {
  const std::vector<int> ns = spec.sweep_n.empty() ? std::vector<int>{spec.n} : spec.sweep_n;
  const std::vector<double> deltas = spec.sweep_delta.empty() ? std::vector<double>{spec.delta} : spec.sweep_delta;
  std::ostringstream csv;
  csv << "n,z,delta,epsilon,target_shift,sqrt_log_n,samples,mean_count,good_fraction,bad_upper99,"
         "mean_abs_log_phi_phi_bar,se_abs_log_phi_phi_bar,abs_log_bound,p_present,p_far,p_far_lower,p_far_upper,"
         "msd,msd_se,msd_bound,compatible_fraction,premise_met\n";
  std::uint64_t point = 0;
  json points = json::array();
  for (const int n : ns) {
    for (const double delta : deltas) {
      const ModelParams p = derive_params(n, spec.z, delta);
      const std::uint64_t seed = derive_seed(spec.seed, point);
      BoundStats b;
      double mean_count = 0.0;
      const DisplacementStats d = measure_displacement(spec, n, delta, seed, &b, &mean_count);
      csv << n << ',' << format_real(spec.z) << ',' << format_real(delta) << ',' << format_real(p.epsilon) << ','
          << format_real(p.target_shift) << ',' << format_real(std::sqrt(p.ln_n)) << ',' << b.samples << ','
          << format_real(mean_count) << ',' << format_real(b.good_fraction) << ',' << format_real(b.bad_upper99)
          << ',' << format_real(b.abs_log_phi_phi_bar.mean) << ',' << format_real(b.abs_log_phi_phi_bar.se) << ','
          << format_real(b.abs_log_bound) << ',' << format_real(d.p_present) << ',' << format_real(d.p_far) << ','
          << format_real(d.p_far_ci.lower) << ',' << format_real(d.p_far_ci.upper) << ','
          << format_real(d.msd.mean) << ',' << format_real(d.msd.se) << ',' << format_real(d.msd_bound) << ','
          << format_real(d.compatible_fraction) << ',' << (d.premise_met ? 1 : 0) << '\n';
      points.push_back({{"n", n}, {"delta", delta}, {"seed", seed}});
      log << "n=" << n << " delta=" << delta << ": mean |log phi phi_bar| " << b.abs_log_phi_phi_bar.mean
          << ", msd " << d.msd.mean << "\n";
      ++point;
    }
  }
  write_text(out / "sweep.csv", csv.str());
  json summary = run_header(spec, derive_params(spec.n, spec.z, spec.delta));
  summary["points"] = points;
  summary["point_seed_rule"] = "point p uses derive_seed(seed, p) as its master seed";
  write_json(out / "summary.json", summary);
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

json spec_to_json(const ExperimentSpec& s) {
  return {{"task", s.task},
          {"n", s.n},
          {"z", s.z},
          {"delta", s.delta},
          {"boundary", s.boundary},
          {"spacing", s.spacing},
          {"burn_in", s.burn_in},
          {"samples", s.samples},
          {"thin", s.thin},
          {"seed", s.seed},
          {"chains", s.chains},
          {"out", s.out},
          {"input", s.input},
          {"roundtrip", s.roundtrip},
          {"dump_envelope", s.dump_envelope},
          {"anchor", {s.anchor.x, s.anchor.y}},
          {"radius", s.radius},
          {"sweep_n", s.sweep_n},
          {"sweep_delta", s.sweep_delta}};
}

ExperimentSpec spec_from_json(const json& j, ExperimentSpec s) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  const json known = spec_to_json(s);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }
  read_key(j, "task", s.task);
  read_key(j, "n", s.n);
  read_key(j, "z", s.z);
  read_key(j, "delta", s.delta);
  read_key(j, "boundary", s.boundary);
  read_key(j, "spacing", s.spacing);
  read_key(j, "burn_in", s.burn_in);
  read_key(j, "samples", s.samples);
  read_key(j, "thin", s.thin);
  read_key(j, "seed", s.seed);
  read_key(j, "chains", s.chains);
  read_key(j, "out", s.out);
  read_key(j, "input", s.input);
  read_key(j, "roundtrip", s.roundtrip);
  read_key(j, "dump_envelope", s.dump_envelope);
  read_key(j, "radius", s.radius);
  read_key(j, "sweep_n", s.sweep_n);
  read_key(j, "sweep_delta", s.sweep_delta);
  if (j.contains("anchor")) {
    std::vector<double> a;
    read_key(j, "anchor", a);
    if (a.size() != 2) throw UsageError("config key 'anchor' must be [x, y]");
    s.anchor = {a[0], a[1]};
  }
  return s;
}

ExperimentSpec load_spec(const fs::path& path, ExperimentSpec base) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError("malformed config file " + path.string() + ": " + e.what());
  }
  return spec_from_json(j, std::move(base));
}

void validate(const ExperimentSpec& s) {
  if (!kTasks.count(s.task)) throw UsageError("unknown task '" + s.task + "'");
  const auto check_params = [](int n, double z, double delta) {
    try {
      derive_params(n, z, delta);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  };
  check_params(s.n, s.z, s.delta);
  for (const int n : s.sweep_n) check_params(n, s.z, s.delta);
  for (const double d : s.sweep_delta) check_params(s.n, s.z, d);
  if (s.chains < 1) throw UsageError("chains must be >= 1");
  if (s.thin < 1) throw UsageError("thin must be >= 1");
  if (!(s.spacing > 1.0) || !std::isfinite(s.spacing)) throw UsageError("spacing must exceed 1");
  if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw UsageError("radius must be positive");
  if (s.out.empty()) throw UsageError("output directory must be given");
  if (s.boundary != "triangular" && s.boundary != "empty" && s.boundary.rfind("file:", 0) != 0) {
    throw UsageError("boundary must be triangular, empty or file:PATH");
  }
  if ((s.task == "transform" || s.task == "invert") && s.input.empty()) {
    throw UsageError("task " + s.task + " needs --input");
  }
}

std::vector<Point> make_boundary(const ExperimentSpec& spec, int n) {
  if (spec.boundary == "empty") return {};
  if (spec.boundary == "triangular") return boundary_triangular(n, spec.spacing);
  const std::string path = spec.boundary.substr(5);
  Configuration cfg;
  try {
    cfg = load_configuration(path, n);
  } catch (const std::exception& e) {
    throw UsageError("cannot read boundary file " + path + ": " + e.what());
  }
  for (const Point& p : cfg.boundary) {
    if (!(max_norm(p) > n)) throw UsageError("boundary file has a particle inside the box");
  }
  return cfg.boundary;
}

std::vector<std::uint64_t> chain_seeds(std::uint64_t master, int chains) {
  std::vector<std::uint64_t> seeds;
  for (int c = 0; c < chains; ++c) seeds.push_back(derive_seed(master, static_cast<std::uint64_t>(c)));
  return seeds;
}

int run(const ExperimentSpec& spec, std::ostream& log) {
  validate(spec);
  const fs::path out(spec.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw UsageError("cannot create output directory " + spec.out + ": " + ec.message());

  if (spec.task == "sample") return run_sample(spec, out, log);
  if (spec.task == "transform") return run_transform(spec, out, log);
  if (spec.task == "invert") return run_invert(spec, out, log);
  if (spec.task == "verify") return run_verify(spec, out, log, true);
  if (spec.task == "bounds") return run_verify(spec, out, log, false);
  if (spec.task == "msd") return run_msd(spec, out, log);
  return run_sweep(spec, out, log);
}

}  // namespace hardshift
