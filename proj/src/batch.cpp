#include "hardshift/batch.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>

#include <omp.h>

namespace hardshift {

namespace {

// Runs body(i) for i in [0, count) on the worker pool and rethrows the first
// exception on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_threads())
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

int worker_threads() {
  if (const char* env = std::getenv("HARDSHIFT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

SampleRecord make_record(const Configuration& cfg, const ModelParams& params, const RecordOptions& options) {
  SampleRecord r;
  r.m = cfg.interior.size();
  const TransformTrace trace = build_forward(cfg, params);
  const ClusterReport clusters = cluster_reach(cfg, params);
  r.good = clusters.good;
  r.reach_excess = clusters.worst_excess;
  if (options.verify) r.report = verify_properties(cfg, params, options.verify_options);
  r.phi = trace.phi;
  r.phi_bar = trace.phi_bar;
  r.log_phi_phi_bar = trace.log_phi + trace.log_phi_bar;
  for (const double t : trace.shifts) r.max_shift = std::max(r.max_shift, t);
  if (!options.functions.empty()) r.terms = change_of_variables_terms(cfg, trace, options.functions);
  if (options.jacobian && r.m >= 1 && r.m <= 12 && !near_switch_locus(cfg, params, 1e-4)) {
    r.jacobian_rel_err = std::fabs(fd_jacobian(cfg, params, 1e-6) - trace.phi) / trace.phi;
  }
  if (options.rule) r.tagged = tagged_sample(cfg, trace, *options.rule, options.anchor);
  return r;
}

std::vector<SampleRecord> record_batch(std::span<const Configuration> samples, const ModelParams& params,
                                       const RecordOptions& options) {
  std::vector<SampleRecord> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { out[i] = make_record(samples[i], params, options); });
  return out;
}

std::vector<SampleRecord> record_batch_serial(std::span<const Configuration> samples, const ModelParams& params,
                                              const RecordOptions& options) {
  std::vector<SampleRecord> out;
  out.reserve(samples.size());
  for (const Configuration& c : samples) out.push_back(make_record(c, params, options));
  return out;
}

std::vector<std::vector<Configuration>> sample_chains(int n, double z, const std::vector<Point>& boundary,
                                                      const SampleSchedule& schedule, std::uint64_t master_seed,
                                                      int chains) {
  std::vector<std::vector<Configuration>> out(static_cast<std::size_t>(std::max(chains, 0)));
  parallel_for(out.size(), [&](std::size_t c) {
    out[c] = sample(n, z, boundary, schedule, derive_seed(master_seed, c));
  });
  return out;
}

std::vector<std::vector<SampleRecord>> chain_records(const ModelParams& params, const std::vector<Point>& boundary,
                                                     const SampleSchedule& schedule, std::uint64_t master_seed,
                                                     int chains, const RecordOptions& options) {
  std::vector<std::vector<SampleRecord>> out(static_cast<std::size_t>(std::max(chains, 0)));
  parallel_for(out.size(), [&](std::size_t c) {
    out[c].reserve(schedule.samples);
    run_chain(params.n, params.z, boundary, schedule, derive_seed(master_seed, c),
              [&](const Configuration& cfg, std::size_t) { out[c].push_back(make_record(cfg, params, options)); });
  });
  return out;
}

}  // namespace hardshift
