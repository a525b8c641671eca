#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hardshift/analysis.hpp"
#include "hardshift/sampler.hpp"

namespace hardshift {

/// OpenMP worker count: HARDSHIFT_THREADS if set and positive, otherwise the
/// OpenMP default.
int worker_threads();

struct RecordOptions {
  bool verify = true;  // full property suite; otherwise only trace-derived values
  VerifyOptions verify_options;
  std::vector<TestFunction> functions;  // change-of-variables terms, may be empty
  std::optional<ParticleRule> rule;     // tagged particle, may be empty
  Point anchor;
  bool jacobian = false;  // FD Jacobian check for m <= 12 away from switch loci
};

/// Everything the Monte Carlo summaries need from one configuration.
struct SampleRecord {
  std::size_t m = 0;
  bool good = true;
  double phi = 1.0;
  double phi_bar = 1.0;
  double log_phi_phi_bar = 0.0;
  double max_shift = 0.0;
  double reach_excess = 0.0;  // max over particles of reach - |x|
  std::optional<VerificationReport> report;
  std::optional<double> jacobian_rel_err;
  CovTerms terms;
  std::optional<TaggedSample> tagged;
};

SampleRecord make_record(const Configuration& cfg, const ModelParams& params, const RecordOptions& options);

/// One record per configuration, computed in parallel. Output order matches input.
std::vector<SampleRecord> record_batch(std::span<const Configuration> samples, const ModelParams& params,
                                       const RecordOptions& options);
/// Single-threaded reference for record_batch.
std::vector<SampleRecord> record_batch_serial(std::span<const Configuration> samples, const ModelParams& params,
                                              const RecordOptions& options);

/// Independent chains with seeds derive_seed(master, c), run in parallel.
/// Result c holds the samples of chain c; identical for any thread count.
std::vector<std::vector<Configuration>> sample_chains(int n, double z, const std::vector<Point>& boundary,
                                                      const SampleSchedule& schedule, std::uint64_t master_seed,
                                                      int chains);

/// Like sample_chains, but reduces each sample to a record inside the chain so
/// that configurations are never stored.
std::vector<std::vector<SampleRecord>> chain_records(const ModelParams& params, const std::vector<Point>& boundary,
                                                     const SampleSchedule& schedule, std::uint64_t master_seed,
                                                     int chains, const RecordOptions& options);

/// Concatenates per-chain results in chain order.
template <typename T>
std::vector<T> concat(std::vector<std::vector<T>>&& parts) {
  std::vector<T> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) {
    for (auto& v : p) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace hardshift
