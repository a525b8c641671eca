#pragma once

#include <cstddef>
#include <span>

namespace hardshift {

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

/// Mean with batch-means standard error (contiguous batches, default 50).
/// Falls back to the iid estimate when there are fewer values than batches.
MeanEstimate batch_mean(std::span<const double> values, std::size_t batches = 50);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence);
/// Exact one-sided upper confidence bound for a binomial proportion.
double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence);

}  // namespace hardshift
