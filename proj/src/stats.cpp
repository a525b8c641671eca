#include "hardshift/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/beta.hpp>

namespace hardshift {

namespace {

MeanEstimate iid_mean(std::span<const double> v) {
  MeanEstimate e;
  e.count = v.size();
  if (v.empty()) return e;
  double sum = 0.0;
  for (const double x : v) sum += x;
  e.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return e;
  double ss = 0.0;
  for (const double x : v) ss += (x - e.mean) * (x - e.mean);
  e.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return e;
}

}  // namespace

MeanEstimate batch_mean(std::span<const double> values, std::size_t batches) {
  if (batches < 2 || values.size() < 2 * batches) return iid_mean(values);
  const std::size_t per = values.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * per;
    const std::size_t end = b + 1 == batches ? values.size() : begin + per;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    means[b] = s / static_cast<double>(end - begin);
  }
  MeanEstimate overall = iid_mean(values);
  const MeanEstimate of_batches = iid_mean(means);
  // Batches may differ in length by the remainder; the overall mean is exact.
  overall.se = of_batches.se;
  return overall;
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval iv;
  iv.lower = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1), alpha / 2);
  iv.upper = successes == trials ? 1.0
                                 : boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k), 1 - alpha / 2);
  return iv;
}

double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0) return 1.0;
  if (successes >= trials) return 1.0;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  return boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k), confidence);
}

}  // namespace hardshift
