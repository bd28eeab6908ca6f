#include "coxbalance/stats.hpp"

#include <cmath>
#include <limits>

namespace coxbalance {

namespace {

Estimate finish(double mean, std::span<const double> batch_means) {
  Estimate e;
  e.mean = mean;
  e.batches = static_cast<int64_t>(batch_means.size());
  if (e.batches < 2) {
    e.ci95 = e.ci99 = std::numeric_limits<double>::infinity();
    return e;
  }
  double m = 0.0;
  for (double v : batch_means) m += v;
  m /= static_cast<double>(e.batches);
  double ss = 0.0;
  for (double v : batch_means) ss += (v - m) * (v - m);
  double se = std::sqrt(ss / static_cast<double>(e.batches - 1) /
                        static_cast<double>(e.batches));
  e.ci95 = student_t_quantile(0.975, e.batches - 1) * se;
  e.ci99 = student_t_quantile(0.995, e.batches - 1) * se;
  return e;
}

}  // namespace

Estimate estimate_from_batches(std::span<const double> batch_means) {
  double m = 0.0;
  for (double v : batch_means) m += v;
  if (!batch_means.empty()) m /= static_cast<double>(batch_means.size());
  return finish(m, batch_means);
}

Estimate estimate_with_mean(double mean, std::span<const double> batch_means) {
  return finish(mean, batch_means);
}

}  // namespace coxbalance
