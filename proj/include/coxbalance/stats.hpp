#pragma once

#include <cstdint>
#include <span>

#include "coxbalance/numerics.hpp"

namespace coxbalance {

// Point estimate with batch-means confidence half-widths (Student t).
struct Estimate {
  double mean = 0.0;
  double ci95 = 0.0;
  double ci99 = 0.0;
  int64_t batches = 0;
};

// Equal-weight batch means. With fewer than 2 batches the half-widths are
// infinite.
Estimate estimate_from_batches(std::span<const double> batch_means);

// Overall mean fixed externally (e.g. a ratio of totals), CI from batches.
Estimate estimate_with_mean(double mean, std::span<const double> batch_means);

}  // namespace coxbalance
