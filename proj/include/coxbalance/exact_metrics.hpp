#pragma once

#include <vector>

#include "coxbalance/stationary.hpp"

namespace coxbalance {

// Steady-state performance metrics computed exactly from pi.
//   p_wait  = E[A_1(S)]   (PASTA: probability an arrival joins a busy server)
//   p_block = E[A_b(S)]   (probability an arrival is blocked)
//   mean_wait by Little's law on the queueing (non-service) time:
//             E[sum_i S_i] / (lambda (1 - p_block)) - 1.
// The collapse/excess fields need the normalized-service constants and are
// flagged absent otherwise.
struct ExactMetrics {
  std::vector<double> mean_s;  // E[S_{i,m}], row-major (i-1)*2 + (m-1)
  double mean_total = 0.0;     // E[sum_i S_i]
  double p_wait = 0.0;
  double p_block = 0.0;
  double mean_wait = 0.0;
  bool mean_wait_defined = false;
  double p_not_ssc = 0.0;
  double excess_mean = 0.0;  // E[max{sum_i S_i - eta, 0}]
  bool ssc_defined = false;
};

ExactMetrics exact_metrics(const StateSpace& space, const std::vector<double>& pi,
                           const PolicyKind& policy, const SystemConfig& cfg);

}  // namespace coxbalance
