#pragma once

#include "coxbalance/types.hpp"

namespace coxbalance {

// Constants used throughout the steady-state bounds, all derived from
// (mu1, mu2, p, b, lambda, n) with mean service time normalized to 1:
//   w_u = max{(1-p)mu1, mu2},   w_l = min{(1-p)mu1, mu2}
//   k   = (1 + w_u b / w_l) * ((1+mu1+mu2)/w_l + 2 mu1)
//   c1  = (w_u b / w_l) * ((1+mu1+mu2)/w_l + 2 mu1) + 2 mu1
//   k - c1 = (1+mu1+mu2)/w_l    (held exactly, by construction)
//   eta = lambda + k log(n)/sqrt(n)    (tail threshold for total occupancy)
//   L11 = lambda/mu1 - log(n)/sqrt(n), L12 = p*lambda/mu2 - mu1 log(n)/sqrt(n)
struct DerivedConstants {
  int64_t n = 0;
  int b = 0;
  double lambda = 0.0;
  double mu1 = 0.0, mu2 = 0.0, p = 0.0;

  double w_u = 0.0, w_l = 0.0, mu_max = 0.0;
  double k = 0.0, c1 = 0.0, k_minus_c1 = 0.0;
  double log_n = 0.0, sqrt_n = 0.0;
  double x = 0.0;  // log(n)/sqrt(n)
  double eta = 0.0;
  double l11 = 0.0, l12 = 0.0;
  double t_q_bar = 0.0;  // min{1/mu1, 1/mu2}
};

// Throws ConfigError unless the Coxian mean service time is 1 (within 1e-9):
// the constants are meaningless without that normalization.
DerivedConstants derived_constants(const SystemConfig& cfg);

}  // namespace coxbalance
