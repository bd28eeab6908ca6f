#pragma once

#include "coxbalance/constants.hpp"
#include "coxbalance/stein.hpp"

namespace coxbalance {

// Closed-form steady-state bounds in the heavy-traffic regime
// lambda = 1 - beta n^-alpha, together with their side conditions. The
// bounds are upper bounds whenever the flags hold; below the flagged n they
// are still well-defined numbers, just not guaranteed.
struct CorollaryBounds {
  double theorem_bound = 0.0;  // E[max{Sum S - eta, 0}] <= 7 mu_max/(sqrt n log n)
  double mean_wait_bound = 0.0;        // E[W], JSQ/Pod
  double p_wait_bound_jsq_pod = 0.0;   // P(W), JSQ/Pod
  double p_wait_bound_jiq_i1f = 0.0;   // P(W), JIQ/I1F
  double p_block_bound = 0.0;          // P(B), all four policies

  bool n_condition = false;          // two-sided large-n condition
  bool jsq_pod_condition = false;    // sqrt n >= 8k log n/(b-lambda) + 8b n^{1/2-alpha}/((b-lambda) mu1)
  bool jiq_i1f_condition = false;    // n^{1/2-alpha} >= 2k log n
  double pod_d_min = 0.0;            // Pod needs d >= mu1 n^alpha log n
};

// Requires cfg.heavy_traffic (the bounds are stated in terms of alpha).
CorollaryBounds corollary_bounds(const SystemConfig& cfg);

}  // namespace coxbalance
