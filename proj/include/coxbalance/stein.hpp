#pragma once

#include <cstdint>
#include <optional>

#include "coxbalance/constants.hpp"
#include "coxbalance/exact_metrics.hpp"
#include "coxbalance/stationary.hpp"

namespace coxbalance {

// Solution of the one-sided Stein equation for the excess functional
// h(x) = max{x - eta, 0}:
//   g(x)  = -(sqrt(n)/(2 log n)) (x - eta)^2  for x >= eta, 0 below,
//   g'(x) = -(sqrt(n)/log n) (x - eta)        for x >= eta, 0 below,
//   g''(x)= -(sqrt(n)/log n)                  for x >  eta, 0 below.
// Pointwise, g'(x) * (-log n / sqrt n) == h(x).
struct SteinFn {
  double eta = 0.0;
  double scale = 0.0;  // sqrt(n)/log(n)
  double drift_coeff = 0.0;  // log(n)/sqrt(n)

  static SteinFn make(double eta, int64_t n);
  static SteinFn from(const DerivedConstants& c) { return make(c.eta, c.n); }

  double g(double x) const {
    double e = x - eta;
    return e >= 0.0 ? -0.5 * scale * e * e : 0.0;
  }
  double g_prime(double x) const {
    double e = x - eta;
    return e >= 0.0 ? -scale * e : 0.0;
  }
  double g_double_prime(double x) const { return x > eta ? -scale : 0.0; }
  double h(double x) const { return x > eta ? x - eta : 0.0; }
};

// Checks the gradient envelopes used by the expansion:
//   |g'(x)|  <= 2/(sqrt(n) log n)   on [eta - 2/n, eta + 2/n]
//   |g''(x)| <= sqrt(n)/log n       for x > eta
// on a deterministic grid plus seeded random points. slack > 0 means a
// violation of that size.
struct GradientBoundReport {
  int64_t points = 0;
  int64_t violations_g_prime = 0;
  int64_t violations_g_double_prime = 0;
  double worst_slack_g_prime = 0.0;       // max |g'| - bound
  double worst_slack_g_double_prime = 0.0;
  bool ok() const {
    return violations_g_prime == 0 && violations_g_double_prime == 0;
  }
};

GradientBoundReport gradient_bound_check(const SteinFn& fn, int64_t n,
                                         int64_t random_points = 10000,
                                         uint64_t seed = 1);

// Exact decomposition of the stationary excess expectation:
//   E[h(Sum S)] = J1 + J23, where
//   J1 = E[g'(Sum S) (lambda A_b(S) - lambda - log n/sqrt n + d1(S));
//        Sum S > eta + 1/n]
// and J23 = E[h] - J1 collects the generator-expansion remainder. Uses
// E[G g] = 0, so |stein_residual| (the identity check) should vanish.
struct SteinDecomposition {
  double e_h = 0.0;
  double j1 = 0.0;
  double j23 = 0.0;
  double stein_residual = 0.0;  // E_h - (E[g' * (-logn/sqrtn)] - E[G g])
  double j23_bound = 0.0;       // 6 mu_max / (sqrt n log n)
  bool bound_applicable = false;  // large-n side condition
  bool bound_holds = false;
};

SteinDecomposition stein_decomposition(const StateSpace& space,
                                       const std::vector<double>& pi,
                                       const PolicyKind& policy,
                                       const SystemConfig& cfg,
                                       std::optional<double> eta_override = {});

// Two-sided condition on n for the remainder bound (and the corollaries):
//   w_l n^{1/2 - alpha} / (1 + mu1 + mu2) >= log n, and
//   log n >= 3.5 / min{mu1/(16 mu_max), mu2/(12 mu_max), mu1 mu2/(40 mu_max)}.
bool large_n_condition(const DerivedConstants& c, double alpha);

}  // namespace coxbalance
