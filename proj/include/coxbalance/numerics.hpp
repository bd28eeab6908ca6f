#pragma once

#include <cstdint>
#include <span>

namespace coxbalance {

// log C(n, k); -inf when k > n or k < 0.
double lchoose(int64_t n, int64_t k);

// P(all d draws without replacement from an n-pool land in a marked subset
// of size k) = C(k, d) / C(n, d). Exact product for small d, log-gamma
// otherwise. Requires 0 <= d <= n.
double hypergeom_all_marked(int64_t k, int64_t n, int64_t d);

// Regularized incomplete beta I_x(a, b) via continued fraction.
double reg_inc_beta(double a, double b, double x);

// Student-t quantile: the t with P(T_df <= t) = prob, prob in (0, 1).
double student_t_quantile(double prob, int64_t df);

// Zero-count upper confidence bound for a binomial proportion: if 0 events
// are seen in n trials, p <= 1 - (1-conf)^(1/n) at confidence conf.
double zero_count_upper_bound(int64_t n, double conf);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int64_t points = 0;
};

// Ordinary least squares y ~ slope*x + intercept. Requires >= 2 points with
// non-constant x.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace coxbalance
