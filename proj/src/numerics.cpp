#include "coxbalance/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coxbalance {

double lchoose(int64_t n, int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double hypergeom_all_marked(int64_t k, int64_t n, int64_t d) {
  if (d < 0 || d > n) throw std::invalid_argument("hypergeom: need 0 <= d <= n");
  if (k < d) return 0.0;
  if (k >= n) return 1.0;
  if (d == 0) return 1.0;
  if (d <= 64) {
    // Product of per-draw conditional probabilities; every factor <= 1.
    double prob = 1.0;
    for (int64_t t = 0; t < d; ++t) {
      prob *= static_cast<double>(k - t) / static_cast<double>(n - t);
    }
    return prob;
  }
  return std::exp(lchoose(k, d) - lchoose(n, d));
}

namespace {

// Continued fraction for the incomplete beta (Lentz's algorithm).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_quantile(double prob, int64_t df) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("student_t_quantile: prob must lie in (0,1)");
  if (df < 1) throw std::invalid_argument("student_t_quantile: df must be >= 1");
  if (prob == 0.5) return 0.0;
  bool upper = prob > 0.5;
  double target = upper ? prob : 1.0 - prob;
  double nu = static_cast<double>(df);
  // CDF(t) for t >= 0 in terms of the incomplete beta.
  auto cdf = [&](double t) {
    double xx = nu / (nu + t * t);
    return 1.0 - 0.5 * reg_inc_beta(0.5 * nu, 0.5, xx);
  };
  double lo = 0.0, hi = 1.0;
  while (cdf(hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * (1.0 + hi)) break;
  }
  double t = 0.5 * (lo + hi);
  return upper ? t : -t;
}

double zero_count_upper_bound(int64_t n, double conf) {
  if (n <= 0) return 1.0;
  if (!(conf > 0.0 && conf < 1.0))
    throw std::invalid_argument("zero_count_upper_bound: conf must lie in (0,1)");
  return 1.0 - std::pow(1.0 - conf, 1.0 / static_cast<double>(n));
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("ols_fit: x and y must have equal length");
  if (x.size() < 2) throw std::invalid_argument("ols_fit: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw std::invalid_argument("ols_fit: x values are constant");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = static_cast<int64_t>(x.size());
  if (syy <= 0.0) {
    fit.r2 = 1.0;  // y constant and matched exactly by slope 0
  } else {
    double ss_res = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      double e = y[i] - (fit.slope * x[i] + fit.intercept);
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace coxbalance
