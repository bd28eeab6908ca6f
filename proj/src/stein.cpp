#include "coxbalance/stein.hpp"

#include <cmath>

#include "coxbalance/events.hpp"
#include "coxbalance/policies.hpp"
#include "coxbalance/rng.hpp"

namespace coxbalance {

SteinFn SteinFn::make(double eta, int64_t n) {
  if (n < 2) throw ConfigError("stein: n must be >= 2 (log n must be positive)");
  SteinFn fn;
  fn.eta = eta;
  double logn = std::log(static_cast<double>(n));
  double sqrtn = std::sqrt(static_cast<double>(n));
  fn.scale = sqrtn / logn;
  fn.drift_coeff = logn / sqrtn;
  return fn;
}

GradientBoundReport gradient_bound_check(const SteinFn& fn, int64_t n,
                                         int64_t random_points, uint64_t seed) {
  GradientBoundReport rep;
  double inv_n = 1.0 / static_cast<double>(n);
  double gp_bound = 2.0 / (std::sqrt(static_cast<double>(n)) *
                           std::log(static_cast<double>(n)));
  double gpp_bound = fn.scale;
  auto check = [&](double x) {
    ++rep.points;
    if (std::abs(x - fn.eta) <= 2.0 * inv_n) {
      double slack = std::abs(fn.g_prime(x)) - gp_bound;
      rep.worst_slack_g_prime = std::max(rep.worst_slack_g_prime, slack);
      if (slack > 1e-15) ++rep.violations_g_prime;
    }
    if (x > fn.eta) {
      double slack = std::abs(fn.g_double_prime(x)) - gpp_bound;
      rep.worst_slack_g_double_prime =
          std::max(rep.worst_slack_g_double_prime, slack);
      if (slack > 1e-15) ++rep.violations_g_double_prime;
    }
  };
  // Deterministic sweep of the +-2/n window (endpoints included) plus a
  // wider band above eta for the second derivative.
  const int grid = 2001;
  for (int i = 0; i < grid; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    check(fn.eta - 2.0 * inv_n + 4.0 * inv_n * t);
    check(fn.eta + t * 2.0);  // [eta, eta + 2]
  }
  Xoshiro256pp rng(seed, /*stream=*/0x57e1);
  for (int64_t i = 0; i < random_points; ++i) {
    check(fn.eta - 2.0 * inv_n + 4.0 * inv_n * rng.uniform01());
    check(fn.eta + 2.0 * rng.uniform01());
  }
  return rep;
}

SteinDecomposition stein_decomposition(const StateSpace& space,
                                       const std::vector<double>& pi,
                                       const PolicyKind& policy,
                                       const SystemConfig& cfg,
                                       std::optional<double> eta_override) {
  DerivedConstants c = derived_constants(cfg);
  SteinFn fn = eta_override ? SteinFn::make(*eta_override, cfg.n) : SteinFn::from(c);

  SteinDecomposition dec;
  double e_gprime_coeff = 0.0;  // E[g'(Sum S)] * (-logn/sqrtn), accumulated
  double e_gen_g = 0.0;         // E[(G g)(S)]
  double inv_n = 1.0 / static_cast<double>(cfg.n);
  auto g_of_total = [&](const AggregateState& st) {
    return fn.g(st.suffix_fractions().total());
  };
  for (int64_t i = 0; i < space.size(); ++i) {
    double w = pi[static_cast<size_t>(i)];
    if (w == 0.0) continue;
    const AggregateState& st = space.state(i);
    auto s = st.suffix_fractions();
    double total = s.total();
    dec.e_h += w * fn.h(total);
    e_gprime_coeff += w * fn.g_prime(total) * (-fn.drift_coeff);
    auto routing = routing_distribution(policy, st);
    e_gen_g += w * apply_generator(g_of_total, st, routing, cfg);
    if (total > fn.eta + inv_n) {
      double d1 = (1.0 - cfg.coxian.p) * cfg.coxian.mu1 * s.s(1, 1) +
                  cfg.coxian.mu2 * s.s(1, 2);
      double coeff = cfg.lambda * routing.blocked() - cfg.lambda -
                     fn.drift_coeff + d1;
      dec.j1 += w * fn.g_prime(total) * coeff;
    }
  }
  dec.stein_residual = dec.e_h - (e_gprime_coeff - e_gen_g);
  dec.j23 = dec.e_h - dec.j1;
  dec.j23_bound = 6.0 * c.mu_max / (c.sqrt_n * c.log_n);
  double alpha = cfg.heavy_traffic ? cfg.heavy_traffic->alpha : 0.0;
  dec.bound_applicable = cfg.heavy_traffic && large_n_condition(c, alpha);
  dec.bound_holds = std::abs(dec.j23) <= dec.j23_bound;
  return dec;
}

bool large_n_condition(const DerivedConstants& c, double alpha) {
  double lhs = c.w_l * std::pow(static_cast<double>(c.n), 0.5 - alpha) /
               (1.0 + c.mu1 + c.mu2);
  if (!(lhs >= c.log_n)) return false;
  double m = std::min({c.mu1 / (16.0 * c.mu_max), c.mu2 / (12.0 * c.mu_max),
                       c.mu1 * c.mu2 / (40.0 * c.mu_max)});
  return c.log_n >= 3.5 / m;
}

}  // namespace coxbalance
