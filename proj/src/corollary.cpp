#include "coxbalance/corollary.hpp"

#include <cmath>

namespace coxbalance {

CorollaryBounds corollary_bounds(const SystemConfig& cfg) {
  if (!cfg.heavy_traffic)
    throw ConfigError("corollary_bounds: heavy_traffic (alpha, beta) is required");
  DerivedConstants c = derived_constants(cfg);
  const double alpha = cfg.heavy_traffic->alpha;
  const double n = static_cast<double>(c.n);
  const double b = static_cast<double>(c.b);
  const double slack = b - c.lambda;

  CorollaryBounds out;
  out.theorem_bound = 7.0 * c.mu_max / (c.sqrt_n * c.log_n);
  out.mean_wait_bound =
      2.0 * c.k * c.x +
      (14.0 * c.mu_max + 16.0 * c.mu_max / slack) / (c.sqrt_n * c.log_n);
  out.p_wait_bound_jsq_pod =
      1.0 / n + c.mu_max / c.lambda *
                    (c.k * c.x + (7.0 * c.mu_max + 8.0 * c.mu_max / slack) /
                                     (c.sqrt_n * c.log_n));
  out.p_wait_bound_jiq_i1f =
      14.0 * c.mu_max / (std::pow(n, 0.5 - alpha) * c.log_n);
  out.p_block_bound = 8.0 * c.mu_max / (slack * c.sqrt_n * c.log_n);

  out.n_condition = large_n_condition(c, alpha);
  out.jsq_pod_condition =
      c.sqrt_n >= 8.0 * c.k * c.log_n / slack +
                      8.0 * b * std::pow(n, 0.5 - alpha) / (slack * c.mu1);
  out.jiq_i1f_condition = std::pow(n, 0.5 - alpha) >= 2.0 * c.k * c.log_n;
  out.pod_d_min = c.mu1 * std::pow(n, alpha) * c.log_n;
  return out;
}

}  // namespace coxbalance
