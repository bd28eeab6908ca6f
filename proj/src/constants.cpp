#include "coxbalance/constants.hpp"

#include <algorithm>
#include <cmath>

namespace coxbalance {

DerivedConstants derived_constants(const SystemConfig& cfg) {
  cfg.coxian.validate();
  if (!cfg.coxian.normalized())
    throw ConfigError("derived_constants: mean service time must be 1 (got " +
                      std::to_string(cfg.coxian.mean_service_time()) + ")");
  DerivedConstants c;
  c.n = cfg.n;
  c.b = cfg.b;
  c.lambda = cfg.lambda;
  c.mu1 = cfg.coxian.mu1;
  c.mu2 = cfg.coxian.mu2;
  c.p = cfg.coxian.p;

  c.w_u = std::max((1.0 - c.p) * c.mu1, c.mu2);
  c.w_l = std::min((1.0 - c.p) * c.mu1, c.mu2);
  c.mu_max = std::max(c.mu1, c.mu2);

  // Shared factor; c1 and k are built from the same intermediates so that
  // k - c1 == (1+mu1+mu2)/w_l holds exactly in floating point.
  double ratio = (1.0 + c.mu1 + c.mu2) / c.w_l;
  double base = ratio + 2.0 * c.mu1;
  double scaled = (c.w_u * static_cast<double>(c.b) / c.w_l) * base;
  c.c1 = scaled + 2.0 * c.mu1;
  c.k = c.c1 + ratio;
  c.k_minus_c1 = ratio;

  c.log_n = std::log(static_cast<double>(c.n));
  c.sqrt_n = std::sqrt(static_cast<double>(c.n));
  c.x = c.log_n / c.sqrt_n;
  c.eta = c.lambda + c.k * c.x;
  c.l11 = c.lambda / c.mu1 - c.x;
  c.l12 = c.p * c.lambda / c.mu2 - c.mu1 * c.x;
  c.t_q_bar = std::min(1.0 / c.mu1, 1.0 / c.mu2);
  return c;
}

}  // namespace coxbalance
