#include <cmath>
#include <vector>

#include "doctest.h"

#include "coxbalance/corollary.hpp"

using namespace coxbalance;

namespace {

SystemConfig heavy_config(int64_t n, double alpha = 0.3, double beta = 1.0,
                          int b = 4, CoxianParams cox = {2.0, 1.0, 0.5}) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.b = b;
  cfg.coxian = cox;
  cfg.heavy_traffic = HeavyTraffic{alpha, beta};
  cfg.lambda = heavy_traffic_lambda(alpha, beta, n);
  return cfg;
}

}  // namespace

TEST_CASE("heavy-traffic arrival rate parametrization") {
  CHECK(heavy_traffic_lambda(0.3, 1.0, 1) == 0.0);
  CHECK(heavy_traffic_lambda(0.25, 1.0, 10000) ==
        doctest::Approx(0.9).epsilon(1e-15));
  CHECK(heavy_traffic_lambda(0.3, 2.0, 64000) ==
        doctest::Approx(1.0 - 2.0 * std::pow(64000.0, -0.3)).epsilon(1e-15));
}

TEST_CASE("bound fixtures at n = 64000") {
  SystemConfig cfg = heavy_config(64000);
  CorollaryBounds bounds = corollary_bounds(cfg);

  double sqrt_n = std::sqrt(64000.0);
  double log_n = std::log(64000.0);
  CHECK(bounds.theorem_bound ==
        doctest::Approx(14.0 / (sqrt_n * log_n)).epsilon(1e-14));
  // Idle-seeking policies decay at the slower n^{1/2-alpha} rate.
  CHECK(bounds.p_wait_bound_jiq_i1f ==
        doctest::Approx(0.276633).epsilon(1e-4));
  CHECK(bounds.p_wait_bound_jiq_i1f ==
        doctest::Approx(28.0 / (std::pow(64000.0, 0.2) * log_n)).epsilon(1e-14));
  CHECK(bounds.pod_d_min ==
        doctest::Approx(2.0 * std::pow(64000.0, 0.3) * log_n).epsilon(1e-14));
  CHECK(bounds.pod_d_min == doctest::Approx(612.2).epsilon(1e-3));

  double slack = 4.0 - cfg.lambda;
  CHECK(bounds.p_block_bound ==
        doctest::Approx(16.0 / (slack * sqrt_n * log_n)).epsilon(1e-14));
  double x = log_n / sqrt_n;
  CHECK(bounds.mean_wait_bound ==
        doctest::Approx(80.0 * x + (28.0 + 32.0 / slack) / (sqrt_n * log_n))
            .epsilon(1e-14));
  CHECK(bounds.p_wait_bound_jsq_pod ==
        doctest::Approx(1.0 / 64000.0 +
                        2.0 / cfg.lambda *
                            (40.0 * x + (14.0 + 16.0 / slack) / (sqrt_n * log_n)))
            .epsilon(1e-14));
}

TEST_CASE("side conditions stay honest at desk scale") {
  // jiq/i1f: n^{0.2} >= 2k log n needs n beyond 10^40 for k = 40.
  CHECK_FALSE(corollary_bounds(heavy_config(100)).jiq_i1f_condition);
  CHECK_FALSE(corollary_bounds(heavy_config(64000)).jiq_i1f_condition);
  CHECK_FALSE(corollary_bounds(heavy_config(64000)).jsq_pod_condition);
  CHECK_FALSE(corollary_bounds(heavy_config(64000)).n_condition);
}

TEST_CASE("every bound shrinks as n grows") {
  std::vector<int64_t> grid = {250, 1000, 4000, 16000, 64000, 256000};
  CorollaryBounds prev{};
  bool first = true;
  for (int64_t n : grid) {
    CorollaryBounds cur = corollary_bounds(heavy_config(n));
    CHECK(cur.theorem_bound > 0.0);
    CHECK(cur.p_wait_bound_jsq_pod > 0.0);
    if (!first) {
      CHECK(cur.theorem_bound < prev.theorem_bound);
      CHECK(cur.mean_wait_bound < prev.mean_wait_bound);
      CHECK(cur.p_wait_bound_jsq_pod < prev.p_wait_bound_jsq_pod);
      CHECK(cur.p_wait_bound_jiq_i1f < prev.p_wait_bound_jiq_i1f);
      CHECK(cur.p_block_bound < prev.p_block_bound);
      // Pod needs more samples as the system grows.
      CHECK(cur.pod_d_min > prev.pod_d_min);
    }
    prev = cur;
    first = false;
  }
}

TEST_CASE("the bounds demand the heavy-traffic parametrization") {
  SystemConfig cfg = heavy_config(1000);
  cfg.heavy_traffic.reset();
  CHECK_THROWS_AS(corollary_bounds(cfg), ConfigError);
}
