#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace coxbalance {

// Thrown when a state space (or microsim size) exceeds the configured cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on invalid configuration input (bad parameter ranges, bad files).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Coxian-2 service law: an exponential phase 1 at rate mu1, after which the
// job departs with probability 1-p or enters an exponential phase 2 at rate
// mu2. Mean service time is 1/mu1 + p/mu2; most results assume it equals 1.
struct CoxianParams {
  double mu1 = 2.0;
  double mu2 = 1.0;
  double p = 0.5;

  double mean_service_time() const { return 1.0 / mu1 + p / mu2; }
  bool normalized(double tol = 1e-9) const {
    return std::abs(mean_service_time() - 1.0) <= tol;
  }
  void validate() const {
    if (!(mu1 > 0.0) || !(mu2 > 0.0))
      throw ConfigError("coxian: mu1 and mu2 must be positive");
    if (!(p >= 0.0) || !(p < 1.0))
      throw ConfigError("coxian: p must lie in [0, 1)");
  }
};

enum class PolicyType { Jsq, Jiq, I1f, Pod };

enum class PodSampling { WithoutReplacement, WithReplacement };

// Routing policy selector. d and sampling are meaningful for Pod only.
struct PolicyKind {
  PolicyType type = PolicyType::Jsq;
  int64_t d = 2;
  PodSampling sampling = PodSampling::WithoutReplacement;

  std::string name() const;
  static PolicyKind parse(const std::string& kind, int64_t d = 2,
                          const std::string& sampling = "without_replacement");
};

// Heavy-traffic parametrization lambda = 1 - beta * n^-alpha.
struct HeavyTraffic {
  double alpha = 0.3;
  double beta = 1.0;
};

double heavy_traffic_lambda(double alpha, double beta, int64_t n);

// Full system description: n servers, per-server buffer b (a server holds at
// most b jobs including the one in service), Poisson arrivals at rate
// lambda*n, Coxian-2 service, and a routing policy.
struct SystemConfig {
  int64_t n = 1;
  int b = 1;
  double lambda = 0.5;
  CoxianParams coxian;
  PolicyKind policy;
  std::optional<HeavyTraffic> heavy_traffic;

  double total_arrival_rate() const { return lambda * static_cast<double>(n); }
  void validate() const;
};

}  // namespace coxbalance
