#include "coxbalance/types.hpp"

#include <algorithm>
#include <cctype>

namespace coxbalance {

std::string PolicyKind::name() const {
  switch (type) {
    case PolicyType::Jsq: return "jsq";
    case PolicyType::Jiq: return "jiq";
    case PolicyType::I1f: return "i1f";
    case PolicyType::Pod:
      return "pod(" + std::to_string(d) +
             (sampling == PodSampling::WithReplacement ? ",with_replacement)" : ")");
  }
  return "unknown";
}

PolicyKind PolicyKind::parse(const std::string& kind, int64_t d,
                             const std::string& sampling) {
  std::string k = kind;
  std::transform(k.begin(), k.end(), k.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  PolicyKind out;
  if (k == "jsq") {
    out.type = PolicyType::Jsq;
  } else if (k == "jiq") {
    out.type = PolicyType::Jiq;
  } else if (k == "i1f") {
    out.type = PolicyType::I1f;
  } else if (k == "pod") {
    out.type = PolicyType::Pod;
    out.d = d;
    if (sampling == "without_replacement") {
      out.sampling = PodSampling::WithoutReplacement;
    } else if (sampling == "with_replacement") {
      out.sampling = PodSampling::WithReplacement;
    } else {
      throw ConfigError("policy.pod_sampling must be without_replacement or "
                        "with_replacement, got '" + sampling + "'");
    }
  } else {
    throw ConfigError("policy.kind must be one of jsq|jiq|i1f|pod, got '" + kind + "'");
  }
  return out;
}

double heavy_traffic_lambda(double alpha, double beta, int64_t n) {
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw ConfigError("heavy_traffic.alpha must lie in (0, 0.5)");
  if (!(beta > 0.0)) throw ConfigError("heavy_traffic.beta must be positive");
  if (n < 1) throw ConfigError("n must be >= 1");
  return 1.0 - beta * std::pow(static_cast<double>(n), -alpha);
}

void SystemConfig::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (b < 1) throw ConfigError("b must be >= 1");
  if (!(lambda > 0.0) || !(lambda <= 1.0))
    throw ConfigError("lambda must lie in (0, 1]");
  coxian.validate();
  if (policy.type == PolicyType::Pod) {
    if (policy.d < 1) throw ConfigError("pod: d must be >= 1");
    if (policy.d > n)
      throw ConfigError("pod: d = " + std::to_string(policy.d) +
                        " exceeds the number of servers n = " + std::to_string(n));
  }
  if (heavy_traffic) {
    double expect = heavy_traffic_lambda(heavy_traffic->alpha, heavy_traffic->beta, n);
    if (std::abs(lambda - expect) > 1e-12)
      throw ConfigError("lambda is inconsistent with heavy_traffic parameters");
    if (!(expect > 0.0))
      throw ConfigError("heavy_traffic parameters give lambda <= 0 at this n");
  }
}

}  // namespace coxbalance
