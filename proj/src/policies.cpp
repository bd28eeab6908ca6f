#include "coxbalance/policies.hpp"

#include <algorithm>
#include <cmath>

#include "coxbalance/numerics.hpp"

namespace coxbalance {

double RoutingDistribution::tail(int i, int m) const {
  double acc = 0.0;
  for (int j = i; j <= b; ++j) acc += at(j, m);
  return acc;
}

double RoutingDistribution::mass() const {
  double acc = 0.0;
  for (double x : r) acc += x;
  return acc;
}

namespace {

void route_jsq(const AggregateState& st, std::span<double> out) {
  int j = st.min_occupied_level();
  if (j == 0) {
    out[0] = 1.0;
    return;
  }
  double level = static_cast<double>(st.level_count(j));
  out[static_cast<size_t>(1 + (j - 1) * 2)] = static_cast<double>(st.count(j, 1)) / level;
  out[static_cast<size_t>(2 + (j - 1) * 2)] = static_cast<double>(st.count(j, 2)) / level;
}

void route_uniform_over_all(const AggregateState& st, std::span<double> out) {
  double n = static_cast<double>(st.n);
  out[0] = static_cast<double>(st.idle()) / n;
  for (int j = 1; j <= st.b; ++j) {
    out[static_cast<size_t>(1 + (j - 1) * 2)] = static_cast<double>(st.count(j, 1)) / n;
    out[static_cast<size_t>(2 + (j - 1) * 2)] = static_cast<double>(st.count(j, 2)) / n;
  }
}

void route_jiq(const AggregateState& st, std::span<double> out) {
  if (st.idle() > 0) {
    out[0] = 1.0;
    return;
  }
  route_uniform_over_all(st, out);
}

void route_i1f(const AggregateState& st, std::span<double> out) {
  if (st.idle() > 0) {
    out[0] = 1.0;
    return;
  }
  int64_t ones = st.level_count(1);
  if (ones > 0) {
    out[1] = static_cast<double>(st.count(1, 1)) / static_cast<double>(ones);
    out[2] = static_cast<double>(st.count(1, 2)) / static_cast<double>(ones);
    return;
  }
  route_uniform_over_all(st, out);
}

void route_pod(const PolicyKind& policy, const AggregateState& st,
               std::span<double> out) {
  if (policy.d < 1) throw ConfigError("pod: d must be >= 1");
  if (policy.d > st.n)
    throw ConfigError("pod: d = " + std::to_string(policy.d) +
                      " exceeds n = " + std::to_string(st.n));
  const int b = st.b;
  const int64_t n = st.n;
  auto tail_counts = st.suffix_counts();
  auto servers_at_least = [&](int j) -> int64_t {
    if (j <= 0) return n;
    if (j > b) return 0;
    return tail_counts[static_cast<size_t>(j - 1) * 2] +
           tail_counts[static_cast<size_t>(j - 1) * 2 + 1];
  };
  // P(every sampled server has >= j jobs), j = 0..b+1.
  std::vector<double> all_deep(static_cast<size_t>(b + 2), 0.0);
  for (int j = 0; j <= b + 1; ++j) {
    int64_t k = servers_at_least(j);
    if (policy.sampling == PodSampling::WithoutReplacement) {
      all_deep[static_cast<size_t>(j)] = hypergeom_all_marked(k, n, policy.d);
    } else {
      all_deep[static_cast<size_t>(j)] =
          std::pow(static_cast<double>(k) / static_cast<double>(n),
                   static_cast<double>(policy.d));
    }
  }
  out[0] = 1.0 - all_deep[1];
  for (int j = 1; j <= b; ++j) {
    double p_min_j = all_deep[static_cast<size_t>(j)] - all_deep[static_cast<size_t>(j + 1)];
    if (p_min_j <= 0.0) continue;
    int64_t level = st.level_count(j);
    if (level == 0) continue;  // p_min_j is 0 up to rounding; drop the dust
    out[static_cast<size_t>(1 + (j - 1) * 2)] =
        p_min_j * static_cast<double>(st.count(j, 1)) / static_cast<double>(level);
    out[static_cast<size_t>(2 + (j - 1) * 2)] =
        p_min_j * static_cast<double>(st.count(j, 2)) / static_cast<double>(level);
  }
}

}  // namespace

void routing_distribution_into(const PolicyKind& policy,
                               const AggregateState& state,
                               std::span<double> out) {
  if (out.size() != state.counts.size())
    throw ConfigError("routing: output span must have 2b+1 entries");
  std::fill(out.begin(), out.end(), 0.0);
  switch (policy.type) {
    case PolicyType::Jsq: route_jsq(state, out); break;
    case PolicyType::Jiq: route_jiq(state, out); break;
    case PolicyType::I1f: route_i1f(state, out); break;
    case PolicyType::Pod: route_pod(policy, state, out); break;
  }
}

RoutingDistribution routing_distribution(const PolicyKind& policy,
                                         const AggregateState& state) {
  RoutingDistribution dist;
  dist.b = state.b;
  dist.r.assign(state.counts.size(), 0.0);
  routing_distribution_into(policy, state, dist.r);
  return dist;
}

double a1(const PolicyKind& policy, const AggregateState& state) {
  return routing_distribution(policy, state).a1();
}

PiMembershipReport pi_membership_check(const PolicyKind& policy,
                                       const SystemConfig& cfg,
                                       std::span<const AggregateState> states) {
  PiMembershipReport report;
  double n = static_cast<double>(cfg.n);
  double x = std::log(n) / std::sqrt(n);
  double w_l = std::min((1.0 - cfg.coxian.p) * cfg.coxian.mu1, cfg.coxian.mu2);
  double busy_cutoff =
      cfg.lambda + (1.0 + cfg.coxian.mu1 + cfg.coxian.mu2) / w_l * x;
  report.a1_limit = 1.0 / std::sqrt(n);
  if (busy_cutoff >= 1.0) {
    // Saturated states are excluded (a1 = 1 there for every policy); the
    // cutoff being this loose happens only at small n and is reported.
    report.vacuous_threshold = true;
  }
  report.threshold = std::min(busy_cutoff, 1.0);
  report.worst_excess = -report.a1_limit;
  for (const auto& st : states) {
    double s1 = static_cast<double>(st.busy()) / n;
    if (s1 >= 1.0 || s1 > busy_cutoff) continue;
    ++report.states_checked;
    double excess = a1(policy, st) - report.a1_limit;
    report.worst_excess = std::max(report.worst_excess, excess);
    if (excess > 1e-12) {
      report.holds = false;
      if (report.witnesses.size() < 8) report.witnesses.push_back(st);
    }
  }
  return report;
}

}  // namespace coxbalance
