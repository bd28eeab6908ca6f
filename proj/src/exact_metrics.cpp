#include "coxbalance/exact_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "coxbalance/constants.hpp"
#include "coxbalance/policies.hpp"
#include "coxbalance/ssc.hpp"

namespace coxbalance {

ExactMetrics exact_metrics(const StateSpace& space, const std::vector<double>& pi,
                           const PolicyKind& policy, const SystemConfig& cfg) {
  ExactMetrics m;
  const int b = space.b();
  m.mean_s.assign(static_cast<size_t>(2 * b), 0.0);

  bool have_consts = cfg.coxian.normalized();
  DerivedConstants consts;
  if (have_consts) {
    consts = derived_constants(cfg);
    m.ssc_defined = true;
  }

  for (int64_t i = 0; i < space.size(); ++i) {
    double w = pi[static_cast<size_t>(i)];
    if (w == 0.0) continue;
    const AggregateState& st = space.state(i);
    auto s = st.suffix_fractions();
    for (size_t k = 0; k < s.v.size(); ++k) m.mean_s[k] += w * s.v[k];
    double total = s.total();
    m.mean_total += w * total;
    auto routing = routing_distribution(policy, st);
    m.p_wait += w * routing.a1();
    m.p_block += w * routing.blocked();
    if (have_consts) {
      m.excess_mean += w * std::max(total - consts.eta, 0.0);
      if (!ssc_flags(st, consts).in_ssc()) m.p_not_ssc += w;
    }
  }

  double accepted = cfg.lambda * (1.0 - m.p_block);
  if (accepted > 0.0) {
    m.mean_wait = m.mean_total / accepted - 1.0;
    m.mean_wait_defined = true;
  }
  return m;
}

}  // namespace coxbalance
