#include "coxbalance/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coxbalance/events.hpp"
#include "coxbalance/policies.hpp"

namespace coxbalance {

std::string lyapunov_name(LyapunovFn v) {
  switch (v) {
    case LyapunovFn::A: return "V_A";
    case LyapunovFn::B: return "V_B";
    case LyapunovFn::C: return "V_C";
    case LyapunovFn::D: return "V_D";
  }
  return "?";
}

double lyapunov_value(LyapunovFn v, const AggregateState& state,
                      const DerivedConstants& c) {
  auto s = state.suffix_fractions();
  switch (v) {
    case LyapunovFn::A: return s.s(1, 2) - c.p / c.mu2;
    case LyapunovFn::B: return c.lambda / c.mu1 - s.s(1, 1);
    case LyapunovFn::C: return c.p * c.lambda / c.mu2 - s.s(1, 2);
    case LyapunovFn::D: {
      double tail2 = 0.0;
      for (int i = 2; i <= state.b; ++i) tail2 += s.level(i);
      return std::min(c.eta - s.level(1), tail2);
    }
  }
  return 0.0;
}

double lyapunov_drift_generator(LyapunovFn v, const AggregateState& state,
                                const PolicyKind& policy, const SystemConfig& cfg,
                                const DerivedConstants& c) {
  auto routing = routing_distribution(policy, state);
  return apply_generator(
      [&](const AggregateState& st) { return lyapunov_value(v, st, c); }, state,
      routing, cfg);
}

bool lyapunov_has_closed_form(LyapunovFn v) { return v != LyapunovFn::D; }

double lyapunov_drift_closed_form(LyapunovFn v, const AggregateState& state,
                                  const PolicyKind& policy,
                                  const SystemConfig& cfg) {
  auto s = state.suffix_fractions();
  double s11 = s.s(1, 1), s12 = s.s(1, 2);
  double mu1 = cfg.coxian.mu1, mu2 = cfg.coxian.mu2, p = cfg.coxian.p;
  switch (v) {
    case LyapunovFn::A:
      return p * mu1 * s11 - mu2 * s12;
    case LyapunovFn::B: {
      double waits = a1(policy, state);
      return -cfg.lambda * (1.0 - waits) + mu1 * s11 -
             (1.0 - p) * mu1 * s.s(2, 1) - mu2 * s.s(2, 2);
    }
    case LyapunovFn::C:
      return -(p * mu1 * s11 - mu2 * s12);
    case LyapunovFn::D:
      throw std::invalid_argument("V_D has no closed-form drift; use the generator");
  }
  return 0.0;
}

DriftLemma drift_lemma(LyapunovFn v, const DerivedConstants& c) {
  DriftLemma lem;
  lem.v = v;
  switch (v) {
    case LyapunovFn::A:
      lem.threshold_b = c.x / 4.0;
      lem.gamma = c.mu1 * c.mu2 / 4.0 * c.x;
      lem.delta = 0.0;
      lem.e_is_full_space = true;
      lem.note = "holds at every n (uses only s11 <= 1 - s12)";
      break;
    case LyapunovFn::B:
      lem.threshold_b = c.x / 2.0;
      lem.gamma = c.mu1 / 3.0 * c.x;
      lem.delta = 1.0;
      lem.note = "on-E branch needs a1 <= 1/sqrt(n) on the premise set; exact "
                 "for policies that always favor idle servers";
      break;
    case LyapunovFn::C:
      lem.threshold_b = (c.p * c.mu1 / c.mu2 + 0.5) * c.x;
      lem.gamma = c.mu2 / 2.0 * c.x;
      lem.delta = 1.0;
      lem.note = "holds at every n";
      break;
    case LyapunovFn::D:
      lem.threshold_b = c.c1 * c.x;
      lem.gamma = c.w_u * c.mu1 * c.x;
      lem.delta = c.w_u;
      lem.note = "premise needs sum_{i>=2} s_i >= c1 x, which is empty until "
                 "c1 log(n)/sqrt(n) <= b - 1";
      break;
  }
  return lem;
}

bool drift_lemma_e_set(LyapunovFn v, const AggregateState& state,
                       const DerivedConstants& c) {
  auto s = state.suffix_fractions();
  switch (v) {
    case LyapunovFn::A:
      return true;
    case LyapunovFn::B:
      return s.s(1, 2) <= c.p / c.mu2 + c.x / 2.0;
    case LyapunovFn::C:
      return s.s(1, 1) >= c.l11;
    case LyapunovFn::D:
      return s.s(1, 1) >= c.l11 && s.s(1, 2) >= c.l12;
  }
  return true;
}

DriftScanReport drift_condition_scan(LyapunovFn v, const StateSpace& space,
                                     const PolicyKind& policy,
                                     const SystemConfig& cfg,
                                     const DerivedConstants& c) {
  DriftScanReport rep;
  rep.lemma = drift_lemma(v, c);
  auto scan_branch = [&](DriftScanBranch& br, bool want_on_e, double allowed) {
    for (int64_t i = 0; i < space.size(); ++i) {
      const AggregateState& st = space.state(i);
      if (lyapunov_value(v, st, c) < rep.lemma.threshold_b) continue;
      bool on_e = rep.lemma.e_is_full_space || drift_lemma_e_set(v, st, c);
      if (on_e != want_on_e) continue;
      ++br.premise_states;
      br.premise_empty = false;
      double drift = lyapunov_drift_generator(v, st, policy, cfg, c);
      double slack = drift - allowed;
      if (br.premise_states == 1 || slack > br.worst_slack) br.worst_slack = slack;
      if (slack > 1e-12) {
        br.holds = false;
        if (br.witnesses.size() < 5) br.witnesses.push_back(st);
      }
    }
  };
  scan_branch(rep.on_e, true, -rep.lemma.gamma);
  if (!rep.lemma.e_is_full_space) scan_branch(rep.off_e, false, rep.lemma.delta);
  return rep;
}

TailBoundReport tail_bound_verify(LyapunovFn v, const StateSpace& space,
                                  const std::vector<double>& pi,
                                  const GeneratorMatrix& gen,
                                  const PolicyKind& policy,
                                  const SystemConfig& cfg,
                                  const DerivedConstants& c,
                                  std::optional<double> threshold_override) {
  TailBoundReport rep;
  DriftLemma lem = drift_lemma(v, c);
  rep.threshold_b = threshold_override.value_or(lem.threshold_b);
  rep.paper_nu_max = 1.0 / static_cast<double>(cfg.n);
  rep.paper_q_max = c.mu_max * static_cast<double>(cfg.n);

  const int64_t size = space.size();
  std::vector<double> values(static_cast<size_t>(size));
  double v_max = -1e300;
  for (int64_t i = 0; i < size; ++i) {
    values[static_cast<size_t>(i)] = lyapunov_value(v, space.state(i), c);
    v_max = std::max(v_max, values[static_cast<size_t>(i)]);
  }

  // nu and q from the actual generator: largest |V jump| and largest total
  // rate of V-increasing transitions out of any state.
  for (int64_t i = 0; i < size; ++i) {
    double vi = values[static_cast<size_t>(i)];
    double up_rate = 0.0;
    for (int64_t kk = gen.row_ptr[static_cast<size_t>(i)];
         kk < gen.row_ptr[static_cast<size_t>(i) + 1]; ++kk) {
      double vj = values[static_cast<size_t>(gen.col[static_cast<size_t>(kk)])];
      rep.nu_max = std::max(rep.nu_max, std::abs(vj - vi));
      if (vj > vi) up_rate += gen.rate[static_cast<size_t>(kk)];
    }
    rep.q_max = std::max(rep.q_max, up_rate);
  }

  bool have_on_e = false, have_off_e = false;
  double max_drift_on_e = 0.0, max_drift_off_e = 0.0;
  for (int64_t i = 0; i < size; ++i) {
    const AggregateState& st = space.state(i);
    bool in_e = lem.e_is_full_space || drift_lemma_e_set(v, st, c);
    if (!in_e) rep.p_not_e += pi[static_cast<size_t>(i)];
    if (values[static_cast<size_t>(i)] < rep.threshold_b) continue;
    double drift = lyapunov_drift_generator(v, st, policy, cfg, c);
    if (in_e) {
      max_drift_on_e = have_on_e ? std::max(max_drift_on_e, drift) : drift;
      have_on_e = true;
    } else {
      max_drift_off_e = have_off_e ? std::max(max_drift_off_e, drift) : drift;
      have_off_e = true;
    }
  }

  if (!have_on_e && !have_off_e) {
    rep.premise_empty = true;
    rep.spec_valid = true;
    rep.note = "no state reaches V >= B; the tail bound is vacuous here";
    rep.holds = true;
    return rep;
  }
  if (have_on_e) {
    rep.gamma = -max_drift_on_e;
  } else {
    rep.gamma = std::numeric_limits<double>::infinity();
    rep.note = "every premise state is off E";
  }
  rep.delta = have_off_e ? std::max(max_drift_off_e, 0.0) : 0.0;
  if (!(rep.gamma > 0.0)) {
    rep.spec_valid = false;
    rep.note = "drift is not negative on {V >= B} intersect E; no geometric bound";
    return rep;
  }
  rep.spec_valid = true;
  double qn = rep.q_max * rep.nu_max;
  rep.alpha = std::isinf(rep.gamma) ? 0.0 : qn / (qn + rep.gamma);
  rep.beta = std::isinf(rep.gamma) ? 1.0 : rep.delta / rep.gamma + 1.0;

  // Compare P(V >= B + 2 nu j) against alpha^j + beta P(not E) until the
  // threshold clears the support.
  double step = 2.0 * rep.nu_max;
  if (step <= 0.0) step = 1.0;  // V constant across transitions; one level
  bool first = true;
  for (int64_t j = 0;; ++j) {
    double threshold = rep.threshold_b + step * static_cast<double>(j);
    double p_tail = 0.0;
    for (int64_t i = 0; i < size; ++i)
      if (values[static_cast<size_t>(i)] >= threshold)
        p_tail += pi[static_cast<size_t>(i)];
    double bound = std::pow(rep.alpha, static_cast<double>(j)) +
                   rep.beta * rep.p_not_e;
    double slack = p_tail - std::min(bound, 1.0);
    if (first || slack > rep.worst_slack) rep.worst_slack = slack;
    first = false;
    ++rep.levels_checked;
    if (slack > 1e-12) rep.holds = false;
    if (threshold > v_max) break;
    if (j > 100000) break;  // safety stop; desk instances are far smaller
  }
  return rep;
}

}  // namespace coxbalance
