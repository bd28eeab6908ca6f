#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coxbalance/constants.hpp"
#include "coxbalance/stationary.hpp"

namespace coxbalance {

// The four Lyapunov functions driving the collapse argument:
//   A: s_{1,2} - p/mu2                (phase-2 mass above its fluid level)
//   B: lambda/mu1 - s_{1,1}           (phase-1 mass below its fluid level)
//   C: p lambda/mu2 - s_{1,2}         (phase-2 mass below its fluid level)
//   D: min{eta - s_1, sum_{i>=2} s_i} (queueing mass vs. busy-fraction gap)
enum class LyapunovFn { A, B, C, D };

std::string lyapunov_name(LyapunovFn v);

double lyapunov_value(LyapunovFn v, const AggregateState& state,
                      const DerivedConstants& c);

// Drift of V along the chain, evaluated through the generator.
double lyapunov_drift_generator(LyapunovFn v, const AggregateState& state,
                                const PolicyKind& policy, const SystemConfig& cfg,
                                const DerivedConstants& c);

// Closed-form drifts (available for A, B, C; D has no closed form here):
//   A:  p mu1 s11 - mu2 s12
//   B: -lambda (1 - A_1(s)) + mu1 s11 - (1-p) mu1 s21 - mu2 s22
//   C: -(p mu1 s11 - mu2 s12)
double lyapunov_drift_closed_form(LyapunovFn v, const AggregateState& state,
                                  const PolicyKind& policy, const SystemConfig& cfg);
bool lyapunov_has_closed_form(LyapunovFn v);

// Drift lemma as stated: premise V >= threshold_b; on the conditioning set E
// the drift is <= -gamma, off E it is <= delta.
struct DriftLemma {
  LyapunovFn v;
  double threshold_b = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  bool e_is_full_space = false;
  std::string note;
};

DriftLemma drift_lemma(LyapunovFn v, const DerivedConstants& c);

// Whether the state satisfies the lemma's conditioning set E.
bool drift_lemma_e_set(LyapunovFn v, const AggregateState& state,
                       const DerivedConstants& c);

// Exhaustive scan of the lemma's two branches over a state space. A branch
// with no qualifying states is reported as premise_empty (inapplicable at
// this n), never as a pass or a failure.
struct DriftScanBranch {
  int64_t premise_states = 0;
  bool premise_empty = true;
  bool holds = true;
  double worst_slack = 0.0;  // max over states of drift - allowed
  std::vector<AggregateState> witnesses;  // up to 5 violators
};

struct DriftScanReport {
  DriftLemma lemma;
  DriftScanBranch on_e;   // drift <= -gamma required
  DriftScanBranch off_e;  // drift <= delta required
};

DriftScanReport drift_condition_scan(LyapunovFn v, const StateSpace& space,
                                     const PolicyKind& policy,
                                     const SystemConfig& cfg,
                                     const DerivedConstants& c);

// Geometric tail bound for V(S) under pi. With
//   gamma = -max{drift : V >= B, s in E} (computed from the actual chain),
//   delta = max{drift : V >= B, s not in E} clamped at 0,
//   nu    = max |V(next) - V(s)| over transitions,
//   q     = max over states of the total rate of V-increasing transitions,
// the bound P(V(S) >= B + 2 nu j) <= alpha^j + beta P(S not in E) holds for
// alpha = q nu / (q nu + gamma), beta = delta/gamma + 1.
struct TailBoundReport {
  bool spec_valid = false;     // gamma > 0 (or premise empty)
  bool premise_empty = false;  // no state reaches V >= B
  std::string note;
  double threshold_b = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double nu_max = 0.0;
  double q_max = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p_not_e = 0.0;
  double paper_nu_max = 0.0;  // 1/n
  double paper_q_max = 0.0;   // mu_max * n
  int64_t levels_checked = 0;
  double worst_slack = 0.0;  // max over j of P - bound (negative = margin)
  bool holds = true;
};

TailBoundReport tail_bound_verify(LyapunovFn v, const StateSpace& space,
                                  const std::vector<double>& pi,
                                  const GeneratorMatrix& gen,
                                  const PolicyKind& policy,
                                  const SystemConfig& cfg,
                                  const DerivedConstants& c,
                                  std::optional<double> threshold_override = {});

}  // namespace coxbalance
