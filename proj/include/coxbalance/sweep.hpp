#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coxbalance/numerics.hpp"
#include "coxbalance/simulate.hpp"

namespace coxbalance {

// Heavy-traffic scaling study: for each n in the grid, simulate at
// lambda = 1 - beta n^-alpha and record waiting/blocking/excess estimates
// next to the closed-form bounds. Horizons stretch with the traffic so the
// relaxation time 1/(1-lambda) stays covered.
struct SweepSpec {
  std::vector<int64_t> n_grid;
  double alpha = 0.3;
  double beta = 1.0;
  std::vector<PolicyKind> policies;
  int b = 4;
  CoxianParams coxian;
  SimConfig sim;                     // horizon/warmup/batches template
  double min_horizon_scale = 200.0;  // horizon >= scale / (1 - lambda)
  uint64_t base_seed = 1;

  void validate() const;
};

struct SweepRow {
  int64_t n = 0;
  double lambda = 0.0;
  std::string policy;
  int64_t d = 0;  // Pod sample size; 0 for the other policies
  double p_wait = 0.0, p_wait_ci95 = 0.0, p_wait_ci99 = 0.0;
  double p_block = 0.0, p_block_ci95 = 0.0;
  double mean_total = 0.0, mean_total_ci95 = 0.0;
  double excess_mean = 0.0, excess_mean_ci95 = 0.0;
  double theorem_bound = 0.0;      // E[max{Sum S - eta, 0}] upper bound
  bool theorem_applicable = false;
  double corollary_bound = 0.0;    // policy-matched P(W) upper bound
  bool corollary_applicable = false;
  int64_t events = 0;
  uint64_t seed = 0, stream = 0;
  bool insufficient_data = false;
};

// Log-log decay fit across the grid; skipped (with the reason) when fewer
// than two usable points remain.
struct SweepFit {
  bool fitted = false;
  OlsFit fit;
  std::string skipped_reason;
};

struct PolicySweepFits {
  std::string policy;
  std::string p_wait_anchor;  // human-readable regressor description
  std::string excess_anchor;
  SweepFit p_wait_decay;  // log p_wait ~ log(anchor(n)); anchor is
                          // log(n)/sqrt(n) for jsq/pod and
                          // 1/(n^(1/2-alpha) log n) for jiq/i1f
  SweepFit excess_decay;  // log excess ~ log(1 / (sqrt n log n))
};

struct SweepResult {
  std::vector<SweepRow> rows;  // policy-major, n ascending within policy
  std::vector<PolicySweepFits> fits;
};

SweepResult run_sweep(const SweepSpec& spec);

// The decay fits run_sweep attaches, computed from already-built rows. Split
// out so the regressor construction can be exercised on synthetic rows: data
// shaped exactly like c * anchor(n) must come back with slope 1.
std::vector<PolicySweepFits> sweep_fits(const SweepSpec& spec,
                                        const std::vector<SweepRow>& rows);

// Canonical CSV: fixed column order, %.17g doubles, 0/1 booleans. Identical
// inputs produce identical bytes.
std::string sweep_csv(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace coxbalance
