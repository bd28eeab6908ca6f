#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coxbalance/events.hpp"
#include "coxbalance/rng.hpp"
#include "coxbalance/stats.hpp"
#include "coxbalance/types.hpp"

namespace coxbalance {

struct SimConfig {
  double horizon = 1e4;
  double warmup = -1.0;  // < 0 means 20% of horizon
  uint64_t seed = 1;
  uint64_t stream = 0;
  int batches = 32;
  enum class Init { Empty, Equilibrium, Explicit } init = Init::Empty;
  std::vector<int64_t> init_counts;  // used when init == Explicit
  double trace_interval = 0.0;       // > 0 records (t, total occupancy)

  double effective_warmup() const { return warmup < 0.0 ? 0.2 * horizon : warmup; }
  void validate() const;
};

// Steady-state estimates from one replication. State functionals are
// time-weighted; p_wait / p_block classify realized arrivals (waited = routed
// to a busy server, blocked = routed to a full one), so p_block <= p_wait.
// mean_wait applies Little's law to the queueing time,
// mean_total / (lambda (1 - p_block)) - 1.
struct SimReport {
  int64_t n = 0;
  int b = 0;
  double lambda = 0.0;
  std::string policy;
  double horizon = 0.0, warmup = 0.0;
  uint64_t seed = 0, stream = 0;
  int batches = 0;
  std::string engine;  // "aggregate" or "per_server"

  std::vector<Estimate> mean_s;  // E[S_{i,m}], row-major (i-1)*2+(m-1)
  Estimate mean_total;
  Estimate p_wait, p_block, mean_wait;
  Estimate excess_mean, p_not_ssc;  // only when ssc_defined
  bool mean_wait_defined = false;
  bool ssc_defined = false;
  double eta = 0.0;

  // Zero-count 99% upper bounds (arrival-sampled) when no event was seen;
  // negative when the estimate is nonzero.
  double p_wait_upper99 = -1.0;
  double p_block_upper99 = -1.0;
  double p_not_ssc_upper99 = -1.0;

  int64_t events = 0;
  int64_t arrivals = 0, arrivals_waited = 0, arrivals_blocked = 0;
  bool insufficient_data = false;
  std::string rng;
  double wall_clock_seconds = 0.0;  // diagnostic; not part of canonical output

  std::vector<std::pair<double, double>> trace;
};

// One jump of the aggregate chain: exponential dwell at the total rate, then
// an event drawn from the enabled transitions. Returns nothing if the state
// is absorbing (no positive rate), which the caller must treat as terminal.
struct StepResult {
  double dwell = 0.0;
  TransitionEvent event;
};
std::optional<StepResult> gillespie_step(AggregateState& state,
                                         const PolicyKind& policy,
                                         const SystemConfig& cfg,
                                         Xoshiro256pp& rng);

// Event-by-event simulation of the aggregate (exchangeable-counts) chain.
SimReport run_aggregate(const SystemConfig& cfg, const SimConfig& sim);

// Per-server reference simulation (explicit server array, policies applied
// at server granularity). Capped at 256 servers; meant for cross-validation.
SimReport per_server_microsim(const SystemConfig& cfg, const SimConfig& sim);

}  // namespace coxbalance
