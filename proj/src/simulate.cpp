#include "coxbalance/simulate.hpp"

#include <chrono>
#include <cmath>

#include "coxbalance/numerics.hpp"
#include "coxbalance/policies.hpp"
#include "sim_internal.hpp"

namespace coxbalance {

void SimConfig::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("sim: horizon must be positive");
  if (effective_warmup() >= horizon)
    throw ConfigError("sim: warmup must be smaller than the horizon");
  if (batches < 10) throw ConfigError("sim: need at least 10 batches");
  if (trace_interval < 0.0) throw ConfigError("sim: trace_interval must be >= 0");
}

namespace detail {

AggregateState initial_state(const SystemConfig& cfg, const SimConfig& sim) {
  switch (sim.init) {
    case SimConfig::Init::Empty:
      return AggregateState::empty(cfg.n, cfg.b);
    case SimConfig::Init::Equilibrium: {
      // Fluid fixed point: busy servers hold one job, phases split
      // lambda/mu1 : p*lambda/mu2.
      int64_t n11 = std::llround(static_cast<double>(cfg.n) * cfg.lambda / cfg.coxian.mu1);
      int64_t n12 = std::llround(static_cast<double>(cfg.n) * cfg.coxian.p *
                                 cfg.lambda / cfg.coxian.mu2);
      n11 = std::max<int64_t>(0, std::min(n11, cfg.n));
      n12 = std::max<int64_t>(0, std::min(n12, cfg.n - n11));
      auto st = AggregateState::empty(cfg.n, cfg.b);
      st.counts[0] = cfg.n - n11 - n12;
      st.count(1, 1) = n11;
      st.count(1, 2) = n12;
      return st;
    }
    case SimConfig::Init::Explicit:
      return AggregateState::from_counts(cfg.n, cfg.b, sim.init_counts);
  }
  throw ConfigError("sim: unknown init mode");
}

SimReport Accumulator::finalize() const {
  SimReport rep;
  rep.n = cfg_.n;
  rep.b = cfg_.b;
  rep.lambda = cfg_.lambda;
  rep.policy = cfg_.policy.name();
  rep.horizon = sim_.horizon;
  rep.warmup = windows_.warmup;
  rep.seed = sim_.seed;
  rep.stream = sim_.stream;
  rep.batches = sim_.batches;
  rep.rng = kRngAlgorithm;
  rep.events = events_;
  rep.ssc_defined = layout_.with_ssc;
  if (layout_.with_ssc) rep.eta = consts_.eta;
  rep.trace = trace_;

  const int nm = layout_.count();
  double total_time = 0.0;
  for (double t : time_) total_time += t;
  std::vector<double> overall(static_cast<size_t>(nm), 0.0);
  for (int bi = 0; bi < sim_.batches; ++bi)
    for (int k = 0; k < nm; ++k)
      overall[static_cast<size_t>(k)] +=
          sums_[static_cast<size_t>(bi) * static_cast<size_t>(nm) + static_cast<size_t>(k)];

  auto time_metric = [&](int k) {
    std::vector<double> means;
    means.reserve(static_cast<size_t>(sim_.batches));
    for (int bi = 0; bi < sim_.batches; ++bi) {
      double w = time_[static_cast<size_t>(bi)];
      if (w > 0.0)
        means.push_back(sums_[static_cast<size_t>(bi) * static_cast<size_t>(nm) +
                              static_cast<size_t>(k)] / w);
    }
    double mean = total_time > 0.0 ? overall[static_cast<size_t>(k)] / total_time : 0.0;
    return estimate_with_mean(mean, means);
  };

  rep.mean_s.resize(static_cast<size_t>(2 * cfg_.b));
  for (int k = 0; k < 2 * cfg_.b; ++k) rep.mean_s[static_cast<size_t>(k)] = time_metric(k);
  rep.mean_total = time_metric(2 * cfg_.b);
  if (layout_.with_ssc) {
    rep.excess_mean = time_metric(2 * cfg_.b + 1);
    rep.p_not_ssc = time_metric(2 * cfg_.b + 2);
  }

  int64_t arrivals = 0, waited = 0, blocked = 0;
  for (int bi = 0; bi < sim_.batches; ++bi) {
    arrivals += arr_[static_cast<size_t>(bi)];
    waited += waited_[static_cast<size_t>(bi)];
    blocked += blocked_[static_cast<size_t>(bi)];
  }
  rep.arrivals = arrivals;
  rep.arrivals_waited = waited;
  rep.arrivals_blocked = blocked;
  rep.insufficient_data = arrivals < 10;

  std::vector<double> pw_means, pb_means, wait_means;
  for (int bi = 0; bi < sim_.batches; ++bi) {
    double a = static_cast<double>(arr_[static_cast<size_t>(bi)]);
    double w = time_[static_cast<size_t>(bi)];
    if (a > 0.0) {
      double pb = static_cast<double>(blocked_[static_cast<size_t>(bi)]) / a;
      pw_means.push_back(static_cast<double>(waited_[static_cast<size_t>(bi)]) / a);
      pb_means.push_back(pb);
      double accepted = cfg_.lambda * (1.0 - pb);
      if (accepted > 0.0 && w > 0.0) {
        double mt = sums_[static_cast<size_t>(bi) * static_cast<size_t>(nm) +
                          static_cast<size_t>(2 * cfg_.b)] / w;
        wait_means.push_back(mt / accepted - 1.0);
      }
    }
  }
  double pw = arrivals > 0 ? static_cast<double>(waited) / static_cast<double>(arrivals) : 0.0;
  double pb = arrivals > 0 ? static_cast<double>(blocked) / static_cast<double>(arrivals) : 0.0;
  rep.p_wait = estimate_with_mean(pw, pw_means);
  rep.p_block = estimate_with_mean(pb, pb_means);
  double accepted = cfg_.lambda * (1.0 - pb);
  if (accepted > 0.0 && total_time > 0.0) {
    rep.mean_wait_defined = true;
    rep.mean_wait = estimate_with_mean(
        overall[static_cast<size_t>(2 * cfg_.b)] / total_time / accepted - 1.0,
        wait_means);
  }
  if (arrivals > 0) {
    if (waited == 0) rep.p_wait_upper99 = zero_count_upper_bound(arrivals, 0.99);
    if (blocked == 0) rep.p_block_upper99 = zero_count_upper_bound(arrivals, 0.99);
    if (layout_.with_ssc && not_ssc_arrivals_ == 0)
      rep.p_not_ssc_upper99 = zero_count_upper_bound(arrivals, 0.99);
  }
  return rep;
}

}  // namespace detail

std::optional<StepResult> gillespie_step(AggregateState& state,
                                         const PolicyKind& policy,
                                         const SystemConfig& cfg,
                                         Xoshiro256pp& rng) {
  auto routing = routing_distribution(policy, state);
  auto events = enabled_transitions(state, routing, cfg);
  double total = 0.0;
  for (const auto& ev : events) total += ev.rate;
  if (total <= 0.0) return std::nullopt;
  StepResult res;
  res.dwell = rng.exponential(total);
  double u = rng.uniform01() * total;
  size_t pick = events.size() - 1;
  double acc = 0.0;
  for (size_t i = 0; i < events.size(); ++i) {
    acc += events[i].rate;
    if (u < acc) {
      pick = i;
      break;
    }
  }
  res.event = events[pick];
  apply_event(state, res.event);
  return res;
}

SimReport run_aggregate(const SystemConfig& cfg, const SimConfig& sim) {
  cfg.validate();
  sim.validate();
  auto t_start = std::chrono::steady_clock::now();

  detail::Accumulator acc(cfg, sim);
  AggregateState st = detail::initial_state(cfg, sim);
  Xoshiro256pp rng(sim.seed, sim.stream);
  std::vector<double> routing(st.counts.size(), 0.0);

  const double arr_rate = cfg.total_arrival_rate();
  const double mu1 = cfg.coxian.mu1, mu2 = cfg.coxian.mu2, p = cfg.coxian.p;
  const int b = cfg.b;
  double t = 0.0;
  acc.on_state(st);

  while (t < sim.horizon) {
    // Service pressure: c1/c2 servers whose in-service job is in phase 1/2.
    double c1 = 0.0, c2 = 0.0;
    for (int j = 1; j <= b; ++j) {
      c1 += static_cast<double>(st.count(j, 1));
      c2 += static_cast<double>(st.count(j, 2));
    }
    double total = arr_rate + mu1 * c1 + mu2 * c2;
    double dwell = rng.exponential(total);
    double t_next = t + dwell;
    acc.advance(t, std::min(t_next, sim.horizon));
    if (t_next >= sim.horizon) break;

    double u = rng.uniform01() * total;
    bool state_changed = true;
    if (u < arr_rate) {
      routing_distribution_into(cfg.policy, st, routing);
      double v = u / arr_rate;  // conditionally uniform given an arrival
      // Walk the cumulative routing mass; if round-off pushes v past the
      // total, fall back to the last class that carries mass.
      int level = -1, phase = 1;
      double cum = 0.0;
      int last_level = 0, last_phase = 1;
      for (size_t k = 0; k < routing.size() && level < 0; ++k) {
        if (routing[k] <= 0.0) continue;
        int lk = k == 0 ? 0 : 1 + static_cast<int>(k - 1) / 2;
        int pk = k == 0 ? 1 : 1 + static_cast<int>(k - 1) % 2;
        cum += routing[k];
        if (v < cum) {
          level = lk;
          phase = pk;
        } else {
          last_level = lk;
          last_phase = pk;
        }
      }
      if (level < 0) {
        level = last_level;
        phase = last_phase;
      }
      acc.on_arrival(t_next, level);
      if (level > 0 && level < b) {
        apply_event(st, {EventType::Arrival, level, phase, 0.0});
      } else if (level == 0) {
        apply_event(st, {EventType::Arrival, 0, 1, 0.0});
      } else {
        state_changed = false;  // blocked
      }
    } else if (u < arr_rate + mu1 * c1) {
      double target = (u - arr_rate) / mu1;  // in [0, c1)
      int level = b;
      double cum = 0.0;
      for (int j = 1; j <= b; ++j) {
        cum += static_cast<double>(st.count(j, 1));
        if (target < cum) {
          level = j;
          break;
        }
      }
      if (st.count(level, 1) == 0) {  // clamp round-off to an occupied level
        for (int j = b; j >= 1; --j)
          if (st.count(j, 1) > 0) {
            level = j;
            break;
          }
      }
      bool to_phase2 = p > 0.0 && rng.uniform01() < p;
      apply_event(st, {to_phase2 ? EventType::Phase1ToPhase2
                                 : EventType::Phase1Departure,
                       level, 1, 0.0});
    } else {
      double target = (u - arr_rate - mu1 * c1) / mu2;  // in [0, c2)
      int level = b;
      double cum = 0.0;
      for (int j = 1; j <= b; ++j) {
        cum += static_cast<double>(st.count(j, 2));
        if (target < cum) {
          level = j;
          break;
        }
      }
      if (st.count(level, 2) == 0) {
        for (int j = b; j >= 1; --j)
          if (st.count(j, 2) > 0) {
            level = j;
            break;
          }
      }
      apply_event(st, {EventType::Phase2Departure, level, 2, 0.0});
    }
    acc.count_event();
    if (state_changed) acc.on_state(st);
    t = t_next;
  }

  SimReport rep = acc.finalize();
  rep.engine = "aggregate";
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace coxbalance
