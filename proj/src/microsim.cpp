#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coxbalance/simulate.hpp"
#include "sim_internal.hpp"

namespace coxbalance {

namespace {

constexpr int64_t kMaxServers = 256;

// Unbiased-enough integer draw (Lemire multiply-shift); bound <= 256 keeps
// the modulo bias far below anything observable, and the mapping is pinned.
int uniform_below(Xoshiro256pp& rng, int bound) {
  return static_cast<int>(
      (static_cast<unsigned __int128>(rng.next()) * static_cast<uint64_t>(bound)) >> 64);
}

// Explicit server array plus the aggregate counts kept in lockstep, so the
// shared accumulator sees the same state representation as the main engine.
struct ServerSystem {
  int n = 0;
  int b = 0;
  std::vector<int> qlen;   // jobs at the server, 0..b
  std::vector<int> phase;  // phase of the in-service job; 1 when idle
  int64_t busy1 = 0, busy2 = 0;  // servers whose in-service job is in phase 1/2
  AggregateState agg;

  ServerSystem(const SystemConfig& cfg, const AggregateState& init)
      : n(static_cast<int>(cfg.n)), b(cfg.b),
        qlen(static_cast<size_t>(cfg.n), 0),
        phase(static_cast<size_t>(cfg.n), 1), agg(init) {
    // Materialize the aggregate counts onto concrete servers; the servers
    // are exchangeable, so the assignment order is immaterial.
    int next = static_cast<int>(init.idle());
    for (int j = 1; j <= b; ++j)
      for (int m = 1; m <= 2; ++m)
        for (int64_t c = 0; c < init.count(j, m); ++c) {
          qlen[static_cast<size_t>(next)] = j;
          phase[static_cast<size_t>(next)] = m;
          ++next;
          if (m == 1) ++busy1; else ++busy2;
        }
  }

  // Arrival routed to server i; returns the pre-arrival queue length.
  int admit(int i) {
    int q = qlen[static_cast<size_t>(i)];
    if (q == b) return q;  // blocked
    if (q == 0) {
      --agg.counts[0];
      ++agg.count(1, 1);
      phase[static_cast<size_t>(i)] = 1;
      ++busy1;
    } else {
      int m = phase[static_cast<size_t>(i)];
      --agg.count(q, m);
      ++agg.count(q + 1, m);
    }
    ++qlen[static_cast<size_t>(i)];
    return q;
  }

  void phase1_to_phase2(int i) {
    int q = qlen[static_cast<size_t>(i)];
    --agg.count(q, 1);
    ++agg.count(q, 2);
    phase[static_cast<size_t>(i)] = 2;
    --busy1;
    ++busy2;
  }

  void depart(int i) {
    int q = qlen[static_cast<size_t>(i)];
    int m = phase[static_cast<size_t>(i)];
    --agg.count(q, m);
    if (m == 1) --busy1; else --busy2;
    --qlen[static_cast<size_t>(i)];
    if (q == 1) {
      ++agg.counts[0];
    } else {
      ++agg.count(q - 1, 1);  // next job starts service in phase 1
      ++busy1;
    }
    phase[static_cast<size_t>(i)] = 1;
  }

  // Index of the k-th busy server (0-based) whose in-service phase is m.
  int kth_in_phase(int m, int k) const {
    for (int i = 0; i < n; ++i)
      if (qlen[static_cast<size_t>(i)] > 0 && phase[static_cast<size_t>(i)] == m) {
        if (k == 0) return i;
        --k;
      }
    return n - 1;  // unreachable when the caller drew k < busy count
  }
};

// Server-granular routing decisions. Each returns the chosen server index.
class ServerRouter {
 public:
  ServerRouter(const PolicyKind& policy, int n)
      : policy_(policy), n_(n), perm_(static_cast<size_t>(n)) {
    scratch_.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm_[static_cast<size_t>(i)] = i;
  }

  int pick(const ServerSystem& sys, Xoshiro256pp& rng) {
    switch (policy_.type) {
      case PolicyType::Jsq:
        return least_loaded_of_all(sys, rng);
      case PolicyType::Jiq:
        if (collect_with_qlen(sys, 0)) return pick_scratch(rng);
        return uniform_below(rng, n_);
      case PolicyType::I1f:
        if (collect_with_qlen(sys, 0)) return pick_scratch(rng);
        if (collect_with_qlen(sys, 1)) return pick_scratch(rng);
        return uniform_below(rng, n_);
      case PolicyType::Pod:
        return least_loaded_of_sample(sys, rng);
    }
    throw ConfigError("per-server router: unknown policy");
  }

 private:
  bool collect_with_qlen(const ServerSystem& sys, int q) {
    scratch_.clear();
    for (int i = 0; i < n_; ++i)
      if (sys.qlen[static_cast<size_t>(i)] == q) scratch_.push_back(i);
    return !scratch_.empty();
  }

  int pick_scratch(Xoshiro256pp& rng) {
    return scratch_[static_cast<size_t>(
        uniform_below(rng, static_cast<int>(scratch_.size())))];
  }

  int least_loaded_of_all(const ServerSystem& sys, Xoshiro256pp& rng) {
    int best = sys.b + 1;
    for (int i = 0; i < n_; ++i) best = std::min(best, sys.qlen[static_cast<size_t>(i)]);
    collect_with_qlen(sys, best);
    return pick_scratch(rng);
  }

  int least_loaded_of_sample(const ServerSystem& sys, Xoshiro256pp& rng) {
    int d = static_cast<int>(policy_.d);
    scratch_.clear();
    int best = sys.b + 1;
    auto consider = [&](int i) {
      int q = sys.qlen[static_cast<size_t>(i)];
      if (q < best) {
        best = q;
        scratch_.clear();
      }
      if (q == best) scratch_.push_back(i);
    };
    if (policy_.sampling == PodSampling::WithoutReplacement) {
      // Partial Fisher-Yates over a persistent permutation: positions
      // 0..d-1 become a uniform d-subset each call.
      for (int k = 0; k < d; ++k) {
        int j = k + uniform_below(rng, n_ - k);
        std::swap(perm_[static_cast<size_t>(k)], perm_[static_cast<size_t>(j)]);
        consider(perm_[static_cast<size_t>(k)]);
      }
    } else {
      for (int k = 0; k < d; ++k) consider(uniform_below(rng, n_));
    }
    return pick_scratch(rng);  // ties uniform among the tied samples
  }

  PolicyKind policy_;
  int n_ = 0;
  std::vector<int> perm_;
  std::vector<int> scratch_;
};

}  // namespace

SimReport per_server_microsim(const SystemConfig& cfg, const SimConfig& sim) {
  cfg.validate();
  sim.validate();
  if (cfg.n > kMaxServers)
    throw CapExceeded("per-server engine supports at most " +
                      std::to_string(kMaxServers) + " servers (requested " +
                      std::to_string(cfg.n) + ")");
  auto t_start = std::chrono::steady_clock::now();

  detail::Accumulator acc(cfg, sim);
  ServerSystem sys(cfg, detail::initial_state(cfg, sim));
  ServerRouter router(cfg.policy, static_cast<int>(cfg.n));
  Xoshiro256pp rng(sim.seed, sim.stream);

  const double arr_rate = cfg.total_arrival_rate();
  const double mu1 = cfg.coxian.mu1, mu2 = cfg.coxian.mu2, p = cfg.coxian.p;
  double t = 0.0;
  acc.on_state(sys.agg);

  while (t < sim.horizon) {
    double total = arr_rate + mu1 * static_cast<double>(sys.busy1) +
                   mu2 * static_cast<double>(sys.busy2);
    double dwell = rng.exponential(total);
    double t_next = t + dwell;
    acc.advance(t, std::min(t_next, sim.horizon));
    if (t_next >= sim.horizon) break;

    double u = rng.uniform01() * total;
    bool state_changed = true;
    if (u < arr_rate) {
      int i = router.pick(sys, rng);
      int level = sys.admit(i);
      acc.on_arrival(t_next, level);
      state_changed = level < cfg.b;
    } else if (u < arr_rate + mu1 * static_cast<double>(sys.busy1)) {
      int k = uniform_below(rng, static_cast<int>(sys.busy1));
      int i = sys.kth_in_phase(1, k);
      if (p > 0.0 && rng.uniform01() < p)
        sys.phase1_to_phase2(i);
      else
        sys.depart(i);
    } else {
      int k = uniform_below(rng, static_cast<int>(sys.busy2));
      int i = sys.kth_in_phase(2, k);
      sys.depart(i);
    }
    acc.count_event();
    if (state_changed) acc.on_state(sys.agg);
    t = t_next;
  }

  SimReport rep = acc.finalize();
  rep.engine = "per_server";
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace coxbalance
