#pragma once

// Shared accumulation machinery for the two simulation engines: time-weighted
// state functionals split across equal post-warmup batches, arrival counters,
// and report assembly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "coxbalance/constants.hpp"
#include "coxbalance/simulate.hpp"
#include "coxbalance/ssc.hpp"

namespace coxbalance::detail {

struct Windows {
  double warmup = 0.0;
  double end = 0.0;
  int nb = 1;
  double blen = 0.0;

  Windows(double warmup_, double horizon, int batches)
      : warmup(warmup_), end(horizon), nb(batches),
        blen((horizon - warmup_) / static_cast<double>(batches)) {}

  int batch_at(double t) const {
    if (t < warmup || t >= end) return -1;
    int idx = static_cast<int>((t - warmup) / blen);
    return std::min(idx, nb - 1);
  }

  // Splits [t0, t1) across batch boundaries, clipped to the measured window.
  template <typename F>
  void integrate(double t0, double t1, F&& add) const {
    double a = std::max(t0, warmup);
    double b = std::min(t1, end);
    while (a < b) {
      int idx = std::min(static_cast<int>((a - warmup) / blen), nb - 1);
      double seg = std::min(b, warmup + blen * static_cast<double>(idx + 1));
      if (seg <= a) seg = b;  // guard against boundary round-off stalls
      add(idx, seg - a);
      a = seg;
    }
  }
};

// Per-state metric vector layout: [s(1,1), s(1,2), ..., s(b,1), s(b,2),
// total, excess, not_ssc]. The last two are present when constants exist.
struct MetricLayout {
  int b = 0;
  bool with_ssc = false;
  int count() const { return 2 * b + 1 + (with_ssc ? 2 : 0); }
};

inline void compute_metrics(const AggregateState& st, const MetricLayout& lay,
                            const DerivedConstants* consts, double* out) {
  double n = static_cast<double>(st.n);
  double acc1 = 0.0, acc2 = 0.0;
  for (int i = st.b; i >= 1; --i) {
    acc1 += static_cast<double>(st.count(i, 1));
    acc2 += static_cast<double>(st.count(i, 2));
    out[(i - 1) * 2] = acc1 / n;
    out[(i - 1) * 2 + 1] = acc2 / n;
  }
  // Summed in the same order as SuffixFractions::total() so the two engines
  // and the exact solver agree to the last bit.
  double total = 0.0;
  for (int k = 0; k < 2 * lay.b; ++k) total += out[k];
  out[2 * lay.b] = total;
  if (lay.with_ssc) {
    out[2 * lay.b + 1] = std::max(total - consts->eta, 0.0);
    out[2 * lay.b + 2] =
        ssc_flags_from_suffix(out, lay.b, *consts).in_ssc() ? 0.0 : 1.0;
  }
}

class Accumulator {
 public:
  Accumulator(const SystemConfig& cfg, const SimConfig& sim)
      : cfg_(cfg), sim_(sim),
        windows_(sim.effective_warmup(), sim.horizon, sim.batches) {
    layout_.b = cfg.b;
    layout_.with_ssc = cfg.coxian.normalized();
    if (layout_.with_ssc) consts_ = derived_constants(cfg);
    metrics_.assign(static_cast<size_t>(layout_.count()), 0.0);
    sums_.assign(static_cast<size_t>(sim.batches) *
                     static_cast<size_t>(layout_.count()),
                 0.0);
    time_.assign(static_cast<size_t>(sim.batches), 0.0);
    arr_.assign(static_cast<size_t>(sim.batches), 0);
    waited_.assign(static_cast<size_t>(sim.batches), 0);
    blocked_.assign(static_cast<size_t>(sim.batches), 0);
    if (sim.trace_interval > 0.0) next_trace_ = 0.0;
  }

  bool with_ssc() const { return layout_.with_ssc; }
  const DerivedConstants& consts() const { return consts_; }

  // State changed: refresh the cached metric vector.
  void on_state(const AggregateState& st) {
    compute_metrics(st, layout_, layout_.with_ssc ? &consts_ : nullptr,
                    metrics_.data());
  }

  void advance(double t0, double t1) {
    windows_.integrate(t0, t1, [&](int idx, double w) {
      time_[static_cast<size_t>(idx)] += w;
      double* row = &sums_[static_cast<size_t>(idx) *
                           static_cast<size_t>(layout_.count())];
      for (int k = 0; k < layout_.count(); ++k) row[k] += w * metrics_[static_cast<size_t>(k)];
    });
    if (next_trace_ >= 0.0) {
      while (next_trace_ < t1) {
        if (next_trace_ >= t0)
          trace_.emplace_back(next_trace_, metrics_[static_cast<size_t>(2 * layout_.b)]);
        next_trace_ += sim_.trace_interval;
      }
    }
  }

  // Arrival at time t routed to class level j (j == 0 idle, j == b blocked).
  void on_arrival(double t, int level) {
    int idx = windows_.batch_at(t);
    if (idx < 0) return;
    ++arr_[static_cast<size_t>(idx)];
    if (level >= 1) ++waited_[static_cast<size_t>(idx)];
    if (level == cfg_.b) ++blocked_[static_cast<size_t>(idx)];
    if (layout_.with_ssc && metrics_[static_cast<size_t>(2 * layout_.b + 2)] > 0.5)
      ++not_ssc_arrivals_;
  }

  void count_event() { ++events_; }

  SimReport finalize() const;

 private:
  const SystemConfig& cfg_;
  const SimConfig& sim_;
  Windows windows_;
  MetricLayout layout_;
  DerivedConstants consts_;
  std::vector<double> metrics_;
  std::vector<double> sums_;
  std::vector<double> time_;
  std::vector<int64_t> arr_, waited_, blocked_;
  int64_t not_ssc_arrivals_ = 0;
  int64_t events_ = 0;
  double next_trace_ = -1.0;
  std::vector<std::pair<double, double>> trace_;
};

// Initial state shared by both engines.
AggregateState initial_state(const SystemConfig& cfg, const SimConfig& sim);

}  // namespace coxbalance::detail
