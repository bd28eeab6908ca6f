#include "coxbalance/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "coxbalance/corollary.hpp"

namespace coxbalance {

void SweepSpec::validate() const {
  if (n_grid.empty()) throw ConfigError("sweep: n_grid must not be empty");
  int64_t prev = 0;
  for (int64_t n : n_grid) {
    if (n <= prev) throw ConfigError("sweep: n_grid must be strictly increasing");
    prev = n;
  }
  if (policies.empty()) throw ConfigError("sweep: at least one policy");
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw ConfigError("sweep: alpha must lie in (0, 0.5)");
  if (!(beta > 0.0)) throw ConfigError("sweep: beta must be positive");
  if (b < 1) throw ConfigError("sweep: b must be >= 1");
  if (!(min_horizon_scale >= 0.0))
    throw ConfigError("sweep: min_horizon_scale must be >= 0");
  coxian.validate();
  sim.validate();
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  out.rows.reserve(spec.policies.size() * spec.n_grid.size());

  uint64_t stream = 0;
  for (const auto& policy : spec.policies) {
    for (int64_t n : spec.n_grid) {
      SystemConfig cfg;
      cfg.n = n;
      cfg.b = spec.b;
      cfg.coxian = spec.coxian;
      cfg.policy = policy;
      cfg.heavy_traffic = HeavyTraffic{spec.alpha, spec.beta};
      cfg.lambda = heavy_traffic_lambda(spec.alpha, spec.beta, n);

      SimConfig sim = spec.sim;
      sim.seed = spec.base_seed;
      sim.stream = stream;
      double needed = spec.min_horizon_scale / (1.0 - cfg.lambda);
      if (needed > sim.horizon) {
        if (sim.warmup >= 0.0) sim.warmup *= needed / sim.horizon;
        sim.horizon = needed;
      }

      SimReport rep = run_aggregate(cfg, sim);

      SweepRow row;
      row.n = n;
      row.lambda = cfg.lambda;
      row.policy = policy.name();
      row.d = policy.type == PolicyType::Pod ? policy.d : 0;
      row.p_wait = rep.p_wait.mean;
      row.p_wait_ci95 = rep.p_wait.ci95;
      row.p_wait_ci99 = rep.p_wait.ci99;
      row.p_block = rep.p_block.mean;
      row.p_block_ci95 = rep.p_block.ci95;
      row.mean_total = rep.mean_total.mean;
      row.mean_total_ci95 = rep.mean_total.ci95;
      row.excess_mean = rep.excess_mean.mean;
      row.excess_mean_ci95 = rep.excess_mean.ci95;
      row.events = rep.events;
      row.seed = sim.seed;
      row.stream = stream;
      row.insufficient_data = rep.insufficient_data;

      if (cfg.coxian.normalized()) {
        CorollaryBounds cb = corollary_bounds(cfg);
        row.theorem_bound = cb.theorem_bound;
        row.theorem_applicable = cb.n_condition;
        if (policy.type == PolicyType::Jsq || policy.type == PolicyType::Pod) {
          row.corollary_bound = cb.p_wait_bound_jsq_pod;
          row.corollary_applicable = cb.n_condition && cb.jsq_pod_condition;
          if (policy.type == PolicyType::Pod)
            row.corollary_applicable =
                row.corollary_applicable &&
                static_cast<double>(policy.d) >= cb.pod_d_min;
        } else {
          row.corollary_bound = cb.p_wait_bound_jiq_i1f;
          row.corollary_applicable = cb.n_condition && cb.jiq_i1f_condition;
        }
      }
      out.rows.push_back(std::move(row));
      ++stream;
    }
  }

  out.fits = sweep_fits(spec, out.rows);
  return out;
}

// Decay fits, one pair per policy, using rows with a positive estimate and
// enough data; n = 1 is excluded (log n = 0 degenerates both regressors).
// The waiting-probability anchor matches the policy's predicted decay rate:
// log(n)/sqrt(n) for jsq/pod, 1/(n^(1/2-alpha) log n) for jiq/i1f.
std::vector<PolicySweepFits> sweep_fits(const SweepSpec& spec,
                                        const std::vector<SweepRow>& rows) {
  std::vector<PolicySweepFits> fits;
  for (const auto& policy : spec.policies) {
    PolicySweepFits pf;
    pf.policy = policy.name();
    bool idle_based =
        policy.type == PolicyType::Jiq || policy.type == PolicyType::I1f;
    pf.p_wait_anchor =
        idle_based ? "1/(n^(1/2-alpha)*log(n))" : "log(n)/sqrt(n)";
    pf.excess_anchor = "1/(sqrt(n)*log(n))";
    std::vector<double> xw, yw, xe, ye;
    for (const auto& row : rows) {
      if (row.policy != pf.policy || row.insufficient_data || row.n < 2) continue;
      double nn = static_cast<double>(row.n);
      double xn = idle_based
                      ? 1.0 / (std::pow(nn, 0.5 - spec.alpha) * std::log(nn))
                      : std::log(nn) / std::sqrt(nn);
      if (row.p_wait > 0.0) {
        xw.push_back(std::log(xn));
        yw.push_back(std::log(row.p_wait));
      }
      if (row.excess_mean > 0.0) {
        xe.push_back(std::log(1.0 / (std::sqrt(nn) * std::log(nn))));
        ye.push_back(std::log(row.excess_mean));
      }
    }
    auto fit_or_skip = [](SweepFit& f, const std::vector<double>& x,
                          const std::vector<double>& y) {
      if (x.size() < 2) {
        f.skipped_reason = "fewer than 2 usable points";
        return;
      }
      try {
        f.fit = ols_fit(x, y);
        f.fitted = true;
      } catch (const std::exception& e) {
        f.skipped_reason = e.what();
      }
    };
    fit_or_skip(pf.p_wait_decay, xw, yw);
    fit_or_skip(pf.excess_decay, xe, ye);
    fits.push_back(std::move(pf));
  }
  return fits;
}

std::string sweep_csv(const SweepResult& result) {
  std::string csv =
      "n,lambda,policy,d,p_wait,p_wait_ci95,p_wait_ci99,p_block,p_block_ci95,"
      "mean_total,mean_total_ci95,excess_mean,excess_mean_ci95,theorem_bound,"
      "theorem_applicable,corollary_bound,corollary_applicable,events,seed,"
      "stream,insufficient_data\n";
  for (const auto& r : result.rows) {
    csv += std::to_string(r.n) + ',' + fmt(r.lambda) + ',' + r.policy + ',' +
           std::to_string(r.d) + ',' + fmt(r.p_wait) + ',' + fmt(r.p_wait_ci95) +
           ',' + fmt(r.p_wait_ci99) + ',' + fmt(r.p_block) + ',' +
           fmt(r.p_block_ci95) + ',' + fmt(r.mean_total) + ',' +
           fmt(r.mean_total_ci95) + ',' + fmt(r.excess_mean) + ',' +
           fmt(r.excess_mean_ci95) + ',' + fmt(r.theorem_bound) + ',' +
           (r.theorem_applicable ? "1" : "0") + ',' + fmt(r.corollary_bound) +
           ',' + (r.corollary_applicable ? "1" : "0") + ',' +
           std::to_string(r.events) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.stream) + ',' + (r.insufficient_data ? "1" : "0") +
           '\n';
  }
  return csv;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << sweep_csv(result);
}

}  // namespace coxbalance
