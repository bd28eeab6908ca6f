// Command-line front end: single simulations, exact solves, verification
// suites, heavy-traffic sweeps, and report rendering.
//
// Exit codes: 0 ok, 2 bad configuration or arguments, 3 data problem
// (insufficient samples, unreadable inputs, non-convergence), 4 state-space
// or server cap exceeded, 5 verification failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coxbalance/exact_metrics.hpp"
#include "coxbalance/report_io.hpp"
#include "coxbalance/simulate.hpp"
#include "coxbalance/stationary.hpp"
#include "coxbalance/sweep.hpp"
#include "coxbalance/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCap = 4;
constexpr int kExitVerify = 5;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    coxbalance::write_text_file(out_path, text);
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 bool per_server, std::optional<double> horizon,
                 std::optional<double> warmup, std::optional<uint64_t> seed,
                 std::optional<uint64_t> stream, std::optional<int> batches,
                 std::optional<double> trace, const std::string& trace_out) {
  coxbalance::RunConfig rc = coxbalance::load_run_config(config_path);
  if (horizon) rc.sim.horizon = *horizon;
  if (warmup) rc.sim.warmup = *warmup;
  if (seed) rc.sim.seed = *seed;
  if (stream) rc.sim.stream = *stream;
  if (batches) rc.sim.batches = *batches;
  if (trace) rc.sim.trace_interval = *trace;
  rc.system.validate();
  rc.sim.validate();

  coxbalance::SimReport rep = per_server
                                  ? coxbalance::per_server_microsim(rc.system, rc.sim)
                                  : coxbalance::run_aggregate(rc.system, rc.sim);
  emit(coxbalance::sim_report_json(rep), out_path);
  if (!trace_out.empty()) {
    std::string csv = "t,total\n";
    char buf[64];
    for (const auto& [t, total] : rep.trace) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, total);
      csv += buf;
    }
    coxbalance::write_text_file(trace_out, csv);
  }
  std::fprintf(stderr, "events: %lld, wall clock: %.3fs\n",
               static_cast<long long>(rep.events), rep.wall_clock_seconds);
  if (rep.insufficient_data) {
    std::fprintf(stderr,
                 "insufficient data: %lld post-warmup arrivals (< 10)\n",
                 static_cast<long long>(rep.arrivals));
    return kExitData;
  }
  return kExitOk;
}

int cmd_exact(const std::string& config_path, const std::string& out_path,
              std::optional<int64_t> cap) {
  coxbalance::RunConfig rc = coxbalance::load_run_config(config_path);
  coxbalance::ExactSolution sol = coxbalance::solve_exact(
      rc.system, cap ? *cap : coxbalance::default_state_cap());
  coxbalance::ExactMetrics metrics = coxbalance::exact_metrics(
      sol.space, sol.dist.pi, rc.system.policy, rc.system);
  emit(coxbalance::exact_report_json(sol, metrics, rc.system), out_path);
  if (!sol.dist.converged) {
    std::fprintf(stderr, "solver did not converge: residual %.3g\n",
                 sol.dist.residual_inf);
    return kExitData;
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& out_path,
               const std::string& policy, int64_t d, const std::string& sampling,
               std::optional<int64_t> extra_n, std::optional<int> extra_b) {
  coxbalance::VerifyOptions opts;
  if (!policy.empty())
    opts.policies = {coxbalance::PolicyKind::parse(policy, d, sampling)};
  if (extra_n.has_value() != extra_b.has_value())
    throw coxbalance::ConfigError("--n and --b must be given together");
  if (extra_n) opts.extra_grid.emplace_back(*extra_n, *extra_b);

  coxbalance::VerifyReport rep = coxbalance::verify_suite(suite, opts);
  std::cout << coxbalance::format_verify_report(rep);
  if (!out_path.empty())
    coxbalance::write_text_file(out_path, coxbalance::verify_report_json(rep));
  return rep.ok() ? kExitOk : kExitVerify;
}

int cmd_sweep(const std::string& n_list, double alpha, double beta,
              const std::string& policy_list, int64_t d, int b, double mu1,
              double mu2, double p, double horizon, double warmup, int batches,
              double scale, uint64_t seed, const std::string& out_path) {
  coxbalance::SweepSpec spec;
  for (const auto& tok : split_csv(n_list)) {
    if (tok.empty()) continue;
    spec.n_grid.push_back(std::stoll(tok));
  }
  spec.alpha = alpha;
  spec.beta = beta;
  for (const auto& tok : split_csv(policy_list)) {
    if (tok.empty()) continue;
    spec.policies.push_back(coxbalance::PolicyKind::parse(tok, d));
  }
  spec.b = b;
  spec.coxian = {mu1, mu2, p};
  spec.sim.horizon = horizon;
  spec.sim.warmup = warmup;
  spec.sim.batches = batches;
  spec.min_horizon_scale = scale;
  spec.base_seed = seed;

  coxbalance::SweepResult result = coxbalance::run_sweep(spec);
  coxbalance::write_sweep_csv(result, out_path);

  bool enough = true;
  for (const auto& pf : result.fits) {
    int64_t usable = 0;
    for (const auto& row : result.rows)
      if (row.policy == pf.policy && !row.insufficient_data) ++usable;
    if (usable < 4) enough = false;
    auto show = [&](const char* label, const coxbalance::SweepFit& f) {
      if (f.fitted) {
        std::printf("%s %s: slope=%.6g intercept=%.6g r2=%.6g points=%lld\n",
                    pf.policy.c_str(), label, f.fit.slope, f.fit.intercept,
                    f.fit.r2, static_cast<long long>(f.fit.points));
      } else {
        std::printf("%s %s: fit skipped (%s)\n", pf.policy.c_str(), label,
                    f.skipped_reason.c_str());
      }
    };
    show("p_wait decay", pf.p_wait_decay);
    show("excess decay", pf.excess_decay);
  }
  std::printf("wrote %zu rows to %s\n", result.rows.size(), out_path.c_str());
  if (!enough) {
    std::fprintf(stderr, "fewer than 4 usable grid points for some policy\n");
    return kExitData;
  }
  return kExitOk;
}

int cmd_report(const std::string& in_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(coxbalance::read_text_file(in_path));
  } catch (const nlohmann::json::parse_error& e) {
    std::fprintf(stderr, "%s is not valid JSON: %s\n", in_path.c_str(), e.what());
    return kExitData;
  }
  auto est = [&](const nlohmann::json& e) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6g +- %.2g (95%%) / %.2g (99%%)",
                  e.value("mean", 0.0), e.value("ci95", 0.0), e.value("ci99", 0.0));
    return std::string(buf);
  };
  if (j.contains("checks")) {
    std::printf("verification suite '%s': %lld passed, %lld failed, %lld inapplicable\n",
                j.value("suite", std::string("?")).c_str(),
                static_cast<long long>(j.value("passed", 0)),
                static_cast<long long>(j.value("failed", 0)),
                static_cast<long long>(j.value("inapplicable", 0)));
    for (const auto& c : j["checks"])
      if (c.value("status", "") == "fail")
        std::printf("  failed: %s on %s\n", c.value("check_id", "").c_str(),
                    c.value("instance", "").c_str());
  } else if (j.contains("distribution")) {
    const auto& cfg = j["config"];
    std::printf("exact solve: n=%lld b=%d lambda=%g policy=%s\n",
                static_cast<long long>(cfg.value("n", 0)), cfg.value("b", 0),
                cfg.value("lambda", 0.0), cfg.value("policy", std::string("?")).c_str());
    const auto& sv = j["solver"];
    std::printf("  %lld states (%s), residual %.3g\n",
                static_cast<long long>(sv.value("states", 0)),
                sv.value("method", std::string("?")).c_str(),
                sv.value("residual_inf", 0.0));
    const auto& m = j["metrics"];
    std::printf("  E[sum S]=%.6g  P(wait)=%.6g  P(block)=%.6g\n",
                m.value("mean_total", 0.0), m.value("p_wait", 0.0),
                m.value("p_block", 0.0));
  } else if (j.contains("engine")) {
    std::printf("simulation: n=%lld b=%d lambda=%g policy=%s engine=%s\n",
                static_cast<long long>(j.value("n", 0)), j.value("b", 0),
                j.value("lambda", 0.0), j.value("policy", std::string("?")).c_str(),
                j.value("engine", std::string("?")).c_str());
    std::printf("  events=%lld arrivals=%lld%s\n",
                static_cast<long long>(j.value("events", 0)),
                static_cast<long long>(j.value("arrivals", 0)),
                j.value("insufficient_data", false) ? "  [insufficient data]" : "");
    std::printf("  E[sum S] = %s\n", est(j["mean_total"]).c_str());
    std::printf("  P(wait)  = %s\n", est(j["p_wait"]).c_str());
    std::printf("  P(block) = %s\n", est(j["p_block"]).c_str());
  } else {
    std::fprintf(stderr, "%s: unrecognized report layout\n", in_path.c_str());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state toolkit for many-server load balancing with "
               "Coxian-2 service: simulator, exact solver, verification "
               "suites, scaling sweeps"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run one simulation replication");
  std::string sim_config, sim_out, sim_trace_out;
  bool per_server = false;
  std::optional<double> sim_horizon, sim_warmup, sim_trace;
  std::optional<uint64_t> sim_seed, sim_stream;
  std::optional<int> sim_batches;
  sim_cmd->add_option("--config", sim_config, "JSON config file")->required();
  sim_cmd->add_option("--out", sim_out, "report file (default: stdout)");
  sim_cmd->add_option("--horizon", sim_horizon, "override horizon");
  sim_cmd->add_option("--warmup", sim_warmup, "override warmup");
  sim_cmd->add_option("--seed", sim_seed, "override seed");
  sim_cmd->add_option("--stream", sim_stream, "override stream");
  sim_cmd->add_option("--batches", sim_batches, "override batch count");
  sim_cmd->add_option("--trace", sim_trace, "trace interval for (t, sum S)");
  sim_cmd->add_option("--trace-out", sim_trace_out, "trace CSV file");
  sim_cmd->add_flag("--per-server", per_server,
                    "use the per-server engine (n <= 256)");

  // exact
  auto* exact_cmd = app.add_subcommand("exact", "Solve the chain exactly");
  std::string exact_config, exact_out;
  std::optional<int64_t> exact_cap;
  exact_cmd->add_option("--config", exact_config, "JSON config file")->required();
  exact_cmd->add_option("--out", exact_out, "report file (default: stdout)");
  exact_cmd->add_option("--cap", exact_cap,
                        "state-space cap (default: COXBALANCE_STATE_CAP or 2e6)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  std::string suite, verify_out, verify_policy, verify_sampling = "without_replacement";
  int64_t verify_d = 2;
  std::optional<int64_t> verify_n;
  std::optional<int> verify_b;
  verify_cmd->add_option("suite", suite, "stein|drift|tail|ssc|pi|corollary|all")
      ->required();
  verify_cmd->add_option("--policy", verify_policy,
                         "restrict to one policy (jsq|jiq|i1f|pod)");
  verify_cmd->add_option("--d", verify_d, "pod sample size (with --policy pod)");
  verify_cmd->add_option("--sampling", verify_sampling,
                         "pod sampling: without_replacement|with_replacement");
  verify_cmd->add_option("--n", verify_n, "extra instance: servers");
  verify_cmd->add_option("--b", verify_b, "extra instance: buffer");
  verify_cmd->add_option("--out", verify_out, "JSON report file");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Heavy-traffic scaling sweep");
  std::string sweep_n = "250,1000,4000,16000,64000";
  std::string sweep_policies = "jsq";
  std::string sweep_out = "sweep.csv";
  double sweep_alpha = 0.3, sweep_beta = 1.0;
  int64_t sweep_d = 2;
  int sweep_b = 4;
  double sweep_mu1 = 2.0, sweep_mu2 = 1.0, sweep_p = 0.5;
  double sweep_horizon = 8000.0, sweep_warmup = -1.0, sweep_scale = 200.0;
  int sweep_batches = 32;
  uint64_t sweep_seed = 1;
  sweep_cmd->add_option("--n-grid", sweep_n, "comma-separated n values, ascending");
  sweep_cmd->add_option("--alpha", sweep_alpha, "lambda = 1 - beta n^-alpha");
  sweep_cmd->add_option("--beta", sweep_beta, "load scale");
  sweep_cmd->add_option("--policies", sweep_policies, "comma-separated policies");
  sweep_cmd->add_option("--d", sweep_d, "pod sample size");
  sweep_cmd->add_option("--b", sweep_b, "per-server buffer");
  sweep_cmd->add_option("--mu1", sweep_mu1, "phase-1 rate");
  sweep_cmd->add_option("--mu2", sweep_mu2, "phase-2 rate");
  sweep_cmd->add_option("--p", sweep_p, "phase-2 entry probability");
  sweep_cmd->add_option("--horizon", sweep_horizon, "base horizon per point");
  sweep_cmd->add_option("--warmup", sweep_warmup, "warmup (< 0: 20% of horizon)");
  sweep_cmd->add_option("--batches", sweep_batches, "batch count");
  sweep_cmd->add_option("--min-horizon-scale", sweep_scale,
                        "horizon >= scale/(1-lambda)");
  sweep_cmd->add_option("--seed", sweep_seed, "base seed");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path");

  // report
  auto* report_cmd = app.add_subcommand("report", "Render a saved JSON report");
  std::string report_in;
  report_cmd->add_option("--in", report_in, "report file to render")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim_cmd->parsed())
      return cmd_simulate(sim_config, sim_out, per_server, sim_horizon,
                          sim_warmup, sim_seed, sim_stream, sim_batches,
                          sim_trace, sim_trace_out);
    if (exact_cmd->parsed()) return cmd_exact(exact_config, exact_out, exact_cap);
    if (verify_cmd->parsed())
      return cmd_verify(suite, verify_out, verify_policy, verify_d,
                        verify_sampling, verify_n, verify_b);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_n, sweep_alpha, sweep_beta, sweep_policies, sweep_d,
                       sweep_b, sweep_mu1, sweep_mu2, sweep_p, sweep_horizon,
                       sweep_warmup, sweep_batches, sweep_scale, sweep_seed,
                       sweep_out);
    if (report_cmd->parsed()) return cmd_report(report_in);
  } catch (const coxbalance::CapExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCap;
  } catch (const coxbalance::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitConfig;
}
