#include "coxbalance/report_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coxbalance {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json estimate_json(const Estimate& e) {
  return ordered_json{{"mean", e.mean},
                      {"ci95", e.ci95},
                      {"ci99", e.ci99},
                      {"batches", e.batches}};
}

ordered_json config_json(const SystemConfig& cfg) {
  ordered_json j{{"n", cfg.n},
                 {"b", cfg.b},
                 {"lambda", cfg.lambda},
                 {"mu1", cfg.coxian.mu1},
                 {"mu2", cfg.coxian.mu2},
                 {"p", cfg.coxian.p},
                 {"policy", cfg.policy.name()}};
  if (cfg.heavy_traffic) {
    j["alpha"] = cfg.heavy_traffic->alpha;
    j["beta"] = cfg.heavy_traffic->beta;
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "n",      "b",        "mu1",     "mu2",
      "p",      "lambda",   "alpha",   "beta",
      "policy.kind", "policy.d", "policy.pod_sampling",
      "seed",   "stream",   "horizon", "warmup",
      "batches", "init",    "trace_interval"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config key '" + it.key() + "'");

  RunConfig rc;
  auto get_num = [&](const char* key, double& out) {
    if (!j.contains(key)) return false;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    out = j[key].get<double>();
    return true;
  };
  auto get_int = [&](const char* key, int64_t& out) {
    if (!j.contains(key)) return false;
    if (!j[key].is_number_integer())
      throw ConfigError(std::string(key) + " must be an integer");
    out = j[key].get<int64_t>();
    return true;
  };

  get_int("n", rc.system.n);
  int64_t b = rc.system.b;
  if (get_int("b", b)) rc.system.b = static_cast<int>(b);
  get_num("mu1", rc.system.coxian.mu1);
  get_num("mu2", rc.system.coxian.mu2);
  get_num("p", rc.system.coxian.p);

  bool has_lambda = j.contains("lambda");
  bool has_alpha = j.contains("alpha"), has_beta = j.contains("beta");
  if (has_alpha != has_beta)
    throw ConfigError("alpha and beta must be given together");
  if (has_alpha) {
    HeavyTraffic ht;
    get_num("alpha", ht.alpha);
    get_num("beta", ht.beta);
    rc.system.heavy_traffic = ht;
    rc.system.lambda = heavy_traffic_lambda(ht.alpha, ht.beta, rc.system.n);
    double lam = 0.0;
    if (has_lambda && get_num("lambda", lam) &&
        std::abs(lam - rc.system.lambda) > 1e-12)
      throw ConfigError("lambda contradicts alpha/beta at this n");
  } else if (has_lambda) {
    get_num("lambda", rc.system.lambda);
  } else {
    throw ConfigError("config needs lambda, or alpha and beta");
  }

  if (j.contains("policy.kind")) {
    std::string kind = j["policy.kind"].get<std::string>();
    int64_t d = 2;
    get_int("policy.d", d);
    std::string sampling = "without_replacement";
    if (j.contains("policy.pod_sampling"))
      sampling = j["policy.pod_sampling"].get<std::string>();
    rc.system.policy = PolicyKind::parse(kind, d, sampling);
  } else if (j.contains("policy.d") || j.contains("policy.pod_sampling")) {
    throw ConfigError("policy.d / policy.pod_sampling need policy.kind");
  }

  int64_t seed = 0, stream = 0, batches = 0;
  if (get_int("seed", seed)) rc.sim.seed = static_cast<uint64_t>(seed);
  if (get_int("stream", stream)) rc.sim.stream = static_cast<uint64_t>(stream);
  get_num("horizon", rc.sim.horizon);
  get_num("warmup", rc.sim.warmup);
  if (get_int("batches", batches)) rc.sim.batches = static_cast<int>(batches);
  get_num("trace_interval", rc.sim.trace_interval);
  if (j.contains("init")) {
    std::string init = j["init"].get<std::string>();
    if (init == "empty") {
      rc.sim.init = SimConfig::Init::Empty;
    } else if (init == "equilibrium") {
      rc.sim.init = SimConfig::Init::Equilibrium;
    } else {
      throw ConfigError("init must be empty or equilibrium, got '" + init + "'");
    }
  }

  rc.system.validate();
  rc.sim.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

std::string sim_report_json(const SimReport& rep) {
  ordered_json j;
  j["n"] = rep.n;
  j["b"] = rep.b;
  j["lambda"] = rep.lambda;
  j["policy"] = rep.policy;
  j["engine"] = rep.engine;
  j["horizon"] = rep.horizon;
  j["warmup"] = rep.warmup;
  j["batches"] = rep.batches;
  j["seed"] = rep.seed;
  j["stream"] = rep.stream;
  j["rng"] = rep.rng;
  j["events"] = rep.events;
  j["arrivals"] = rep.arrivals;
  j["arrivals_waited"] = rep.arrivals_waited;
  j["arrivals_blocked"] = rep.arrivals_blocked;
  j["insufficient_data"] = rep.insufficient_data;

  ordered_json ms = ordered_json::array();
  for (size_t k = 0; k < rep.mean_s.size(); ++k) {
    ordered_json row = estimate_json(rep.mean_s[k]);
    row["i"] = static_cast<int>(k / 2) + 1;
    row["m"] = static_cast<int>(k % 2) + 1;
    ms.push_back(std::move(row));
  }
  j["mean_s"] = std::move(ms);
  j["mean_total"] = estimate_json(rep.mean_total);
  j["p_wait"] = estimate_json(rep.p_wait);
  j["p_block"] = estimate_json(rep.p_block);
  j["mean_wait_defined"] = rep.mean_wait_defined;
  if (rep.mean_wait_defined) j["mean_wait"] = estimate_json(rep.mean_wait);
  j["ssc_defined"] = rep.ssc_defined;
  if (rep.ssc_defined) {
    j["eta"] = rep.eta;
    j["excess_mean"] = estimate_json(rep.excess_mean);
    j["p_not_ssc"] = estimate_json(rep.p_not_ssc);
  }
  if (rep.p_wait_upper99 >= 0.0) j["p_wait_upper99"] = rep.p_wait_upper99;
  if (rep.p_block_upper99 >= 0.0) j["p_block_upper99"] = rep.p_block_upper99;
  if (rep.p_not_ssc_upper99 >= 0.0) j["p_not_ssc_upper99"] = rep.p_not_ssc_upper99;
  if (!rep.trace.empty()) {
    ordered_json tr = ordered_json::array();
    for (const auto& [t, total] : rep.trace)
      tr.push_back(ordered_json{{"t", t}, {"total", total}});
    j["trace"] = std::move(tr);
  }
  return j.dump(2) + "\n";
}

std::string exact_report_json(const ExactSolution& sol, const ExactMetrics& metrics,
                              const SystemConfig& cfg) {
  ordered_json j;
  j["config"] = config_json(cfg);
  j["solver"] = ordered_json{{"method", sol.dist.method},
                             {"states", sol.space.size()},
                             {"full_space_size", sol.full_space_size},
                             {"reducible", sol.reducible},
                             {"residual_inf", sol.dist.residual_inf},
                             {"iterations", sol.dist.iterations},
                             {"converged", sol.dist.converged}};

  ordered_json ms = ordered_json::array();
  for (size_t k = 0; k < metrics.mean_s.size(); ++k)
    ms.push_back(ordered_json{{"i", static_cast<int>(k / 2) + 1},
                              {"m", static_cast<int>(k % 2) + 1},
                              {"mean", metrics.mean_s[k]}});
  ordered_json mj;
  mj["mean_s"] = std::move(ms);
  mj["mean_total"] = metrics.mean_total;
  mj["p_wait"] = metrics.p_wait;
  mj["p_block"] = metrics.p_block;
  mj["mean_wait_defined"] = metrics.mean_wait_defined;
  if (metrics.mean_wait_defined) mj["mean_wait"] = metrics.mean_wait;
  mj["ssc_defined"] = metrics.ssc_defined;
  if (metrics.ssc_defined) {
    mj["p_not_ssc"] = metrics.p_not_ssc;
    mj["excess_mean"] = metrics.excess_mean;
  }
  j["metrics"] = std::move(mj);

  ordered_json dist = ordered_json::array();
  for (int64_t i = 0; i < sol.space.size(); ++i) {
    dist.push_back(
        ordered_json{{"counts", sol.space.state(i).counts},
                     {"probability", sol.dist.pi[static_cast<size_t>(i)]}});
  }
  j["distribution"] = std::move(dist);
  return j.dump(2) + "\n";
}

std::string verify_report_json(const VerifyReport& rep) {
  ordered_json j;
  j["suite"] = rep.suite;
  j["passed"] = rep.passed();
  j["failed"] = rep.failed();
  j["inapplicable"] = rep.inapplicable();
  j["ok"] = rep.ok();
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json cj{{"check_id", c.check_id},
                    {"instance", c.instance},
                    {"status", check_status_name(c.status)}};
    if (c.status != CheckStatus::Inapplicable) cj["worst_slack"] = c.worst_slack;
    if (!c.witness.empty()) cj["witness"] = c.witness;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace coxbalance
