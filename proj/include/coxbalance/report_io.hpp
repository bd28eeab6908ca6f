#pragma once

#include <string>

#include "coxbalance/exact_metrics.hpp"
#include "coxbalance/simulate.hpp"
#include "coxbalance/stationary.hpp"
#include "coxbalance/verify.hpp"

namespace coxbalance {

// One run as described by a flat JSON config:
//   n, b, mu1, mu2, p, lambda (or alpha + beta), policy.kind, policy.d,
//   policy.pod_sampling, seed, stream, horizon, warmup, batches, init,
//   trace_interval
// Unknown keys are rejected, so typos fail loudly.
struct RunConfig {
  SystemConfig system;
  SimConfig sim;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical JSON reports: fixed key order, so identical inputs produce
// identical bytes. Wall-clock time is deliberately not serialized; it goes
// to stderr where it cannot break reproducibility.
std::string sim_report_json(const SimReport& rep);
std::string exact_report_json(const ExactSolution& sol, const ExactMetrics& metrics,
                              const SystemConfig& cfg);
std::string verify_report_json(const VerifyReport& rep);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace coxbalance
