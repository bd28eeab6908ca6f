#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coxbalance/types.hpp"

namespace coxbalance {

enum class CheckStatus { Pass, Fail, Inapplicable };

std::string check_status_name(CheckStatus s);

// One verified claim on one instance. worst_slack is the amount by which the
// checked quantity exceeds its allowance, so <= 0 means margin; witness
// pins down a violating state or point when there is one.
struct CheckResult {
  std::string check_id;
  std::string instance;
  CheckStatus status = CheckStatus::Pass;
  double worst_slack = 0.0;
  std::string witness;
  std::string note;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;

  int64_t passed() const;
  int64_t failed() const;
  int64_t inapplicable() const;
  // Inapplicable checks (side conditions out of reach at this n, empty
  // premises) never fail a run.
  bool ok() const { return failed() == 0; }
};

struct VerifyOptions {
  // Policies to exercise; empty means the built-in four
  // (jsq, jiq, i1f, pod d=2).
  std::vector<PolicyKind> policies;
  // Extra (n, b) instances appended to every suite's built-in grid.
  std::vector<std::pair<int64_t, int>> extra_grid;
};

// Suites: "stein" (equation identity, gradient envelopes, remainder bound),
// "drift" (Lyapunov drift lemmas, closed forms vs. generator), "tail"
// (geometric tail bounds), "ssc" (collapse-set containment, minimum
// departure-rate corners), "pi" (policy-family membership), "corollary"
// (closed-form bound sanity across service-time sets), or "all".
std::vector<std::string> verify_suites();

VerifyReport verify_suite(const std::string& suite, const VerifyOptions& opts = {});

// Human-readable one-line-per-check rendering.
std::string format_verify_report(const VerifyReport& report);

}  // namespace coxbalance
