#pragma once

#include <span>
#include <vector>

#include "coxbalance/state.hpp"
#include "coxbalance/types.hpp"

namespace coxbalance {

// Distribution of the class an arrival is routed to, in the same flat class
// layout as AggregateState::counts: r[0] is the idle class (0,1), then
// r[(j,m)] for j = 1..b. Mass on level b means the arrival is blocked.
struct RoutingDistribution {
  int b = 0;
  std::vector<double> r;

  double idle() const { return r[0]; }
  double at(int j, int m) const {
    return r[static_cast<size_t>(1 + (j - 1) * 2 + (m - 1))];
  }
  // Tail routing mass A_{i,m} = sum_{j >= i} r[(j,m)], i >= 1.
  double tail(int i, int m) const;
  // Probability the arrival joins a busy server (waits): 1 - r[0].
  double a1() const { return 1.0 - r[0]; }
  // Probability the arrival is blocked (routed to a full server).
  double blocked() const { return at(b, 1) + at(b, 2); }

  double mass() const;
};

// Exact routing distribution of the policy at an aggregate state.
// JSQ puts all mass on the minimum occupied level, split across phases in
// proportion to the class counts. JIQ prefers an idle server, else routes
// uniformly across all servers; I1F additionally prefers single-job servers.
// Pod samples d servers (without replacement by default) and joins the
// least-loaded sample; the phase split again follows class proportions.
RoutingDistribution routing_distribution(const PolicyKind& policy,
                                         const AggregateState& state);

// Same, writing into caller-provided storage of size 2b+1 (hot paths).
void routing_distribution_into(const PolicyKind& policy,
                               const AggregateState& state,
                               std::span<double> out);

// Probability of not being routed to an idle server.
double a1(const PolicyKind& policy, const AggregateState& state);

// Membership check for the policy family the main results cover: every
// state whose busy fraction s_1 stays below lambda + (1+mu1+mu2)/w_l *
// log(n)/sqrt(n) must route to an idle server with probability >= 1 - 1/sqrt(n).
// States with no idle servers (s_1 = 1) are excluded: no policy can route
// to an idle server there, and the condition is only informative below
// saturation. If the threshold reaches 1 the check is vacuously restricted
// and flagged, never failed.
struct PiMembershipReport {
  bool holds = true;
  bool vacuous_threshold = false;
  double threshold = 0.0;        // busy-fraction cutoff actually applied
  double a1_limit = 0.0;         // 1/sqrt(n)
  int64_t states_checked = 0;
  double worst_excess = 0.0;     // max a1 - a1_limit over checked states
  std::vector<AggregateState> witnesses;  // up to 8 violating states
};

PiMembershipReport pi_membership_check(const PolicyKind& policy,
                                       const SystemConfig& cfg,
                                       std::span<const AggregateState> states);

}  // namespace coxbalance
