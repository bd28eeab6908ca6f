#pragma once

#include <functional>
#include <vector>

#include "coxbalance/policies.hpp"
#include "coxbalance/state.hpp"
#include "coxbalance/types.hpp"

namespace coxbalance {

enum class EventType {
  Arrival,           // routed to a server currently in class (level, phase)
  Phase1Departure,   // phase-1 completion, job leaves (prob 1-p branch)
  Phase1ToPhase2,    // phase-1 completion, job continues in phase 2
  Phase2Departure,   // phase-2 completion, job leaves
};

// One enabled transition of the aggregate chain. For arrivals, level/phase
// name the destination server's class before the arrival; level == b means
// the arrival is blocked and the state does not change. For the service
// events, level is the queue length of the serving server and the phase is
// implied by the event type.
struct TransitionEvent {
  EventType type = EventType::Arrival;
  int level = 0;
  int phase = 1;
  double rate = 0.0;
};

// In-place state update; blocked arrivals are a no-op.
void apply_event(AggregateState& state, const TransitionEvent& ev);

AggregateState next_state(const AggregateState& state, const TransitionEvent& ev);

// All transitions with positive rate out of `state` under the given routing.
// Blocked arrivals are included (they matter to the simulator's arrival
// accounting) even though they do not move the state. Throws if the routing
// puts mass on an unoccupied class.
std::vector<TransitionEvent> enabled_transitions(const AggregateState& state,
                                                 const RoutingDistribution& routing,
                                                 const SystemConfig& cfg);

// Generator applied to a scalar test function:
//   (Gf)(s) = sum over enabled transitions of rate * (f(next) - f(s)).
// Self-loops (blocked arrivals) contribute nothing.
double apply_generator(const std::function<double(const AggregateState&)>& f,
                       const AggregateState& state,
                       const RoutingDistribution& routing,
                       const SystemConfig& cfg);

// Per-server total departure rate (1-p)*mu1*s_{1,1} + mu2*s_{1,2}.
double total_departure_rate(const AggregateState& state, const CoxianParams& coxian);

}  // namespace coxbalance
