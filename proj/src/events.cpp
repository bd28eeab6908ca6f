#include "coxbalance/events.hpp"

#include <cmath>
#include <string>

namespace coxbalance {

void apply_event(AggregateState& state, const TransitionEvent& ev) {
  switch (ev.type) {
    case EventType::Arrival:
      if (ev.level == state.b) return;  // blocked
      if (ev.level == 0) {
        --state.counts[0];
        ++state.count(1, 1);
      } else {
        --state.count(ev.level, ev.phase);
        ++state.count(ev.level + 1, ev.phase);
      }
      return;
    case EventType::Phase1Departure:
      --state.count(ev.level, 1);
      if (ev.level == 1) {
        ++state.counts[0];
      } else {
        ++state.count(ev.level - 1, 1);  // next job starts in phase 1
      }
      return;
    case EventType::Phase1ToPhase2:
      --state.count(ev.level, 1);
      ++state.count(ev.level, 2);
      return;
    case EventType::Phase2Departure:
      --state.count(ev.level, 2);
      if (ev.level == 1) {
        ++state.counts[0];
      } else {
        ++state.count(ev.level - 1, 1);
      }
      return;
  }
}

AggregateState next_state(const AggregateState& state, const TransitionEvent& ev) {
  AggregateState out = state;
  apply_event(out, ev);
  return out;
}

std::vector<TransitionEvent> enabled_transitions(const AggregateState& state,
                                                 const RoutingDistribution& routing,
                                                 const SystemConfig& cfg) {
  if (routing.r.size() != state.counts.size())
    throw ConfigError("enabled_transitions: routing layout does not match state");
  std::vector<TransitionEvent> events;
  events.reserve(static_cast<size_t>(5 * state.b + 1));
  const double arr = cfg.total_arrival_rate();

  if (routing.idle() > 0.0) {
    if (state.idle() == 0)
      throw ConfigError("routing puts mass on the idle class of a fully busy state");
    events.push_back({EventType::Arrival, 0, 1, arr * routing.idle()});
  }
  for (int j = 1; j <= state.b; ++j) {
    for (int m = 1; m <= 2; ++m) {
      double mass = routing.at(j, m);
      if (mass <= 0.0) continue;
      if (state.count(j, m) == 0)
        throw ConfigError("routing puts mass on empty class (" + std::to_string(j) +
                          "," + std::to_string(m) + ")");
      events.push_back({EventType::Arrival, j, m, arr * mass});
    }
  }
  const double mu1 = cfg.coxian.mu1, mu2 = cfg.coxian.mu2, p = cfg.coxian.p;
  for (int i = 1; i <= state.b; ++i) {
    double c1 = static_cast<double>(state.count(i, 1));
    if (c1 > 0.0) {
      if (p < 1.0)
        events.push_back({EventType::Phase1Departure, i, 1, (1.0 - p) * mu1 * c1});
      if (p > 0.0)
        events.push_back({EventType::Phase1ToPhase2, i, 1, p * mu1 * c1});
    }
    double c2 = static_cast<double>(state.count(i, 2));
    if (c2 > 0.0)
      events.push_back({EventType::Phase2Departure, i, 2, mu2 * c2});
  }
  return events;
}

double apply_generator(const std::function<double(const AggregateState&)>& f,
                       const AggregateState& state,
                       const RoutingDistribution& routing,
                       const SystemConfig& cfg) {
  double fs = f(state);
  double acc = 0.0;
  for (const auto& ev : enabled_transitions(state, routing, cfg)) {
    if (ev.type == EventType::Arrival && ev.level == state.b) continue;
    acc += ev.rate * (f(next_state(state, ev)) - fs);
  }
  return acc;
}

double total_departure_rate(const AggregateState& state, const CoxianParams& coxian) {
  auto tail = state.suffix_counts();
  double n = static_cast<double>(state.n);
  double s11 = static_cast<double>(tail[0]) / n;
  double s12 = static_cast<double>(tail[1]) / n;
  return (1.0 - coxian.p) * coxian.mu1 * s11 + coxian.mu2 * s12;
}

}  // namespace coxbalance
