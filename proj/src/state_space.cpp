#include "coxbalance/state_space.hpp"

#include <cstdlib>
#include <deque>
#include <limits>
#include <string>

#include "coxbalance/events.hpp"

namespace coxbalance {

int64_t state_space_cardinality(int64_t n, int b) {
  // C(n + 2b, 2b) with overflow saturation.
  const int64_t kMax = std::numeric_limits<int64_t>::max();
  __int128 acc = 1;
  for (int i = 1; i <= 2 * b; ++i) {
    acc = acc * (n + i) / i;  // exact: product of i consecutive ints divisible by i!
    if (acc > kMax) return kMax;
  }
  return static_cast<int64_t>(acc);
}

int64_t default_state_cap() {
  if (const char* env = std::getenv("COXBALANCE_STATE_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int64_t>(v);
    throw ConfigError("COXBALANCE_STATE_CAP must be a positive integer");
  }
  return 2'000'000;
}

size_t StateSpace::VecHash::operator()(const std::vector<int64_t>& v) const {
  size_t h = 0x9e3779b97f4a7c15ULL;
  for (int64_t x : v) {
    h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

StateSpace::StateSpace(int64_t n, int b, std::vector<AggregateState> states)
    : n_(n), b_(b), states_(std::move(states)) {
  index_.reserve(states_.size() * 2);
  for (size_t i = 0; i < states_.size(); ++i)
    index_.emplace(states_[i].counts, static_cast<int64_t>(i));
}

int64_t StateSpace::lookup(const AggregateState& st) const {
  auto it = index_.find(st.counts);
  return it == index_.end() ? -1 : it->second;
}

StateSpace StateSpace::restrict(const std::vector<int64_t>& keep) const {
  std::vector<AggregateState> sub;
  sub.reserve(keep.size());
  for (int64_t idx : keep) sub.push_back(states_[static_cast<size_t>(idx)]);
  return StateSpace(n_, b_, std::move(sub));
}

StateSpace enumerate_states(int64_t n, int b, int64_t cap) {
  int64_t card = state_space_cardinality(n, b);
  if (card > cap)
    throw CapExceeded("state space for n=" + std::to_string(n) + ", b=" +
                      std::to_string(b) + " has " + std::to_string(card) +
                      " states; raise the cap to at least " + std::to_string(card) +
                      " (COXBALANCE_STATE_CAP), current cap " + std::to_string(cap));
  std::vector<AggregateState> states;
  states.reserve(static_cast<size_t>(card));
  const int classes = 2 * b + 1;
  std::vector<int64_t> counts(static_cast<size_t>(classes), 0);
  // Lexicographic enumeration over the flat count vector.
  auto rec = [&](auto&& self, int pos, int64_t remaining) -> void {
    if (pos == classes - 1) {
      counts[static_cast<size_t>(pos)] = remaining;
      AggregateState st;
      st.n = n;
      st.b = b;
      st.counts = counts;
      states.push_back(std::move(st));
      return;
    }
    for (int64_t c = 0; c <= remaining; ++c) {
      counts[static_cast<size_t>(pos)] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, n);
  return StateSpace(n, b, std::move(states));
}

std::vector<int64_t> reachable_from_empty(const StateSpace& space,
                                          const PolicyKind& policy,
                                          const SystemConfig& cfg) {
  std::vector<char> seen(static_cast<size_t>(space.size()), 0);
  std::deque<int64_t> frontier;
  int64_t start = space.lookup(AggregateState::empty(space.n(), space.b()));
  if (start < 0) throw std::logic_error("empty state missing from enumeration");
  seen[static_cast<size_t>(start)] = 1;
  frontier.push_back(start);
  while (!frontier.empty()) {
    int64_t idx = frontier.front();
    frontier.pop_front();
    const AggregateState& st = space.state(idx);
    auto routing = routing_distribution(policy, st);
    for (const auto& ev : enabled_transitions(st, routing, cfg)) {
      if (ev.type == EventType::Arrival && ev.level == st.b) continue;
      int64_t nxt = space.lookup(next_state(st, ev));
      if (nxt < 0) throw std::logic_error("transition left the enumerated space");
      if (!seen[static_cast<size_t>(nxt)]) {
        seen[static_cast<size_t>(nxt)] = 1;
        frontier.push_back(nxt);
      }
    }
  }
  std::vector<int64_t> out;
  for (int64_t i = 0; i < space.size(); ++i)
    if (seen[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace coxbalance
