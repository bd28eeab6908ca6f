#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "coxbalance/state.hpp"
#include "coxbalance/types.hpp"

namespace coxbalance {

// Number of aggregate states: compositions of n into 2b+1 classes,
// C(n + 2b, 2b). Saturates at int64 max on overflow.
int64_t state_space_cardinality(int64_t n, int b);

// Enumeration cap; COXBALANCE_STATE_CAP overrides the 2e6 default.
int64_t default_state_cap();

// Explicit list of aggregate states in lexicographic order of the flat
// count vector, with O(1) index lookup.
class StateSpace {
 public:
  StateSpace(int64_t n, int b, std::vector<AggregateState> states);

  int64_t n() const { return n_; }
  int b() const { return b_; }
  int64_t size() const { return static_cast<int64_t>(states_.size()); }
  const AggregateState& state(int64_t idx) const { return states_[static_cast<size_t>(idx)]; }
  const std::vector<AggregateState>& states() const { return states_; }

  // Index of a state, or -1 if absent.
  int64_t lookup(const AggregateState& st) const;

  // Sub-space containing only the given indices (in the given order).
  StateSpace restrict(const std::vector<int64_t>& keep) const;

 private:
  struct VecHash {
    size_t operator()(const std::vector<int64_t>& v) const;
  };
  int64_t n_;
  int b_;
  std::vector<AggregateState> states_;
  std::unordered_map<std::vector<int64_t>, int64_t, VecHash> index_;
};

// Full enumeration of all states for (n, b). Throws CapExceeded (naming the
// required cap) if the cardinality exceeds `cap`.
StateSpace enumerate_states(int64_t n, int b, int64_t cap = default_state_cap());

// Indices (ascending) of the states reachable from the empty state under
// the policy's transition structure. The chain restricted to this class is
// irreducible; phase-2 classes, for instance, drop out when p = 0.
std::vector<int64_t> reachable_from_empty(const StateSpace& space,
                                          const PolicyKind& policy,
                                          const SystemConfig& cfg);

}  // namespace coxbalance
