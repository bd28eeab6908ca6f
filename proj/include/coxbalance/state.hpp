#pragma once

#include <cstdint>
#include <vector>

#include "coxbalance/types.hpp"

namespace coxbalance {

// Tail-mass (suffix) view of a state: s(i,m) is the fraction of servers
// holding at least i jobs whose in-service job is in phase m. Columns are
// nonincreasing in i by construction. total() is the per-server job count
// sum_i (s(i,1) + s(i,2)).
struct SuffixFractions {
  int b = 0;
  std::vector<double> v;  // row-major: (i-1)*2 + (m-1), i = 1..b

  double s(int i, int m) const {
    if (i > b) return 0.0;
    return v[static_cast<size_t>(i - 1) * 2 + static_cast<size_t>(m - 1)];
  }
  double level(int i) const { return i > b ? 0.0 : s(i, 1) + s(i, 2); }
  double total() const {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
};

// Aggregate (exchangeable) state of the n-server system: how many servers
// are idle and how many hold j jobs with the in-service job in phase m.
// Flat layout, also used for serialization:
//   counts = [idle, n(1,1), n(1,2), n(2,1), n(2,2), ..., n(b,1), n(b,2)]
struct AggregateState {
  int64_t n = 0;
  int b = 0;
  std::vector<int64_t> counts;

  static AggregateState empty(int64_t n, int b);
  // Validates the layout and that entries are nonnegative and sum to n.
  static AggregateState from_counts(int64_t n, int b, std::vector<int64_t> counts);

  int64_t idle() const { return counts[0]; }
  int64_t count(int j, int m) const {  // j in 1..b, m in 1..2
    return counts[static_cast<size_t>(1 + (j - 1) * 2 + (m - 1))];
  }
  int64_t& count(int j, int m) {
    return counts[static_cast<size_t>(1 + (j - 1) * 2 + (m - 1))];
  }
  int64_t level_count(int j) const { return count(j, 1) + count(j, 2); }

  int64_t total_jobs() const;
  int64_t busy() const { return n - idle(); }

  // Occupancy fraction of class (j, m); q(0, 1) is the idle fraction.
  double q(int j, int m) const;

  // Smallest occupied level: 0 if any server is idle, else min {j : n_j > 0};
  // equals b when every server is full.
  int min_occupied_level() const;

  // Integer suffix counts (n * s(i,m)), an exact bijection with counts.
  std::vector<int64_t> suffix_counts() const;
  static AggregateState from_suffix_counts(int64_t n, int b,
                                           const std::vector<int64_t>& tail);

  SuffixFractions suffix_fractions() const;

  bool operator==(const AggregateState& other) const = default;
};

}  // namespace coxbalance
