#include "coxbalance/state.hpp"

#include <numeric>
#include <string>

namespace coxbalance {

AggregateState AggregateState::empty(int64_t n, int b) {
  AggregateState s;
  s.n = n;
  s.b = b;
  s.counts.assign(static_cast<size_t>(2 * b + 1), 0);
  s.counts[0] = n;
  return s;
}

AggregateState AggregateState::from_counts(int64_t n, int b,
                                           std::vector<int64_t> counts) {
  if (n < 1) throw ConfigError("state: n must be >= 1");
  if (b < 1) throw ConfigError("state: b must be >= 1");
  if (counts.size() != static_cast<size_t>(2 * b + 1))
    throw ConfigError("state: counts must have 2b+1 entries, got " +
                      std::to_string(counts.size()));
  int64_t total = 0;
  for (int64_t c : counts) {
    if (c < 0) throw ConfigError("state: counts must be nonnegative");
    total += c;
  }
  if (total != n)
    throw ConfigError("state: counts sum to " + std::to_string(total) +
                      ", expected n = " + std::to_string(n));
  AggregateState s;
  s.n = n;
  s.b = b;
  s.counts = std::move(counts);
  return s;
}

int64_t AggregateState::total_jobs() const {
  int64_t jobs = 0;
  for (int j = 1; j <= b; ++j) jobs += static_cast<int64_t>(j) * level_count(j);
  return jobs;
}

double AggregateState::q(int j, int m) const {
  if (j == 0) return m == 1 ? static_cast<double>(idle()) / static_cast<double>(n) : 0.0;
  return static_cast<double>(count(j, m)) / static_cast<double>(n);
}

int AggregateState::min_occupied_level() const {
  if (idle() > 0) return 0;
  for (int j = 1; j < b; ++j)
    if (level_count(j) > 0) return j;
  return b;
}

std::vector<int64_t> AggregateState::suffix_counts() const {
  std::vector<int64_t> tail(static_cast<size_t>(2 * b), 0);
  int64_t acc1 = 0, acc2 = 0;
  for (int i = b; i >= 1; --i) {
    acc1 += count(i, 1);
    acc2 += count(i, 2);
    tail[static_cast<size_t>(i - 1) * 2] = acc1;
    tail[static_cast<size_t>(i - 1) * 2 + 1] = acc2;
  }
  return tail;
}

AggregateState AggregateState::from_suffix_counts(int64_t n, int b,
                                                  const std::vector<int64_t>& tail) {
  if (tail.size() != static_cast<size_t>(2 * b))
    throw ConfigError("state: suffix counts must have 2b entries");
  std::vector<int64_t> counts(static_cast<size_t>(2 * b + 1), 0);
  auto at = [&](int i, int m) -> int64_t {
    if (i > b) return 0;
    return tail[static_cast<size_t>(i - 1) * 2 + static_cast<size_t>(m - 1)];
  };
  int64_t busy = at(1, 1) + at(1, 2);
  counts[0] = n - busy;
  for (int j = 1; j <= b; ++j) {
    counts[static_cast<size_t>(1 + (j - 1) * 2)] = at(j, 1) - at(j + 1, 1);
    counts[static_cast<size_t>(2 + (j - 1) * 2)] = at(j, 2) - at(j + 1, 2);
  }
  return from_counts(n, b, std::move(counts));  // re-validates monotonicity
}

SuffixFractions AggregateState::suffix_fractions() const {
  SuffixFractions s;
  s.b = b;
  s.v.resize(static_cast<size_t>(2 * b));
  auto tail = suffix_counts();
  for (size_t i = 0; i < tail.size(); ++i)
    s.v[i] = static_cast<double>(tail[i]) / static_cast<double>(n);
  return s;
}

}  // namespace coxbalance
