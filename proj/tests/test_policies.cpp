#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"

#include "coxbalance/policies.hpp"
#include "coxbalance/state_space.hpp"

using namespace coxbalance;

namespace {

AggregateState ten_server_state() {
  return AggregateState::from_counts(10, 5, {0, 2, 1, 2, 1, 1, 1, 0, 0, 0, 2});
}

// Explicit server list (level, phase) for brute-force sampling; idle servers
// are (0, 1). Order is irrelevant: servers are exchangeable.
std::vector<std::pair<int, int>> server_list(const AggregateState& st) {
  std::vector<std::pair<int, int>> servers;
  for (int64_t i = 0; i < st.idle(); ++i) servers.emplace_back(0, 1);
  for (int j = 1; j <= st.b; ++j)
    for (int m = 1; m <= 2; ++m)
      for (int64_t i = 0; i < st.count(j, m); ++i) servers.emplace_back(j, m);
  return servers;
}

size_t class_index(int level, int phase) {
  return level == 0 ? 0
                    : static_cast<size_t>(1 + (level - 1) * 2 + (phase - 1));
}

// Reference Pod routing without replacement: average over all d-subsets of
// the event "the sampled minimum level is j and a uniformly chosen minimal
// sampled server is in phase m".
std::vector<double> pod_brute_force(const AggregateState& st, int d) {
  auto servers = server_list(st);
  const int n = static_cast<int>(servers.size());
  std::vector<double> r(st.counts.size(), 0.0);
  std::vector<int> pick(static_cast<size_t>(d));
  int64_t subsets = 0;

  auto account = [&](const std::vector<int>& chosen) {
    int min_level = st.b + 1;
    for (int idx : chosen) min_level = std::min(min_level, servers[static_cast<size_t>(idx)].first);
    double mins = 0.0, mins_p1 = 0.0;
    for (int idx : chosen) {
      if (servers[static_cast<size_t>(idx)].first != min_level) continue;
      mins += 1.0;
      if (servers[static_cast<size_t>(idx)].second == 1) mins_p1 += 1.0;
    }
    if (min_level == 0) {
      r[0] += 1.0;
    } else {
      r[class_index(min_level, 1)] += mins_p1 / mins;
      r[class_index(min_level, 2)] += (mins - mins_p1) / mins;
    }
    ++subsets;
  };

  // Iterative combination enumeration.
  for (int i = 0; i < d; ++i) pick[static_cast<size_t>(i)] = i;
  while (true) {
    account(pick);
    int i = d - 1;
    while (i >= 0 && pick[static_cast<size_t>(i)] == n - d + i) --i;
    if (i < 0) break;
    ++pick[static_cast<size_t>(i)];
    for (int j = i + 1; j < d; ++j)
      pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
  }
  for (auto& v : r) v /= static_cast<double>(subsets);
  return r;
}

// Reference Pod with replacement: average over all n^d ordered samples; ties
// broken uniformly over the minimal sample slots.
std::vector<double> pod_brute_force_with_replacement(const AggregateState& st,
                                                     int d) {
  auto servers = server_list(st);
  const int n = static_cast<int>(servers.size());
  std::vector<double> r(st.counts.size(), 0.0);
  std::vector<int> tuple(static_cast<size_t>(d), 0);
  int64_t total = 0;
  while (true) {
    int min_level = st.b + 1;
    for (int idx : tuple) min_level = std::min(min_level, servers[static_cast<size_t>(idx)].first);
    double mins = 0.0, mins_p1 = 0.0;
    for (int idx : tuple) {
      if (servers[static_cast<size_t>(idx)].first != min_level) continue;
      mins += 1.0;
      if (servers[static_cast<size_t>(idx)].second == 1) mins_p1 += 1.0;
    }
    if (min_level == 0) {
      r[0] += 1.0;
    } else {
      r[class_index(min_level, 1)] += mins_p1 / mins;
      r[class_index(min_level, 2)] += (mins - mins_p1) / mins;
    }
    ++total;
    int i = d - 1;
    while (i >= 0 && tuple[static_cast<size_t>(i)] == n - 1) {
      tuple[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++tuple[static_cast<size_t>(i)];
  }
  for (auto& v : r) v /= static_cast<double>(total);
  return r;
}

}  // namespace

TEST_CASE("JSQ routes to idle and otherwise splits the minimum level") {
  PolicyKind jsq{PolicyType::Jsq};
  AggregateState with_idle = AggregateState::from_counts(4, 2, {1, 2, 1, 0, 0});
  auto r = routing_distribution(jsq, with_idle);
  CHECK(r.idle() == 1.0);
  CHECK(r.a1() == 0.0);

  // All busy, minimum level 1 holding 2 phase-1 and 1 phase-2 servers.
  auto r10 = routing_distribution(jsq, ten_server_state());
  CHECK(r10.idle() == 0.0);
  CHECK(r10.at(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r10.at(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r10.at(2, 1) == 0.0);
  CHECK(r10.a1() == 1.0);
}

TEST_CASE("JIQ prefers idle, else routes uniformly over all servers") {
  PolicyKind jiq{PolicyType::Jiq};
  AggregateState with_idle = AggregateState::from_counts(4, 2, {1, 0, 0, 3, 0});
  CHECK(routing_distribution(jiq, with_idle).idle() == 1.0);
  CHECK(a1(jiq, with_idle) == 0.0);

  AggregateState st = ten_server_state();
  auto r = routing_distribution(jiq, st);
  for (int j = 1; j <= st.b; ++j)
    for (int m = 1; m <= 2; ++m)
      CHECK(r.at(j, m) == doctest::Approx(st.q(j, m)).epsilon(1e-15));
  CHECK(r.a1() == doctest::Approx(1.0).epsilon(1e-15));
  // Uniform fallback puts mass on full servers: that mass is blocking.
  CHECK(r.blocked() == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("I1F prefers idle, then single-job servers, then uniform") {
  PolicyKind i1f{PolicyType::I1f};
  AggregateState st = ten_server_state();  // no idle, three servers at level 1
  auto r = routing_distribution(i1f, st);
  CHECK(r.at(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.at(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // No idle, no level-1: uniform over everything.
  AggregateState deep = AggregateState::from_counts(4, 2, {0, 0, 0, 3, 1});
  auto rd = routing_distribution(i1f, deep);
  CHECK(rd.at(2, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(rd.at(2, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rd.blocked() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Pod of 2 on half-idle four servers waits with probability 1/6") {
  PolicyKind pod{PolicyType::Pod, 2};
  AggregateState st = AggregateState::from_counts(4, 2, {2, 2, 0, 0, 0});
  CHECK(a1(pod, st) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("Pod of 1 is the uniform random policy") {
  PolicyKind pod1{PolicyType::Pod, 1};
  AggregateState st = ten_server_state();
  auto r = routing_distribution(pod1, st);
  for (int j = 1; j <= st.b; ++j)
    for (int m = 1; m <= 2; ++m)
      CHECK(r.at(j, m) == doctest::Approx(st.q(j, m)).epsilon(1e-14));
}

TEST_CASE("Pod rejects more samples than servers") {
  PolicyKind pod{PolicyType::Pod, 5};
  AggregateState st = AggregateState::empty(4, 1);
  CHECK_THROWS_AS(routing_distribution(pod, st), ConfigError);
}

TEST_CASE("Pod closed form matches subset enumeration on every n=6 state") {
  StateSpace space = enumerate_states(6, 2);
  for (int d : {2, 3, 5}) {
    PolicyKind pod{PolicyType::Pod, d};
    for (int64_t i = 0; i < space.size(); ++i) {
      const AggregateState& st = space.state(i);
      auto closed = routing_distribution(pod, st);
      auto brute = pod_brute_force(st, d);
      for (size_t k = 0; k < brute.size(); ++k)
        CHECK(closed.r[k] == doctest::Approx(brute[k]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("Pod with replacement matches ordered-sample enumeration") {
  StateSpace space = enumerate_states(5, 2);
  PolicyKind pod{PolicyType::Pod, 3, PodSampling::WithReplacement};
  for (int64_t i = 0; i < space.size(); ++i) {
    const AggregateState& st = space.state(i);
    auto closed = routing_distribution(pod, st);
    auto brute = pod_brute_force_with_replacement(st, 3);
    for (size_t k = 0; k < brute.size(); ++k)
      CHECK(closed.r[k] == doctest::Approx(brute[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("Pod sampling everything reproduces JSQ on every n=4 state") {
  StateSpace space = enumerate_states(4, 2);
  PolicyKind podn{PolicyType::Pod, 4};
  PolicyKind jsq{PolicyType::Jsq};
  for (int64_t i = 0; i < space.size(); ++i) {
    const AggregateState& st = space.state(i);
    auto rp = routing_distribution(podn, st);
    auto rj = routing_distribution(jsq, st);
    for (size_t k = 0; k < rp.r.size(); ++k)
      CHECK(rp.r[k] == doctest::Approx(rj.r[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("routing distributions are proper and supported on occupied classes") {
  StateSpace space = enumerate_states(4, 2);
  const PolicyKind policies[] = {
      PolicyKind{PolicyType::Jsq}, PolicyKind{PolicyType::Jiq},
      PolicyKind{PolicyType::I1f}, PolicyKind{PolicyType::Pod, 2},
      PolicyKind{PolicyType::Pod, 3, PodSampling::WithReplacement}};
  for (const auto& pol : policies) {
    for (int64_t i = 0; i < space.size(); ++i) {
      const AggregateState& st = space.state(i);
      auto r = routing_distribution(pol, st);
      CHECK(r.mass() == doctest::Approx(1.0).epsilon(1e-12));
      if (st.idle() == 0) CHECK(r.idle() == 0.0);
      for (int j = 1; j <= st.b; ++j)
        for (int m = 1; m <= 2; ++m)
          if (st.count(j, m) == 0) CHECK(r.at(j, m) == 0.0);
      // Tail mass is nonincreasing in the level.
      for (int m = 1; m <= 2; ++m)
        for (int j = 1; j < st.b; ++j)
          CHECK(r.tail(j, m) >= r.tail(j + 1, m) - 1e-15);
    }
  }
}

TEST_CASE("policy family membership: idle-first policies always qualify") {
  SystemConfig cfg;
  cfg.n = 4;
  cfg.b = 2;
  cfg.lambda = 0.7;
  cfg.coxian = {2.0, 1.0, 0.5};
  StateSpace space = enumerate_states(4, 2);

  for (PolicyType t : {PolicyType::Jsq, PolicyType::Jiq, PolicyType::I1f}) {
    auto rep = pi_membership_check(PolicyKind{t}, cfg, space.states());
    CHECK(rep.holds);
    CHECK(rep.states_checked > 0);
    // A_1 = 0 on every non-saturated state, so the worst excess is -1/sqrt(n).
    CHECK(rep.worst_excess == doctest::Approx(-0.5).epsilon(1e-15));
  }

  SystemConfig cfg3 = cfg;
  cfg3.b = 3;
  StateSpace space3 = enumerate_states(4, 3);
  CHECK(pi_membership_check(PolicyKind{PolicyType::I1f}, cfg3, space3.states()).holds);
}

TEST_CASE("policy family membership: pod(2) sits exactly on the boundary at n=4") {
  SystemConfig cfg;
  cfg.n = 4;
  cfg.b = 2;
  cfg.lambda = 0.7;
  cfg.coxian = {2.0, 1.0, 0.5};
  StateSpace space = enumerate_states(4, 2);
  auto rep = pi_membership_check(PolicyKind{PolicyType::Pod, 2}, cfg, space.states());
  // Worst case: 3 busy of 4, a1 = C(3,2)/C(4,2) = 1/2 = 1/sqrt(4).
  CHECK(rep.holds);
  CHECK(rep.worst_excess <= 1e-12);
  CHECK(rep.worst_excess >= -1e-12);
}

TEST_CASE("policy family membership: uniform routing fails with witnesses") {
  SystemConfig cfg;
  cfg.n = 100;
  cfg.b = 1;
  cfg.lambda = 0.7;
  cfg.coxian = {2.0, 1.0, 0.5};
  // s_1 sweeps 0..1 as k busy servers grow; a1 = s_1 for d = 1.
  std::vector<AggregateState> states;
  for (int64_t k = 0; k <= 100; ++k)
    states.push_back(AggregateState::from_counts(100, 1, {100 - k, k, 0}));
  auto rep = pi_membership_check(PolicyKind{PolicyType::Pod, 1}, cfg, states);
  CHECK_FALSE(rep.holds);
  CHECK(rep.vacuous_threshold);  // 0.7 + 4 log(100)/10 exceeds 1
  CHECK(rep.witnesses.size() > 0);
  // Saturated state is excluded: 100 states checked, not 101.
  CHECK(rep.states_checked == 100);
  CHECK(rep.worst_excess == doctest::Approx(0.99 - 0.1).epsilon(1e-12));
}
