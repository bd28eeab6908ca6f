#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coxbalance/state_space.hpp"
#include "coxbalance/types.hpp"

namespace coxbalance {

// Sparse CTMC generator over a state space (row = from-state). Off-diagonal
// entries are the true transition rates (arrival rates scale with n);
// blocked-arrival self-loops are excluded. diag[i] = -sum of row i.
struct GeneratorMatrix {
  int64_t size = 0;
  std::vector<int64_t> row_ptr;
  std::vector<int64_t> col;
  std::vector<double> rate;
  std::vector<double> diag;
  double max_exit_rate = 0.0;

  // (G f)(i) for a tabulated function f over states.
  double row_apply(int64_t i, const std::vector<double>& f) const;
  // Residual vector pi^T G.
  std::vector<double> left_residual(const std::vector<double>& pi) const;
};

// Assembles the generator for the chain restricted to `space` (every
// transition must stay inside; use the reachable class).
GeneratorMatrix build_generator(const StateSpace& space, const PolicyKind& policy,
                                const SystemConfig& cfg);

struct SolveOptions {
  // Dense LU is cubic; above this size switch to power iteration on the
  // uniformized kernel.
  int64_t dense_limit = 3000;
  double residual_tol = 1e-10;  // on ||pi^T G||_inf
  int64_t max_power_iterations = 2'000'000;
};

struct StationaryDistribution {
  std::vector<double> pi;
  double residual_inf = 0.0;
  std::string method;      // "lu" or "power"
  int64_t iterations = 0;  // power iterations (0 for lu)
  bool converged = true;
};

// Solves pi^T G = 0, sum(pi) = 1 on an irreducible generator.
StationaryDistribution stationary_distribution(const GeneratorMatrix& gen,
                                               const SolveOptions& opts = {});

// E[f(S)] under a tabulated distribution.
template <typename F>
double expectation(const StateSpace& space, const std::vector<double>& pi, F&& f) {
  double acc = 0.0;
  for (int64_t i = 0; i < space.size(); ++i)
    acc += pi[static_cast<size_t>(i)] * f(space.state(i));
  return acc;
}

// Convenience bundle: enumerate, restrict to the reachable class, build the
// generator, and solve.
struct ExactSolution {
  StateSpace space;  // reachable class only
  GeneratorMatrix gen;
  StationaryDistribution dist;
  int64_t full_space_size = 0;
  bool reducible = false;  // true when unreachable states were dropped
};

ExactSolution solve_exact(const SystemConfig& cfg, int64_t cap = default_state_cap(),
                          const SolveOptions& opts = {});

}  // namespace coxbalance
