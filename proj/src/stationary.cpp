#include "coxbalance/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coxbalance/events.hpp"

namespace coxbalance {

double GeneratorMatrix::row_apply(int64_t i, const std::vector<double>& f) const {
  double acc = diag[static_cast<size_t>(i)] * f[static_cast<size_t>(i)];
  for (int64_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
    acc += rate[static_cast<size_t>(k)] * f[static_cast<size_t>(col[static_cast<size_t>(k)])];
  return acc;
}

std::vector<double> GeneratorMatrix::left_residual(const std::vector<double>& pi) const {
  std::vector<double> res(static_cast<size_t>(size), 0.0);
  for (int64_t i = 0; i < size; ++i) {
    double pi_i = pi[static_cast<size_t>(i)];
    res[static_cast<size_t>(i)] += pi_i * diag[static_cast<size_t>(i)];
    for (int64_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
      res[static_cast<size_t>(col[static_cast<size_t>(k)])] += pi_i * rate[static_cast<size_t>(k)];
  }
  return res;
}

GeneratorMatrix build_generator(const StateSpace& space, const PolicyKind& policy,
                                const SystemConfig& cfg) {
  GeneratorMatrix gen;
  gen.size = space.size();
  gen.row_ptr.reserve(static_cast<size_t>(gen.size) + 1);
  gen.row_ptr.push_back(0);
  gen.diag.assign(static_cast<size_t>(gen.size), 0.0);
  for (int64_t i = 0; i < gen.size; ++i) {
    const AggregateState& st = space.state(i);
    auto routing = routing_distribution(policy, st);
    double exit = 0.0;
    for (const auto& ev : enabled_transitions(st, routing, cfg)) {
      if (ev.type == EventType::Arrival && ev.level == st.b) continue;
      int64_t j = space.lookup(next_state(st, ev));
      if (j < 0)
        throw std::logic_error("generator: transition leaves the state space "
                               "(was the reachable class used?)");
      gen.col.push_back(j);
      gen.rate.push_back(ev.rate);
      exit += ev.rate;
    }
    gen.row_ptr.push_back(static_cast<int64_t>(gen.col.size()));
    gen.diag[static_cast<size_t>(i)] = -exit;
    gen.max_exit_rate = std::max(gen.max_exit_rate, exit);
  }
  return gen;
}

namespace {

// Dense solve of pi^T G = 0 with sum(pi) = 1: form A = G^T, overwrite the
// last row with ones (normalization), and LU-solve A x = e_last with
// partial pivoting.
StationaryDistribution solve_dense(const GeneratorMatrix& gen) {
  const int64_t n = gen.size;
  std::vector<double> a(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  auto at = [&](int64_t r, int64_t c) -> double& {
    return a[static_cast<size_t>(r) * static_cast<size_t>(n) + static_cast<size_t>(c)];
  };
  for (int64_t i = 0; i < n; ++i) {
    at(i, i) = gen.diag[static_cast<size_t>(i)];
    for (int64_t k = gen.row_ptr[static_cast<size_t>(i)];
         k < gen.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      at(gen.col[static_cast<size_t>(k)], i) += gen.rate[static_cast<size_t>(k)];
  }
  for (int64_t c = 0; c < n; ++c) at(n - 1, c) = 1.0;
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  x[static_cast<size_t>(n - 1)] = 1.0;

  // In-place LU with partial pivoting, applying row swaps to x as we go.
  for (int64_t k = 0; k < n; ++k) {
    int64_t piv = k;
    double best = std::abs(at(k, k));
    for (int64_t r = k + 1; r < n; ++r) {
      double v = std::abs(at(r, k));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0)
      throw std::runtime_error("stationary: singular system (chain not irreducible?)");
    if (piv != k) {
      for (int64_t c = k; c < n; ++c) std::swap(at(piv, c), at(k, c));
      std::swap(x[static_cast<size_t>(piv)], x[static_cast<size_t>(k)]);
    }
    double inv = 1.0 / at(k, k);
    for (int64_t r = k + 1; r < n; ++r) {
      double factor = at(r, k) * inv;
      if (factor == 0.0) continue;
      at(r, k) = 0.0;
      for (int64_t c = k + 1; c < n; ++c) at(r, c) -= factor * at(k, c);
      x[static_cast<size_t>(r)] -= factor * x[static_cast<size_t>(k)];
    }
  }
  for (int64_t r = n - 1; r >= 0; --r) {
    double acc = x[static_cast<size_t>(r)];
    for (int64_t c = r + 1; c < n; ++c) acc -= at(r, c) * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = acc / at(r, r);
  }

  StationaryDistribution out;
  out.method = "lu";
  out.pi = std::move(x);
  double total = 0.0;
  for (double& v : out.pi) {
    if (v < 0.0 && v > -1e-12) v = 0.0;  // scrub tiny negative round-off
    total += v;
  }
  for (double& v : out.pi) v /= total;
  return out;
}

StationaryDistribution solve_power(const GeneratorMatrix& gen, const SolveOptions& opts) {
  const int64_t n = gen.size;
  const double uni = gen.max_exit_rate * 1.01 + 1e-12;
  StationaryDistribution out;
  out.method = "power";
  std::vector<double> pi(static_cast<size_t>(n), 1.0 / static_cast<double>(n));
  std::vector<double> nxt(static_cast<size_t>(n), 0.0);
  // pi <- pi P with P = I + G/uni, checked against the residual every block.
  const int64_t check_every = 64;
  for (int64_t it = 1; it <= opts.max_power_iterations; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int64_t i = 0; i < n; ++i) {
      double pi_i = pi[static_cast<size_t>(i)];
      if (pi_i == 0.0) continue;
      nxt[static_cast<size_t>(i)] += pi_i * (1.0 + gen.diag[static_cast<size_t>(i)] / uni);
      for (int64_t k = gen.row_ptr[static_cast<size_t>(i)];
           k < gen.row_ptr[static_cast<size_t>(i) + 1]; ++k)
        nxt[static_cast<size_t>(gen.col[static_cast<size_t>(k)])] +=
            pi_i * gen.rate[static_cast<size_t>(k)] / uni;
    }
    double total = 0.0;
    for (double v : nxt) total += v;
    for (double& v : nxt) v /= total;
    pi.swap(nxt);
    out.iterations = it;
    if (it % check_every == 0 || it == opts.max_power_iterations) {
      double res = 0.0;
      for (double v : gen.left_residual(pi)) res = std::max(res, std::abs(v));
      if (res <= opts.residual_tol) break;
    }
  }
  out.pi = std::move(pi);
  return out;
}

}  // namespace

StationaryDistribution stationary_distribution(const GeneratorMatrix& gen,
                                               const SolveOptions& opts) {
  if (gen.size < 1) throw std::invalid_argument("stationary: empty generator");
  StationaryDistribution out = gen.size <= opts.dense_limit ? solve_dense(gen)
                                                            : solve_power(gen, opts);
  double res = 0.0;
  for (double v : gen.left_residual(out.pi)) res = std::max(res, std::abs(v));
  out.residual_inf = res;
  out.converged = res <= opts.residual_tol;
  return out;
}

ExactSolution solve_exact(const SystemConfig& cfg, int64_t cap, const SolveOptions& opts) {
  cfg.validate();
  StateSpace full = enumerate_states(cfg.n, cfg.b, cap);
  auto reachable = reachable_from_empty(full, cfg.policy, cfg);
  bool reducible = static_cast<int64_t>(reachable.size()) != full.size();
  StateSpace sub = full.restrict(reachable);
  GeneratorMatrix gen = build_generator(sub, cfg.policy, cfg);
  StationaryDistribution dist = stationary_distribution(gen, opts);
  return ExactSolution{std::move(sub), std::move(gen), std::move(dist),
                       full.size(), reducible};
}

}  // namespace coxbalance
