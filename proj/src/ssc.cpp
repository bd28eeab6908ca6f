#include "coxbalance/ssc.hpp"

#include <algorithm>
#include <cmath>

namespace coxbalance {

SscFlags ssc_flags(const AggregateState& state, const DerivedConstants& c) {
  auto s = state.suffix_fractions();
  return ssc_flags_from_suffix(s.v.data(), state.b, c);
}

SscFlags ssc_flags_from_suffix(const double* v, int b, const DerivedConstants& c) {
  double s11 = v[0], s12 = v[1];
  double s1 = s11 + s12;
  double tail2 = 0.0;
  for (int i = 2; i <= b; ++i) tail2 += v[(i - 1) * 2] + v[(i - 1) * 2 + 1];
  double total = s1 + tail2;

  double collapse_width = (c.c1 + c.mu1) * c.x;
  // Written as eta - (c1 + mu1) x so the tilde2 case split maps onto it with
  // the same roundings; equals lambda + ((1+mu1+mu2)/w_l - mu1) x exactly.
  double s1_floor = c.eta - collapse_width;

  SscFlags f;
  f.in_tilde1 = s11 >= c.l11 && s12 >= c.l12;
  f.in_tilde2 = std::min(c.eta - s1, tail2) <= collapse_width;
  f.in_ssc1 = s1 >= s1_floor && f.in_tilde1;
  f.in_ssc2 = total <= c.eta;
  return f;
}

Ssc1MinDepartureReport ssc1_min_departure(const DerivedConstants& c, int grid_side) {
  Ssc1MinDepartureReport rep;
  const double x = c.x;
  const double a = c.l11;                    // s11 floor
  const double cc = c.l12;                   // s12 floor
  const double t1 = c.lambda + (c.k_minus_c1 - c.mu1) * x;  // s11+s12 floor
  auto d1 = [&](double s11, double s12) {
    return (1.0 - c.p) * c.mu1 * s11 + c.mu2 * s12;
  };

  // The feasible region {s11 >= a, s12 >= cc, s11 + s12 >= t1} always has
  // t1 > a + cc (their gap is ((1+mu1+mu2)/w_l + 1) x > 0), so the binding
  // corners are (a, t1 - a) and (t1 - cc, cc).
  rep.corner1_s11 = a;
  rep.corner1_s12 = t1 - a;
  rep.corner1_d1 = d1(rep.corner1_s11, rep.corner1_s12);
  rep.corner2_s11 = t1 - cc;
  rep.corner2_s12 = cc;
  rep.corner2_d1 = d1(rep.corner2_s11, rep.corner2_s12);
  rep.corner_min = std::min(rep.corner1_d1, rep.corner2_d1);

  rep.lower_bound = c.lambda + x;
  rep.corner1_chain_bound = c.lambda + (1.0 + c.mu2) * x;
  rep.corner2_chain_bound = c.lambda + (1.0 + c.mu1 + c.mu2 - c.mu1 * c.mu2) * x;
  rep.corner_bound_holds = rep.corner_min >= rep.lower_bound - 1e-12;

  // Grid scan over a box covering both corners, keeping only feasible
  // points; the corners themselves are included exactly. Nodes under the
  // s11 + s12 >= t1 diagonal drop out, so widen the lattice until the
  // feasible count reaches grid_side^2 (the excluded triangle is at most
  // half the box, so this terminates after at most one doubling).
  const double span = (t1 - a - cc) + 1.0;
  const double lo1 = a, lo2 = cc;
  const int64_t target = static_cast<int64_t>(grid_side) * grid_side;
  double best = std::min(rep.corner1_d1, rep.corner2_d1);
  int64_t points = 0;
  for (int side = grid_side; points < target; side += (side + 1) / 2) {
    best = std::min(rep.corner1_d1, rep.corner2_d1);
    points = 2;
    for (int i = 0; i < side; ++i) {
      double s11 = lo1 + span * static_cast<double>(i) / static_cast<double>(side - 1);
      for (int j = 0; j < side; ++j) {
        double s12 = lo2 + span * static_cast<double>(j) / static_cast<double>(side - 1);
        if (s11 + s12 < t1) continue;
        best = std::min(best, d1(s11, s12));
        ++points;
      }
    }
  }
  rep.grid_min = best;
  rep.grid_points = points;
  return rep;
}

}  // namespace coxbalance
