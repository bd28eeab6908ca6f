#pragma once

#include "coxbalance/constants.hpp"
#include "coxbalance/state.hpp"

namespace coxbalance {

// State-space-collapse membership flags.
//
// ssc1: busy fraction at least eta - (c1 + mu1) x (equivalently
//       lambda + ((1+mu1+mu2)/w_l - mu1) x, since k - c1 = (1+mu1+mu2)/w_l)
//       together with the per-phase floors s11 >= L11, s12 >= L12.
// ssc2: total occupancy sum_i s_i at most eta.
// tilde1/tilde2 are the intermediate sets used to prove collapse:
//       tilde1 = both phase floors, tilde2 = min{eta - s_1, sum_{i>=2} s_i}
//       <= (c1 + mu1) x, and tilde1 & tilde2 imply ssc1 | ssc2.
struct SscFlags {
  bool in_ssc1 = false;
  bool in_ssc2 = false;
  bool in_tilde1 = false;
  bool in_tilde2 = false;
  bool in_ssc() const { return in_ssc1 || in_ssc2; }
};

SscFlags ssc_flags(const AggregateState& state, const DerivedConstants& c);

// Same flags evaluated on a precomputed suffix-fraction array in the
// SuffixFractions::v layout (hot paths; avoids the state -> fractions copy).
SscFlags ssc_flags_from_suffix(const double* v, int b, const DerivedConstants& c);

// Minimum of the total per-server departure rate d1 = (1-p)mu1 s11 + mu2 s12
// over the ssc1 region, evaluated at the region's two corner points and on a
// grid. The linear program's minimum sits at a corner, and both corners obey
// d1 >= lambda + x.
struct Ssc1MinDepartureReport {
  double corner1_s11 = 0.0, corner1_s12 = 0.0, corner1_d1 = 0.0;
  double corner2_s11 = 0.0, corner2_s12 = 0.0, corner2_d1 = 0.0;
  double corner_min = 0.0;
  double grid_min = 0.0;
  int64_t grid_points = 0;
  double lower_bound = 0.0;       // lambda + x
  bool corner_bound_holds = false;  // corner_min >= lower_bound
  double corner1_chain_bound = 0.0;  // lambda + (1 + mu2) x
  double corner2_chain_bound = 0.0;  // lambda + (1 + mu1 + mu2 - mu1 mu2) x
};

Ssc1MinDepartureReport ssc1_min_departure(const DerivedConstants& c,
                                          int grid_side = 100);

}  // namespace coxbalance
