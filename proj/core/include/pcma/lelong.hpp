#ifndef PCMA_LELONG_HPP
#define PCMA_LELONG_HPP

#include <vector>

#include "pcma/flow.hpp"

namespace pcma {

// Lelong-number estimator: the pole mass of u at a point equals the slope of
// the sphere maxima  M(r) = max_{|w|=r} u(center + w)  against log r as
// r -> 0.  We fit the slope by least squares over a geometric ladder of radii
// small enough to see the pole but staying clear of the grid scale (r >= 2h)
// and of the boundary.  The default window scales with h on both ends, so the
// estimate converges to the r -> 0 limit under grid refinement; a fixed outer
// radius would instead saturate at the O(r_max^2) slope of the smooth part.
struct LelongOptions {
  double r_min = 0.0;   // 0 = 3h
  double r_max = 0.0;   // 0 = min(12h, 0.2 * radius, boundary_distance(center)/2)
  int n_radii = 8;
  int angular = 64;     // circle samples (n=1); torus resolution scale (n=2)
};

struct LelongEstimate {
  double nu_hat = 0.0;  // raw slope truncated at 0 (a pole mass is nonnegative)
  double nu_raw = 0.0;  // untruncated least-squares slope
  std::vector<double> radii;
  std::vector<double> sphere_max;
};

LelongEstimate estimate_lelong(const ScalarField& u, const Point& center,
                               const LelongOptions& opts = {});

// Snapshot-by-snapshot record of one atom along a flow, with the predicted
// lifetime window for its initial mass.
struct TrackRow {
  double t = 0;
  double u_at_atom = 0;
  double nu_hat = 0;
  double nu_raw = 0;       // estimator slope before truncation at 0
  int resolved = 0;        // 1 once the resolution time has been passed
  double bound_lo = 0;     // epsilon_A(nu0)
  double bound_hi = 0;     // epsilon_A(n nu0)
};

struct TrackResult {
  std::vector<TrackRow> rows;
  bool resolved = false;
  double t_lo = 0;         // bracket around the resolution time
  double t_hi = 0;
  double estimate = 0;     // bracket midpoint
  double window_lo = 0;
  double window_hi = 0;
  double m_cap = 0;        // value floor of the tracked snapshots
};

// The singularity counts as resolved at the first pair of consecutive
// snapshots with nu_hat < mass_tol and u(atom) > -m_cap/2; the resolution
// time is then bracketed by the preceding snapshot interval.
TrackResult track_singularity(const FlowState& flow, const Point& atom, double initial_mass,
                              double A, const LelongOptions& opts = {},
                              double mass_tol = 0.05);

}  // namespace pcma

#endif
