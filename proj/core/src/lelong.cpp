#include "pcma/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcma/bounds.hpp"
#include "pcma/errors.hpp"

namespace pcma {

namespace {

double sphere_max(const ScalarField& u, const Point& center, double r, int angular) {
  const int n = u.grid->n();
  double best = -std::numeric_limits<double>::infinity();
  if (n == 1) {
    for (int i = 0; i < angular; ++i) {
      const double th = 2.0 * M_PI * i / angular;
      Point p = make_point1(center.c[0] + r * std::cos(th), center.c[1] + r * std::sin(th));
      best = std::max(best, interpolate(u, p));
    }
    return best;
  }
  // torus chart of S^3: z1 = r cos(a) e^{i g}, z2 = r sin(a) e^{i b}
  const int na = std::max(4, angular / 8);
  const int nc = std::max(8, angular / 4);
  for (int i = 0; i < na; ++i) {
    const double a = 0.5 * M_PI * (i + 0.5) / na;
    const double c1 = r * std::cos(a), c2 = r * std::sin(a);
    for (int j = 0; j < nc; ++j) {
      const double g = 2.0 * M_PI * j / nc;
      for (int l = 0; l < nc; ++l) {
        const double b = 2.0 * M_PI * l / nc;
        Point p = make_point2(center.c[0] + c1 * std::cos(g), center.c[1] + c1 * std::sin(g),
                              center.c[2] + c2 * std::cos(b), center.c[3] + c2 * std::sin(b));
        best = std::max(best, interpolate(u, p));
      }
    }
  }
  return best;
}

}  // namespace

LelongEstimate estimate_lelong(const ScalarField& u, const Point& center,
                               const LelongOptions& opts) {
  const Grid& g = *u.grid;
  require(center.dim == g.real_dim(), ErrorCode::InvalidArgument,
          "estimator center has the wrong dimension");
  require(defining_function(g.domain, center) < 0, ErrorCode::InvalidArgument,
          "estimator center must lie inside the domain");
  require(opts.n_radii >= 2, ErrorCode::InvalidArgument, "need at least two radii");
  require(opts.angular >= 8, ErrorCode::InvalidArgument, "need at least eight angles");

  const double r_min = opts.r_min > 0 ? opts.r_min : 3.0 * g.h;
  const double r_max = opts.r_max > 0
                           ? opts.r_max
                           : std::min({12.0 * g.h, 0.2 * g.domain.radius,
                                       0.5 * boundary_distance(g.domain, center)});
  if (r_min < 2.0 * g.h)
    fail(ErrorCode::RadiiOutOfRange, "r_min = " + std::to_string(r_min) +
                                         " is below the 2h interpolation floor");
  if (r_max <= r_min * 1.5)
    fail(ErrorCode::RadiiOutOfRange, "radius ladder [" + std::to_string(r_min) + ", " +
                                         std::to_string(r_max) + "] is too short");
  if (r_max >= boundary_distance(g.domain, center))
    fail(ErrorCode::RadiiOutOfRange, "sampling spheres would cross the boundary");

  LelongEstimate est;
  const double ratio = std::pow(r_max / r_min, 1.0 / (opts.n_radii - 1));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < opts.n_radii; ++i) {
    const double r = r_min * std::pow(ratio, i);
    const double m = sphere_max(u, center, r, opts.angular);
    est.radii.push_back(r);
    est.sphere_max.push_back(m);
    const double x = std::log(r);
    sx += x;
    sy += m;
    sxx += x * x;
    sxy += x * m;
  }
  const int k = opts.n_radii;
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  est.nu_raw = slope;
  // interpolation noise can pull the slope slightly negative on smooth data;
  // a pole mass is nonnegative, so report the truncated value alongside the raw
  est.nu_hat = std::max(slope, 0.0);
  return est;
}

TrackResult track_singularity(const FlowState& flow, const Point& atom, double initial_mass,
                              double A, const LelongOptions& opts, double mass_tol) {
  require(!flow.fields.empty(), ErrorCode::InvalidArgument, "flow has no snapshots");
  require(initial_mass > 0, ErrorCode::InvalidArgument, "initial mass must be positive");
  const int n = flow.grid->n();

  TrackResult tr;
  tr.window_lo = epsilon_A(A, initial_mass, n);
  tr.window_hi = epsilon_A(A, n * initial_mass, n);
  tr.m_cap = flow.fields.front().m_cap;

  const std::size_t count = flow.fields.size();
  std::vector<bool> cond(count);
  for (std::size_t i = 0; i < count; ++i) {
    const ScalarField& f = flow.fields[i];
    TrackRow row;
    row.t = flow.times[i];
    row.u_at_atom = interpolate(f, atom);
    const LelongEstimate est = estimate_lelong(f, atom, opts);
    row.nu_hat = est.nu_hat;
    row.nu_raw = est.nu_raw;
    row.bound_lo = tr.window_lo;
    row.bound_hi = tr.window_hi;
    cond[i] = row.nu_hat < mass_tol && row.u_at_atom > -0.5 * f.m_cap;
    tr.rows.push_back(row);
  }

  for (std::size_t i = 0; i + 1 < count; ++i) {
    if (cond[i] && cond[i + 1]) {
      tr.resolved = true;
      tr.t_lo = i == 0 ? 0.0 : flow.times[i - 1];
      tr.t_hi = flow.times[i];
      tr.estimate = 0.5 * (tr.t_lo + tr.t_hi);
      for (std::size_t j = i; j < count; ++j) tr.rows[j].resolved = 1;
      break;
    }
  }
  return tr;
}

}  // namespace pcma
