#include "pcma/initial_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

double smooth_or_zero(const ExprPtr& e, const Point& z, double t) {
  if (!e) return 0.0;
  EvalContext ctx;
  ctx.z = z;
  ctx.t = t;
  return e->eval(ctx);
}

// exp(-1/x) continued by 0 for x <= 0; all derivatives vanish at 0
double bump_h(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double atom_boundary_distance(const SingularPotential& p, const DomainSpec& d) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : p.atoms) m = std::min(m, d.radius - dist(a.location, d.center));
  return m;
}

SingularPotential snap_atoms(const SingularPotential& p, const Grid& grid,
                             std::vector<double>* snap_distances) {
  SingularPotential out = p;
  if (snap_distances) snap_distances->clear();
  for (auto& a : out.atoms) {
    auto [node, sd] = grid.nearest_node(a.location);
    require(sd <= grid.h * std::sqrt(grid.real_dim()) / 2.0 + 1e-12, ErrorCode::InvalidArgument,
            "atom is outside the grid box");
    a.location = grid.node_point(node);
    require(grid.node_class[static_cast<std::size_t>(node)] == NodeClass::Interior,
            ErrorCode::ConfigError, "atom does not snap to an interior node");
    const double bd = grid.domain.radius - dist(a.location, grid.domain.center);
    require(bd >= 4.0 * grid.h - 1e-12, ErrorCode::ConfigError,
            "atom must stay at least 4h away from the boundary (distance " +
                std::to_string(bd) + ", h " + std::to_string(grid.h) + ")");
    if (snap_distances) snap_distances->push_back(sd);
  }
  return out;
}

double eval_u0(const SingularPotential& p, const Point& z) {
  double v = smooth_or_zero(p.smooth, z, 0.0);
  for (const auto& a : p.atoms) {
    const double d = dist(z, a.location);
    if (d == 0.0) return -p.m_cap;
    v += a.mass * std::log(d);
  }
  return std::max(v, -p.m_cap);
}

ScalarField eval_u0_field(const SingularPotential& p, const GridPtr& grid) {
  ScalarField f = make_field(grid, 0.0, p.m_cap);
  for (int64_t node = 0; node < grid->total_nodes; ++node)
    f.values[node] = eval_u0(p, grid->node_point(node));
  recompute_floor_flags(f);
  return f;
}

double smoothed_log(double d, double delta) {
  require(delta > 0.0, ErrorCode::InvalidArgument, "smoothing radius must be positive");
  if (d >= delta) return std::log(d);
  const double v = (d * d) / (delta * delta);
  const double w = 1.0 - v;
  const double w3 = w * w * w;
  // I(v) = int_v^1 (1-u)^2 log u du
  double I;
  if (v <= 0.0) {
    I = -11.0 / 18.0;
  } else {
    const double lv = std::log(v);
    I = -11.0 / 18.0 + w3 * lv / 3.0 - lv / 3.0 + v - v * v / 2.0 + v * v * v / 9.0;
  }
  const double inner = (d > 0.0) ? std::log(d) * (1.0 - w3) : 0.0;
  return inner + std::log(delta) * w3 + 1.5 * I;
}

double mollifier_radius(const SingularPotential& p, const DomainSpec& d, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "level index k must be >= 1");
  const double bd = atom_boundary_distance(p, d);
  if (!std::isfinite(bd)) return 0.0;  // no atoms, nothing to smooth
  return std::pow(2.0, -k) * bd / 4.0;
}

double mollified_value(const SingularPotential& p, int k, double delta_k, const Point& z) {
  double v = smooth_or_zero(p.smooth, z, 0.0) + norm2(z) / k;
  for (const auto& a : p.atoms) v += a.mass * smoothed_log(dist(z, a.location), delta_k);
  return v;
}

ScalarField mollify_decreasing(const SingularPotential& p, int k, const GridPtr& grid,
                               double override_radius) {
  require(k >= 1, ErrorCode::InvalidArgument, "level index k must be >= 1");
  double delta_k =
      override_radius > 0.0 ? override_radius : mollifier_radius(p, grid->domain, k);
  if (!p.atoms.empty()) {
    const double bd = atom_boundary_distance(p, grid->domain);
    require(delta_k < bd / 2.0, ErrorCode::MollifierTooWide,
            "smoothing radius " + std::to_string(delta_k) +
                " reaches halfway to the boundary (atom distance " + std::to_string(bd) + ")");
    require(delta_k > 0.0, ErrorCode::InvalidArgument, "smoothing radius must be positive");
  }
  ScalarField f = make_field(grid, 0.0, p.m_cap);
  for (int64_t node = 0; node < grid->total_nodes; ++node)
    f.values[node] = mollified_value(p, k, delta_k, grid->node_point(node));
  require_finite(f, "mollified initial data");
  return f;
}

double zeta(double s) {
  const double a = bump_h(2.0 - s);
  const double b = bump_h(s - 1.0);
  if (a == 0.0) return 0.0;
  return a / (a + b);
}

ScalarField compat_g_k(const ScalarField& u0k, const ExprPtr& f, const GridPtr& grid,
                       double hessian_floor) {
  require_same_grid(u0k.grid, grid, "compat_g_k");
  const HermitianField H = complex_hessian(u0k);
  // Tolerate clamped eigenvalues here: the five-point discretization of a
  // harmonic atom tail undershoots zero by O(h^2/r^4) near the smoothing
  // radius, so deeper levels are not strictly psh on the grid even though the
  // continuum data is.  The floored log det is the honest discrete g_k there.
  const LogDetResult ld = logdet_hessian(H, hessian_floor, /*throw_on_notpsh=*/false);
  ScalarField g = make_field(grid, 0.0, u0k.m_cap);
  EvalContext ctx;
  ctx.t = 0.0;
  for (int64_t s = 0; s < grid->interior_count(); ++s) {
    const int64_t node = grid->interior_nodes[static_cast<std::size_t>(s)];
    double v = ld.values[s];
    if (f) {
      ctx.z = grid->node_point(node);
      v += f->eval(ctx);
    }
    g.values[node] = v;
  }
  return g;
}

// --- analytic continuation of the level data ------------------------------

namespace {

// Complex Hessian of a smooth expression at an off-grid point via nested
// centered differences with step `step` (exact for quadratics, O(step^2)
// otherwise; used only for boundary-lattice evaluations).
void fd_complex_hessian(const ExprPtr& e, const Point& z, double step, int n, double H11[],
                        double* h22, double* re12, double* im12) {
  auto val = [&](double dx, int axis_a, double dy, int axis_b) {
    Point q = z;
    q.c[axis_a] += dx;
    if (axis_b >= 0) q.c[axis_b] += dy;
    EvalContext ctx;
    ctx.z = q;
    ctx.t = 0.0;
    return e->eval(ctx);
  };
  const double inv2 = 1.0 / (step * step);
  const double inv4 = 0.25 * inv2;
  auto dxx = [&](int a) { return (val(step, a, 0, -1) + val(-step, a, 0, -1) - 2.0 * val(0, a, 0, -1)) * inv2; };
  auto dab = [&](int a, int b) {
    return (val(step, a, step, b) - val(step, a, -step, b) - val(-step, a, step, b) +
            val(-step, a, -step, b)) *
           inv4;
  };
  H11[0] = 0.25 * (dxx(0) + dxx(1));
  if (n == 2) {
    *h22 = 0.25 * (dxx(2) + dxx(3));
    *re12 = 0.25 * (dab(0, 2) + dab(1, 3));
    *im12 = 0.25 * (dab(0, 3) - dab(1, 2));
  }
}

}  // namespace

U0kAnalytic::U0kAnalytic(SingularPotential snapped, int n, int k, double delta_k, ExprPtr f,
                         double hessian_floor)
    : p_(std::move(snapped)), n_(n), k_(k), delta_k_(delta_k), f_(std::move(f)),
      floor_(hessian_floor) {
  require(k_ >= 1, ErrorCode::InvalidArgument, "level index k must be >= 1");
}

double U0kAnalytic::value(const Point& z) const { return mollified_value(p_, k_, delta_k_, z); }

double U0kAnalytic::compat_g(const Point& z) const {
  // Hessian = atoms (closed form, valid outside the smoothing caps) + smooth
  // part (finite differences) + identity/k from the |z|^2/k lift.
  double h11 = 0, h22 = 0, re12 = 0, im12 = 0;
  if (p_.smooth) {
    const double step = 1e-4;
    double a11;
    fd_complex_hessian(p_.smooth, z, step, n_, &a11, &h22, &re12, &im12);
    h11 = a11;
  }
  h11 += 1.0 / k_;
  if (n_ == 2) h22 += 1.0 / k_;

  for (const auto& a : p_.atoms) {
    const double d2 = dist2(z, a.location);
    require(d2 > delta_k_ * delta_k_, ErrorCode::InvalidArgument,
            "analytic compat forcing requested inside a smoothing cap");
    if (n_ == 1) continue;  // log|z-a| is harmonic away from the pole in C^1
    // H_{ab} = mass/2 * (delta_ab |w|^2 - conj(w_a) w_b) / |w|^4, w = z - a
    const double wx1 = z.c[0] - a.location.c[0], wy1 = z.c[1] - a.location.c[1];
    const double wx2 = z.c[2] - a.location.c[2], wy2 = z.c[3] - a.location.c[3];
    const double inv4 = a.mass / (2.0 * d2 * d2);
    const double z1z1 = wx1 * wx1 + wy1 * wy1;
    const double z2z2 = wx2 * wx2 + wy2 * wy2;
    // conj(w1) w2 = (wx1 - i wy1)(wx2 + i wy2)
    const double re_c = wx1 * wx2 + wy1 * wy2;
    const double im_c = wx1 * wy2 - wy1 * wx2;
    h11 += inv4 * (d2 - z1z1);
    h22 += inv4 * (d2 - z2z2);
    re12 += inv4 * (-re_c);
    im12 += inv4 * (-im_c);
  }

  double logdet;
  if (n_ == 1) {
    logdet = std::log(std::max(h11, floor_));
  } else {
    const double mean = 0.5 * (h11 + h22);
    const double off = 0.5 * (h11 - h22);
    const double q = std::sqrt(off * off + re12 * re12 + im12 * im12);
    logdet = std::log(std::max(mean - q, floor_)) + std::log(std::max(mean + q, floor_));
  }
  return logdet + smooth_or_zero(f_, z, 0.0);
}

RampParams build_ramp_params(const SingularPotential& snapped, int k, const GridPtr& grid,
                             const ExprPtr& f, double hessian_floor, double prev_eps,
                             double prev_eps_supg) {
  RampParams rp;
  rp.k = k;
  rp.delta_k = mollifier_radius(snapped, grid->domain, k);

  // sup |g_k| over the closed domain: interior grid nodes plus the boundary
  // lattice (band projections)
  const ScalarField u0k = mollify_decreasing(snapped, k, grid);
  const ScalarField gk = compat_g_k(u0k, f, grid, hessian_floor);
  double sup = 0.0;
  for (int64_t node : grid->interior_nodes) sup = std::max(sup, std::abs(gk.values[node]));
  const U0kAnalytic analytic(snapped, grid->n(), k, rp.delta_k, f, hessian_floor);
  for (const auto& bn : grid->band_nodes)
    sup = std::max(sup, std::abs(analytic.compat_g(bn.projection)));
  rp.sup_gk = sup;

  rp.eps_k = std::pow(2.0, -k) / (1.0 + sup);
  // enforce that both {eps_k} and {eps_k * sup_gk} decrease along k
  if (prev_eps > 0.0) rp.eps_k = std::min(rp.eps_k, 0.995 * prev_eps);
  if (prev_eps_supg > 0.0 && sup > 0.0)
    rp.eps_k = std::min(rp.eps_k, 0.995 * prev_eps_supg / sup);
  return rp;
}

// --- boundary data ---------------------------------------------------------

namespace {

class ExpressionBoundaryData final : public BoundaryData {
 public:
  explicit ExpressionBoundaryData(ExprPtr phi) : phi_(std::move(phi)) {}
  double value(const Point& z, double t) const override {
    EvalContext ctx;
    ctx.z = z;
    ctx.t = t;
    return phi_ ? phi_->eval(ctx) : 0.0;
  }

 private:
  ExprPtr phi_;
};

class RampedBoundaryData final : public BoundaryData {
 public:
  RampedBoundaryData(ExprPtr phi, std::shared_ptr<const U0kAnalytic> u0k, RampParams rp)
      : phi_(std::move(phi)), u0k_(std::move(u0k)), rp_(rp) {}

  double value(const Point& z, double t) const override {
    const double zt = zeta(t / rp_.eps_k);
    double target = 0.0;
    if (phi_) {
      EvalContext ctx;
      ctx.z = z;
      ctx.t = t;
      target = phi_->eval(ctx);
    }
    if (zt == 0.0) return target;
    const auto& [g, u0] = level_data(z);
    return zt * (t * g + u0) + (1.0 - zt) * target;
  }

 private:
  // g_k and u0k at boundary points are time-independent and the solver
  // re-queries the same crossing points every step, so memoize them.  One
  // instance serves one (single-threaded) level solve.
  const std::pair<double, double>& level_data(const Point& z) const {
    std::array<double, 4> key{z.c[0], z.c[1], z.c[2], z.c[3]};
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, std::make_pair(u0k_->compat_g(z), u0k_->value(z))).first;
    return it->second;
  }

  struct KeyHash {
    std::size_t operator()(const std::array<double, 4>& k) const {
      std::size_t h = 0;
      for (double v : k) {
        std::size_t b;
        std::memcpy(&b, &v, sizeof(double));
        h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  ExprPtr phi_;
  std::shared_ptr<const U0kAnalytic> u0k_;
  RampParams rp_;
  mutable std::unordered_map<std::array<double, 4>, std::pair<double, double>, KeyHash> cache_;
};

}  // namespace

BoundaryPtr expression_boundary(ExprPtr phi) {
  return std::make_shared<ExpressionBoundaryData>(std::move(phi));
}

BoundaryPtr ramped_boundary(ExprPtr phi, std::shared_ptr<const U0kAnalytic> u0k,
                            const RampParams& rp) {
  require(rp.eps_k > 0.0, ErrorCode::InvalidArgument, "ramp window must be positive");
  return std::make_shared<RampedBoundaryData>(std::move(phi), std::move(u0k), rp);
}

}  // namespace pcma
