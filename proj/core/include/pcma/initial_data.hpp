#ifndef PCMA_INITIAL_DATA_HPP
#define PCMA_INITIAL_DATA_HPP

#include <vector>

#include "pcma/field.hpp"
#include "pcma/hessian.hpp"

namespace pcma {

// Initial data u0 = sum_j mass_j * log|z - a_j| + smooth(z): plurisubharmonic
// with prescribed log poles (Lelong number mass_j at atom a_j) plus a smooth
// expression part.
struct Atom {
  Point location;
  double mass = 1.0;
};

struct SingularPotential {
  std::vector<Atom> atoms;
  ExprPtr smooth;       // nullptr means identically zero
  double m_cap = 40.0;  // pole values are clipped at -m_cap on grids
};

// Minimum distance from any atom to the boundary sphere (infinity if no atoms).
double atom_boundary_distance(const SingularPotential& p, const DomainSpec& d);

// Moves every atom to its nearest grid node (snap distance <= h/2) and checks
// the snapped atoms stay at distance >= 4h from the boundary.  Optionally
// reports the per-atom snap distances.
SingularPotential snap_atoms(const SingularPotential& p, const Grid& grid,
                             std::vector<double>* snap_distances = nullptr);

// Pointwise evaluation, clipped at -m_cap (the clip only bites near atoms).
double eval_u0(const SingularPotential& p, const Point& z);
ScalarField eval_u0_field(const SingularPotential& p, const GridPtr& grid);

// Radial profile of log|.| convolved with the unit-mass bump
// c(s) ~ (1 - (s/delta)^2)^2 on |s| < delta (2-D convolution, evaluated in
// closed form).  Equals log d exactly for d >= delta; increasing and convex in
// log d, hence plurisubharmonic as a radial function in any dimension; value
// at d=0 is log(delta) - 11/12.
double smoothed_log(double d, double delta);

// Default smoothing radius schedule: delta_k = 2^{-k} * dist(atoms, bdry)/4.
double mollifier_radius(const SingularPotential& p, const DomainSpec& d, int k);

// Level-k smooth approximation  u_{0,k} = smoothed atoms + smooth + |z|^2/k,
// equal to u0 + |z|^2/k exactly outside the delta_k-neighborhoods of atoms
// and decreasing in k by construction.  override_radius > 0 replaces the
// schedule radius (must stay below dist(atoms, bdry)/2, else MollifierTooWide).
ScalarField mollify_decreasing(const SingularPotential& p, int k, const GridPtr& grid,
                               double override_radius = 0.0);
double mollified_value(const SingularPotential& p, int k, double delta_k, const Point& z);

// Smooth switch: 1 on (-inf, 1], 0 on [2, inf), strictly decreasing between;
// zeta(s) = h(2-s)/(h(2-s)+h(s-1)) with h(x) = exp(-1/x) for x > 0.
double zeta(double s);

// Compatibility forcing on the grid: g_k = log det H(u0k) + f(.,0) at interior
// nodes (zero elsewhere).  Eigenvalues below the floor contribute log(floor),
// so barely-resolved smoothing levels still get a finite g_k.
ScalarField compat_g_k(const ScalarField& u0k, const ExprPtr& f, const GridPtr& grid,
                       double hessian_floor = 1e-8);

// Analytic continuation of the level-k data and its compatibility forcing to
// off-grid points (boundary crossings/projections).  Atom Hessians are closed
// form; the smooth part uses nested centered differences of the expression.
class U0kAnalytic {
 public:
  U0kAnalytic(SingularPotential snapped, int n, int k, double delta_k, ExprPtr f,
              double hessian_floor = 1e-8);

  double value(const Point& z) const;
  double compat_g(const Point& z) const;
  int level() const { return k_; }

 private:
  SingularPotential p_;
  int n_;
  int k_;
  double delta_k_;
  ExprPtr f_;
  double floor_;
};

struct RampParams {
  int k = 1;
  double delta_k = 0.0;  // smoothing radius
  double eps_k = 0.0;    // ramp window: boundary data is pure target for t >= 2*eps_k
  double sup_gk = 0.0;   // sup |g_k| over the grid and boundary lattice
};

// eps_k = 2^{-k} / (1 + sup|g_k|), then shrunk if needed so that both {eps_k}
// and {eps_k * sup|g_k|} decrease along k (prev_* carry the previous level).
RampParams build_ramp_params(const SingularPotential& snapped, int k, const GridPtr& grid,
                             const ExprPtr& f, double hessian_floor = 1e-8,
                             double prev_eps = 0.0, double prev_eps_supg = 0.0);

// Time-dependent Dirichlet data evaluated at boundary points.
class BoundaryData {
 public:
  virtual ~BoundaryData() = default;
  virtual double value(const Point& z, double t) const = 0;
};
using BoundaryPtr = std::shared_ptr<const BoundaryData>;

BoundaryPtr expression_boundary(ExprPtr phi);

// Ramped data  phi_k(z,t) = zeta(t/eps_k) (t g_k(z) + u0k(z)) + (1 - zeta) phi(z,t):
// equals the level-k initial data at t=0, has d/dt = g_k at t=0 (discrete
// compatibility), and hands over to the target phi for t >= 2 eps_k.
BoundaryPtr ramped_boundary(ExprPtr phi, std::shared_ptr<const U0kAnalytic> u0k,
                            const RampParams& rp);

}  // namespace pcma

#endif
