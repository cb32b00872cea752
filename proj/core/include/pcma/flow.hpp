#ifndef PCMA_FLOW_HPP
#define PCMA_FLOW_HPP

#include <cstdint>
#include <vector>

#include "pcma/initial_data.hpp"

namespace pcma {

// The parabolic flow  du/dt = log det(u_{alpha beta-bar}) - A u + f(z,t)  on
// the domain, with Dirichlet data on the boundary and plurisubharmonic
// initial data (smooth expression or singular potential).
struct FlowProblem {
  DomainSpec domain;
  double A = 0.0;
  double T = 0.0;
  ExprPtr f;                       // forcing, nullptr = 0
  ExprPtr phi;                     // Dirichlet target (expression in z and t)
  BoundaryPtr boundary;            // effective data; nullptr = expression_boundary(phi)
  ExprPtr u0_smooth;               // smooth initial data (evaluated at t=0)...
  SingularPotential u0_singular;   // ...or atoms + smooth part
  double m_cap = 40.0;

  bool has_atoms() const { return !u0_singular.atoms.empty(); }
  BoundaryPtr effective_boundary() const;
  void validate() const;
};

struct TimeSchedule {
  double dt = 0.0;
  int64_t steps = 0;
  int64_t snapshot_stride = 1;

  void validate(double T) const;
};

struct NewtonParams {
  double tol = 1e-9;          // residual sup-norm target
  int max_iter = 30;
  double damping = 1.0;       // initial line-search step in (0, 1]
  double hessian_floor = 1e-8;
  // steps between Jacobian refactorizations (frozen-Jacobian Newton); the
  // convergence test is always the true residual, so this trades cost only
  int jacobian_reuse = 25;
};

struct StepDiagnostics {
  double t = 0;
  int newton_iters = 0;
  double residual = 0;
  int64_t clamp_count = 0;
  bool refactorized = false;
};

struct FlowState {
  GridPtr grid;
  std::vector<double> times;         // snapshot times (first is 0)
  std::vector<ScalarField> fields;   // snapshot fields
  std::vector<StepDiagnostics> diagnostics;  // one per accepted time step
  double dt = 0;
  int64_t snapshot_stride = 1;

  int64_t snapshot_count() const { return static_cast<int64_t>(times.size()); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
  // index of the snapshot at time t (within tol), or -1
  int64_t snapshot_at(double t, double tol = 1e-9) const;
};

// One backward-Euler step of the flow: solves
//   u - dt (log det H(u) - A u + f(., t_next)) = u_prev
// by damped Newton with the linearization trace(H(u)^{-1} H(w)).  u_prev must
// be strictly psh on the grid; dt must be at most 0.1 (StepTooLarge).
ScalarField implicit_step(const ScalarField& u_prev, const FlowProblem& prob, double t_next,
                          double dt, const NewtonParams& np = {});

// Marches the schedule from the given initial field, storing snapshots every
// snapshot_stride steps (plus the initial slice and the final step).
FlowState solve_flow(const FlowProblem& prob, const ScalarField& initial,
                     const TimeSchedule& sched, const NewtonParams& np = {});

// Exact-solution benchmark: u*(z,t) = (1+t)|z|^2 + 0.1 Re z1, with the forcing
// chosen so u* solves the flow for the given A.  Returns the problem and the
// exact expression.
struct ManufacturedProblem {
  FlowProblem problem;
  ExprPtr exact;
};
ManufacturedProblem manufactured_problem(int n, double A, double T);

// Decreasing smooth approximations: level k runs the flow from the mollified
// data u_{0,k} with ramped boundary data; u_hat is the pointwise minimum over
// levels (the weak-solution estimate).  Its t=0 slice stores the singular
// initial data itself (clipped at -m_cap).
struct ApproxSequence {
  std::vector<FlowState> levels;   // empty when keep_levels = false
  FlowState u_hat;
  std::vector<RampParams> ramps;
  std::vector<double> snap_distances;
};
ApproxSequence smooth_approx_sequence(const FlowProblem& prob, const GridPtr& grid, int k_max,
                                      const TimeSchedule& sched, const NewtonParams& np = {},
                                      bool keep_levels = true);

// Dirichlet-value field helper: band/exterior nodes carry the boundary data at
// their radial projections, interior nodes the supplied values.
void fill_non_interior_with_boundary(ScalarField& f, const BoundaryData& bd, double t);

}  // namespace pcma

#endif
