#include "pcma/flow.hpp"

#include <cmath>
#include <utility>

#include "newton.hpp"
#include "pcma/errors.hpp"
#include "pcma/hessian.hpp"

namespace pcma {

BoundaryPtr FlowProblem::effective_boundary() const {
  if (boundary) return boundary;
  require(phi != nullptr, ErrorCode::ConfigError, "flow problem has no Dirichlet data");
  return expression_boundary(phi);
}

void FlowProblem::validate() const {
  domain.validate();
  require(A >= 0, ErrorCode::ConfigError, "damping coefficient A must be >= 0");
  require(T > 0, ErrorCode::ConfigError, "final time T must be positive");
  require(m_cap > 0, ErrorCode::ConfigError, "m_cap must be positive");
  require(phi != nullptr || boundary != nullptr, ErrorCode::ConfigError,
          "flow problem has no Dirichlet data");
  if (f) f->validate_dimension(domain.n);
  if (phi) phi->validate_dimension(domain.n);
  if (u0_smooth) {
    require(!has_atoms(), ErrorCode::ConfigError,
            "initial data is either a smooth expression or a singular potential, not both");
    u0_smooth->validate_dimension(domain.n);
  }
  if (u0_singular.smooth) u0_singular.smooth->validate_dimension(domain.n);
  for (const Atom& a : u0_singular.atoms) {
    require(a.location.dim == domain.real_dim(), ErrorCode::ConfigError,
            "atom dimension does not match the domain");
    require(a.mass > 0, ErrorCode::ConfigError, "atom masses must be positive");
    require(defining_function(domain, a.location) < 0, ErrorCode::ConfigError,
            "atoms must lie inside the domain");
  }
}

void TimeSchedule::validate(double T) const {
  require(dt > 0, ErrorCode::ConfigError, "dt must be positive");
  if (dt > 0.1 + 1e-15)
    fail(ErrorCode::StepTooLarge,
         "dt = " + std::to_string(dt) + " exceeds the trust bound 0.1");
  require(steps >= 1, ErrorCode::ConfigError, "schedule needs at least one step");
  require(snapshot_stride >= 1, ErrorCode::ConfigError, "snapshot stride must be >= 1");
  require(dt * static_cast<double>(steps) <= T * (1 + 1e-12) + 1e-12, ErrorCode::ConfigError,
          "schedule runs past the final time T");
}

int64_t FlowState::snapshot_at(double t, double tol) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol) return static_cast<int64_t>(i);
  return -1;
}

void fill_non_interior_with_boundary(ScalarField& f, const BoundaryData& bd, double t) {
  const Grid& g = *f.grid;
  for (const BandNode& b : g.band_nodes) f.values[b.node] = bd.value(b.projection, t);
  for (int64_t node = 0; node < g.total_nodes; ++node) {
    if (g.node_class[static_cast<std::size_t>(node)] != NodeClass::Exterior) continue;
    f.values[node] = bd.value(project_to_boundary(g.domain, g.node_point(node)), t);
  }
}

namespace {

void require_strictly_psh(const ScalarField& u, double floor_delta) {
  logdet_hessian(complex_hessian(u), floor_delta, /*throw_on_notpsh=*/true);
}

ScalarField snapshot_from(const GridPtr& grid, const Eigen::VectorXd& u,
                          const BoundaryData& bd, double t, double m_cap) {
  ScalarField f = make_field(grid, t, m_cap);
  for (int64_t s = 0; s < grid->interior_count(); ++s)
    f.values[grid->interior_nodes[static_cast<std::size_t>(s)]] = u[s];
  fill_non_interior_with_boundary(f, bd, t);
  return f;
}

}  // namespace

ScalarField implicit_step(const ScalarField& u_prev, const FlowProblem& prob, double t_next,
                          double dt, const NewtonParams& np) {
  prob.validate();
  require_finite(u_prev, "implicit step input");
  require_strictly_psh(u_prev, np.hessian_floor);

  const GridPtr& grid = u_prev.grid;
  BoundaryPtr bd = prob.effective_boundary();
  FlowStepper stepper(grid, prob.A, prob.f, bd, np);

  Eigen::VectorXd u(grid->interior_count());
  for (int64_t s = 0; s < grid->interior_count(); ++s) u[s] = u_prev.at_interior(s);
  stepper.advance(u, t_next, dt);
  return snapshot_from(grid, u, *bd, t_next, u_prev.m_cap);
}

namespace {

FlowState run_flow(const FlowProblem& prob, const ScalarField& initial,
                   const TimeSchedule& sched, const NewtonParams& np, bool check_entry) {
  prob.validate();
  sched.validate(prob.T);
  require_finite(initial, "initial data");
  // mollified approximation levels are exempt: discretizing the harmonic log
  // tail of an atom undershoots zero by O(h^2/r^4) near the mollification
  // radius even though the continuum data is psh; the first implicit step
  // projects such states back into the discrete cone
  if (check_entry) require_strictly_psh(initial, np.hessian_floor);

  const GridPtr& grid = initial.grid;
  BoundaryPtr bd = prob.effective_boundary();
  FlowStepper stepper(grid, prob.A, prob.f, bd, np);

  FlowState st;
  st.grid = grid;
  st.dt = sched.dt;
  st.snapshot_stride = sched.snapshot_stride;
  st.times.push_back(0.0);
  st.fields.push_back(initial);
  st.fields.back().time = 0.0;
  st.diagnostics.reserve(static_cast<std::size_t>(sched.steps));

  Eigen::VectorXd u(grid->interior_count());
  for (int64_t s = 0; s < grid->interior_count(); ++s) u[s] = initial.at_interior(s);

  // seed each step with the linear extrapolation of the two previous states;
  // the stepper falls back to the plain predictor if the guess is not psh
  Eigen::VectorXd u_old, guess;
  for (int64_t i = 1; i <= sched.steps; ++i) {
    const double t = static_cast<double>(i) * sched.dt;
    const Eigen::VectorXd* seed = nullptr;
    if (i >= 2) {
      guess = 2.0 * u - u_old;
      seed = &guess;
    }
    u_old = u;
    st.diagnostics.push_back(stepper.advance(u, t, sched.dt, seed));
    if (i % sched.snapshot_stride == 0 || i == sched.steps) {
      st.times.push_back(t);
      st.fields.push_back(snapshot_from(grid, u, *bd, t, initial.m_cap));
    }
  }
  return st;
}

}  // namespace

FlowState solve_flow(const FlowProblem& prob, const ScalarField& initial,
                     const TimeSchedule& sched, const NewtonParams& np) {
  return run_flow(prob, initial, sched, np, /*check_entry=*/true);
}

ManufacturedProblem manufactured_problem(int n, double A, double T) {
  require(n == 1 || n == 2, ErrorCode::ConfigError, "complex dimension must be 1 or 2");
  require(A >= 0, ErrorCode::ConfigError, "damping coefficient A must be >= 0");

  using V = Expression::Var;
  // u*(z,t) = (1+t) |z|^2 + 0.1 Re z1; H(u*) = (1+t) Id, so the forcing
  // f = |z|^2 - n log(1+t) + A u* makes u* an exact solution.
  ExprPtr one_plus_t = expr_add(expr_num(1), expr_var(V::t));
  ExprPtr exact = expr_add(expr_mul(one_plus_t, expr_var(V::abs2)),
                           expr_mul(expr_num(0.1), expr_var(V::x1)));
  ExprPtr f = expr_sub(expr_var(V::abs2), expr_mul(expr_num(n), expr_log(one_plus_t)));
  if (A > 0) f = expr_add(f, expr_mul(expr_num(A), exact));

  ManufacturedProblem mp;
  mp.problem.domain.n = n;
  mp.problem.domain.radius = 1.0;
  mp.problem.domain.center = n == 1 ? make_point1(0, 0) : make_point2(0, 0, 0, 0);
  mp.problem.A = A;
  mp.problem.T = T;
  mp.problem.f = f;
  mp.problem.phi = exact;
  mp.problem.u0_smooth = exact;
  mp.exact = exact;
  return mp;
}

ApproxSequence smooth_approx_sequence(const FlowProblem& prob, const GridPtr& grid, int k_max,
                                      const TimeSchedule& sched, const NewtonParams& np,
                                      bool keep_levels) {
  prob.validate();
  require(prob.has_atoms(), ErrorCode::ConfigError,
          "the approximation sequence needs singular initial data");
  require(prob.phi != nullptr, ErrorCode::ConfigError,
          "ramped boundary data needs an expression target");
  require(k_max >= 2, ErrorCode::InvalidArgument, "need at least two approximation levels");

  ApproxSequence seq;
  const SingularPotential snapped = snap_atoms(prob.u0_singular, *grid, &seq.snap_distances);

  double prev_eps = 0.0, prev_eps_supg = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    RampParams rp = build_ramp_params(snapped, k, grid, prob.f, np.hessian_floor, prev_eps,
                                      prev_eps_supg);
    prev_eps = rp.eps_k;
    prev_eps_supg = rp.eps_k * rp.sup_gk;
    seq.ramps.push_back(rp);

    auto analytic = std::make_shared<U0kAnalytic>(snapped, grid->n(), k, rp.delta_k, prob.f,
                                                  np.hessian_floor);
    FlowProblem level = prob;
    level.boundary = ramped_boundary(prob.phi, analytic, rp);

    ScalarField u0k = mollify_decreasing(snapped, k, grid);
    FlowState run = run_flow(level, u0k, sched, np, /*check_entry=*/false);

    if (k == 1) {
      seq.u_hat = run;
    } else {
      for (std::size_t i = 0; i < run.fields.size(); ++i)
        seq.u_hat.fields[i] = pointwise_min(seq.u_hat.fields[i], run.fields[i]);
      seq.u_hat.diagnostics.clear();
    }
    if (keep_levels)
      seq.levels.push_back(std::move(run));
  }

  // the t = 0 slice of the estimate is the singular data itself (clipped at
  // -m_cap, floor flags set at the clipped nodes)
  seq.u_hat.fields[0] = eval_u0_field(snapped, grid);
  return seq;
}

}  // namespace pcma
