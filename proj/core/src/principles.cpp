#include "pcma/principles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

PrincipleReport make_report(std::string name, double worst, double allowance,
                            const std::string& detail) {
  PrincipleReport r;
  r.name = std::move(name);
  r.worst = worst;
  r.passed = worst <= allowance;
  r.detail = detail;
  return r;
}

}  // namespace

TheoryConstants measure_constants(const FlowProblem& prob, const GridPtr& grid,
                                  int time_samples, double dt_probe) {
  prob.validate();
  require(time_samples >= 2, ErrorCode::InvalidArgument, "need at least two time samples");
  BoundaryPtr bd = prob.effective_boundary();

  TheoryConstants tc;
  tc.A = prob.A;
  tc.n = prob.domain.n;
  tc.T = prob.T;
  tc.inf_rho = -prob.domain.radius * prob.domain.radius;

  std::vector<double> times(time_samples);
  for (int i = 0; i < time_samples; ++i)
    times[i] = prob.T * static_cast<double>(i) / (time_samples - 1);

  // boundary data over the band-projection lattice
  std::vector<double> psi0(grid->band_nodes.size());
  std::vector<double> psi_mod(time_samples, 0.0);
  for (std::size_t j = 0; j < grid->band_nodes.size(); ++j)
    psi0[j] = bd->value(grid->band_nodes[j].projection, 0.0);
  for (int i = 0; i < time_samples; ++i) {
    const double t = times[i];
    const double tp = std::min(prob.T, t + dt_probe);
    const double tm = std::max(0.0, t - dt_probe);
    double mod = i > 0 ? psi_mod[i - 1] : 0.0;
    for (std::size_t j = 0; j < grid->band_nodes.size(); ++j) {
      const Point& p = grid->band_nodes[j].projection;
      const double v = bd->value(p, t);
      tc.sup_psi = std::max(tc.sup_psi, std::abs(v));
      tc.sup_phidot =
          std::max(tc.sup_phidot, std::abs(bd->value(p, tp) - bd->value(p, tm)) / (tp - tm));
      mod = std::max(mod, std::abs(v - psi0[j]));
    }
    psi_mod[i] = mod;
  }

  if (prob.f) {
    EvalContext ctx;
    for (double t : times) {
      const double tp = std::min(prob.T, t + dt_probe);
      const double tm = std::max(0.0, t - dt_probe);
      for (int64_t s = 0; s < grid->interior_count(); ++s) {
        ctx.z = grid->node_point(grid->interior_nodes[static_cast<std::size_t>(s)]);
        ctx.t = t;
        tc.sup_g = std::max(tc.sup_g, std::abs(prob.f->eval(ctx)));
        ctx.t = tp;
        const double fp = prob.f->eval(ctx);
        ctx.t = tm;
        const double fm = prob.f->eval(ctx);
        tc.sup_fdot = std::max(tc.sup_fdot, std::abs(fp - fm) / (tp - tm));
      }
    }
  }

  // piecewise-linear interpolant of the measured boundary modulus
  tc.boundary_modulus = [times, psi_mod](double t) {
    if (t <= times.front()) return psi_mod.front();
    if (t >= times.back()) return psi_mod.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1 - w) * psi_mod[i - 1] + w * psi_mod[i];
  };
  return tc;
}

PrincipleReport check_domination(const FlowState& a, const FlowState& b, double tol,
                                 const std::string& name) {
  require_same_grid(a.grid, b.grid, "domination check");
  require(a.fields.size() == b.fields.size(), ErrorCode::InvalidArgument,
          "domination check needs matching snapshot lists");
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    const double gap = interior_sup_diff(a.fields[i], b.fields[i]);
    if (gap > worst) {
      worst = gap;
      worst_t = a.times[i];
    }
  }
  std::ostringstream os;
  os << "sup(a-b) = " << worst << " at t = " << worst_t << " (tol " << tol << ")";
  return make_report(name, worst, tol, os.str());
}

PrincipleReport check_time_derivative_bound(const FlowState& st, const TheoryConstants& tc,
                                            double slack) {
  const double B = dotu_bound_B(tc);  // raises WrongRegime unless A == 0
  double worst = 0;
  double worst_t = 0;
  for (std::size_t i = 0; i + 1 < st.fields.size(); ++i) {
    const double dt = st.times[i + 1] - st.times[i];
    const double rate = interior_max_abs_diff(st.fields[i + 1], st.fields[i]) / dt;
    if (rate - B > worst) {
      worst = rate - B;
      worst_t = st.times[i + 1];
    }
  }
  std::ostringstream os;
  os << "max(|du/dt| - B) = " << worst << " at t = " << worst_t << ", B = " << B
     << " (slack " << slack << ")";
  return make_report("time-derivative bound", worst, slack, os.str());
}

PrincipleReport check_lower_lipschitz(const FlowState& st, const TheoryConstants& tc,
                                      double slack) {
  require(!st.fields.empty(), ErrorCode::InvalidArgument, "flow has no snapshots");
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0;
  for (std::size_t i = 0; i < st.fields.size(); ++i) {
    const double C = lower_lipschitz_C(tc, st.times[i]);
    // violation = sup (u0 - C - u(t))
    const double v = interior_sup_diff(st.fields[0], st.fields[i]) - C;
    if (v > worst) {
      worst = v;
      worst_t = st.times[i];
    }
  }
  std::ostringstream os;
  os << "max(u(0) - C(t) - u(t)) = " << worst << " at t = " << worst_t << " (slack " << slack
     << ")";
  return make_report("lower Lipschitz barrier", worst, slack, os.str());
}

PrincipleReport check_monotone_levels(const FlowState& uk, const FlowState& uk1, int k,
                                      double tol) {
  require(k >= 1, ErrorCode::InvalidArgument, "level index must be >= 1");
  require_same_grid(uk.grid, uk1.grid, "level monotonicity");
  require(uk.fields.size() == uk1.fields.size(), ErrorCode::InvalidArgument,
          "level monotonicity needs matching snapshot lists");
  const double step = std::pow(2.0, -k);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0;
  for (std::size_t i = 0; i < uk.fields.size(); ++i) {
    // violation = sup (u_{k+1} - u_k - 2^{-k})
    const double v = interior_sup_diff(uk1.fields[i], uk.fields[i]) - step;
    if (v > worst) {
      worst = v;
      worst_t = uk.times[i];
    }
  }
  std::ostringstream os;
  os << "max(u_" << k + 1 << " - u_" << k << " - 2^-" << k << ") = " << worst << " at t = "
     << worst_t << " (tol " << tol << ")";
  return make_report("level monotonicity", worst, tol, os.str());
}

PrincipleReport check_subsolution(const FlowProblem& prob, const GridPtr& grid,
                                  double M_max, double hessian_floor, double tol,
                                  int time_samples) {
  prob.validate();
  require(prob.phi != nullptr, ErrorCode::InvalidArgument,
          "subsolution barrier needs an expression Dirichlet target");
  require(time_samples >= 2, ErrorCode::InvalidArgument, "need at least two time samples");
  require(M_max >= 1, ErrorCode::InvalidArgument, "M_max must be at least 1");

  const DomainSpec& dom = prob.domain;
  const double R2 = dom.radius * dom.radius;
  const int dim = grid->real_dim();
  auto rho_at = [&](const Point& p) {
    double r2 = 0;
    for (int i = 0; i < dim; ++i) {
      const double d = p.c[i] - dom.center.c[i];
      r2 += d * d;
    }
    return r2 - R2;
  };

  ScalarField rho = make_field(grid, 0.0, prob.m_cap);
  for (int64_t node = 0; node < rho.values.size(); ++node)
    rho.values[node] = rho_at(grid->node_point(node));
  const HermitianField Hrho = complex_hessian(rho);

  const ScalarField u0 = prob.has_atoms()
                             ? eval_u0_field(prob.u0_singular, grid)
                             : sample_expression(grid, prob.u0_smooth, 0.0, prob.m_cap);

  // per-time data that does not depend on M
  struct Slice {
    ScalarField phi;
    HermitianField Hphi;
    Eigen::VectorXd phidot;  // centered time difference at interior slots
    Eigen::VectorXd f;
  };
  const double dt_probe = 1e-6;
  const int64_t ni = grid->interior_count();
  std::vector<Slice> slices(static_cast<std::size_t>(time_samples));
  for (int i = 0; i < time_samples; ++i) {
    const double t = prob.T * static_cast<double>(i) / (time_samples - 1);
    const double tp = std::min(prob.T, t + dt_probe);
    const double tm = std::max(0.0, t - dt_probe);
    Slice& sl = slices[static_cast<std::size_t>(i)];
    sl.phi = sample_expression(grid, prob.phi, t, prob.m_cap);
    sl.Hphi = complex_hessian(sl.phi);
    sl.phidot.resize(ni);
    sl.f = Eigen::VectorXd::Zero(ni);
    EvalContext ctx;
    for (int64_t s = 0; s < ni; ++s) {
      ctx.z = grid->node_point(grid->interior_nodes[static_cast<std::size_t>(s)]);
      ctx.t = tp;
      const double vp = prob.phi->eval(ctx);
      ctx.t = tm;
      const double vm = prob.phi->eval(ctx);
      sl.phidot[s] = (vp - vm) / (tp - tm);
      if (prob.f) {
        ctx.t = t;
        sl.f[s] = prob.f->eval(ctx);
      }
    }
  }

  double best = std::numeric_limits<double>::infinity();
  double best_M = 0;
  for (double M = 1; M <= M_max * (1 + 1e-12); M *= 2) {
    double worst = -std::numeric_limits<double>::infinity();
    // boundary equality: rho vanishes at the radial projections
    for (const BandNode& b : grid->band_nodes)
      worst = std::max(worst, std::abs(M * rho_at(b.projection)));
    // initial-data domination (u0 near atoms is its clipped grid sample)
    for (int64_t s = 0; s < ni; ++s)
      worst = std::max(worst,
                       M * rho.at_interior(s) + slices[0].phi.at_interior(s) - u0.at_interior(s));
    for (const Slice& sl : slices) {
      HermitianField H = sl.Hphi;
      H.h11 = M * Hrho.h11 + sl.Hphi.h11;
      if (grid->domain.n == 2) {
        H.h22 = M * Hrho.h22 + sl.Hphi.h22;
        H.re12 = M * Hrho.re12 + sl.Hphi.re12;
        H.im12 = M * Hrho.im12 + sl.Hphi.im12;
      }
      const Eigen::MatrixXd ev = hermitian_eigenvalues(H);
      worst = std::max(worst, hessian_floor - ev.col(0).minCoeff());
      const LogDetResult ld = logdet_hessian(H, hessian_floor, /*throw_on_notpsh=*/false);
      for (int64_t s = 0; s < ni; ++s) {
        const double ub = M * rho.at_interior(s) + sl.phi.at_interior(s);
        worst = std::max(worst, sl.phidot[s] - (ld.values[s] - prob.A * ub + sl.f[s]));
      }
    }
    if (worst < best) {
      best = worst;
      best_M = M;
    }
    if (worst <= tol) {
      std::ostringstream os;
      os << "M = " << M << " admissible; worst margin = " << worst << " (tol " << tol << ")";
      return make_report("barrier subsolution", worst, tol, os.str());
    }
  }
  std::ostringstream os;
  os << "no admissible M up to " << M_max << "; best margin = " << best << " at M = " << best_M
     << " (tol " << tol << ")";
  return make_report("barrier subsolution", best, tol, os.str());
}

PrincipleReport check_continuity_at_zero(const FlowState& st, int count, double tol) {
  require(st.fields.size() >= 3, ErrorCode::InvalidArgument,
          "need the initial slice plus at least two snapshots");
  const ScalarField& ref = st.fields[0];
  const int m = std::min<int>(count, static_cast<int>(st.fields.size()) - 1);
  std::vector<double> gaps(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i)
    gaps[static_cast<std::size_t>(i - 1)] =
        interior_l1_diff_unfloored(st.fields[static_cast<std::size_t>(i)], ref);
  // violation when an earlier-time gap exceeds a later-time one
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < m; ++i)
    worst = std::max(worst,
                     gaps[static_cast<std::size_t>(i)] - gaps[static_cast<std::size_t>(i + 1)]);
  std::ostringstream os;
  os << "L1 gaps to the initial slice:";
  for (int i = 0; i < m; ++i)
    os << ' ' << gaps[static_cast<std::size_t>(i)] << " @t="
       << st.times[static_cast<std::size_t>(i + 1)];
  os << " (tol " << tol << ")";
  return make_report("continuity at zero", worst, tol, os.str());
}

ComparisonSuite run_comparison_suite(int n_cases, uint64_t seed, int n, int resolution,
                                     double T, double dt, double tol) {
  require(n_cases >= 1, ErrorCode::InvalidArgument, "need at least one comparison case");

  DomainSpec dom;
  dom.n = n;
  dom.radius = 1.0;
  dom.center = n == 1 ? make_point1(0, 0) : make_point2(0, 0, 0, 0);
  GridPtr grid = build_grid(dom, resolution);

  using V = Expression::Var;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  ComparisonSuite suite;
  for (int c = 0; c < n_cases; ++c) {
    const uint64_t case_seed = rng();
    std::mt19937_64 crng(case_seed);
    auto coef = [&] { return unit(crng); };

    // strictly psh initial state: a|z|^2 plus pluriharmonic linear terms
    const double a = 0.8 + 0.35 * (coef() + 1.0);
    ExprPtr u0 = expr_mul(expr_num(a), expr_var(V::abs2));
    u0 = expr_add(u0, expr_mul(expr_num(0.3 * coef()), expr_var(V::x1)));
    u0 = expr_add(u0, expr_mul(expr_num(0.3 * coef()), expr_var(V::y1)));

    // bounded forcing, linear in space and time
    ExprPtr f = expr_num(coef());
    f = expr_add(f, expr_mul(expr_num(coef()), expr_var(V::x1)));
    f = expr_add(f, expr_mul(expr_num(coef()), expr_var(V::y1)));
    f = expr_add(f, expr_mul(expr_num(coef()), expr_var(V::t)));

    // nonnegative bump: (c0 + c1 x1 + c2 y1)^2 + c3^2 |z|^2
    ExprPtr lin = expr_num(coef());
    lin = expr_add(lin, expr_mul(expr_num(coef()), expr_var(V::x1)));
    lin = expr_add(lin, expr_mul(expr_num(coef()), expr_var(V::y1)));
    const double c3 = coef();
    ExprPtr q = expr_add(expr_pow(lin, expr_num(2)),
                         expr_mul(expr_num(c3 * c3), expr_var(V::abs2)));

    FlowProblem base;
    base.domain = dom;
    base.A = 0.0;
    base.T = T;
    base.f = f;
    base.phi = u0;  // time-independent target, compatible at t = 0
    base.u0_smooth = u0;

    FlowProblem raised = base;
    raised.f = expr_add(f, q);

    TimeSchedule sched;
    sched.dt = dt;
    sched.steps = static_cast<int64_t>(std::llround(T / dt));
    sched.snapshot_stride = std::max<int64_t>(1, sched.steps / 10);

    const ScalarField init = sample_expression(grid, u0, 0.0);
    const FlowState lo = solve_flow(base, init, sched);
    const FlowState hi = solve_flow(raised, init, sched);

    ComparisonCase cc;
    cc.seed = case_seed;
    cc.sup_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lo.fields.size(); ++i) {
      cc.sup_gap = std::max(cc.sup_gap, interior_sup_diff(lo.fields[i], hi.fields[i]));
      for (int64_t s = 0; s < grid->interior_count(); ++s) {
        const double d = lo.fields[i].at_interior(s) - hi.fields[i].at_interior(s);
        if (d > tol) ++cc.violations;
      }
    }
    suite.total_violations += cc.violations;
    suite.cases.push_back(cc);
  }
  return suite;
}

}  // namespace pcma
