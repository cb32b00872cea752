#ifndef PCMA_PRINCIPLES_HPP
#define PCMA_PRINCIPLES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pcma/bounds.hpp"
#include "pcma/flow.hpp"

namespace pcma {

// Result of one structural check on computed flows.  worst is the largest
// violation found (negative or zero when the check passes with margin).
struct PrincipleReport {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  std::string detail;
};

// Measures the sup norms entering the a-priori estimates from the discretized
// problem: boundary data and its time derivative over the band-projection/time
// lattice, forcing and its time derivative over the grid/time lattice.  Time
// derivatives are centered differences with step dt_probe.
TheoryConstants measure_constants(const FlowProblem& prob, const GridPtr& grid,
                                  int time_samples = 33, double dt_probe = 1e-6);

// a <= b + tol at every interior node of every paired snapshot
PrincipleReport check_domination(const FlowState& a, const FlowState& b, double tol,
                                 const std::string& name);

// |u_{i+1} - u_i| / dt <= B + slack between consecutive snapshots, where B is
// the two-sided time-derivative bound of the undamped equation.
PrincipleReport check_time_derivative_bound(const FlowState& st, const TheoryConstants& tc,
                                            double slack);

// u(t) >= u(0) - C(t) - slack with the lower Lipschitz barrier C
PrincipleReport check_lower_lipschitz(const FlowState& st, const TheoryConstants& tc,
                                      double slack);

// level monotonicity u_k + 2^{-k} >= u_{k+1} - tol
PrincipleReport check_monotone_levels(const FlowState& uk, const FlowState& uk1, int k,
                                      double tol);

// Barrier subsolution u_bar = M rho + phi with rho = |z - center|^2 - R^2.
// Scans M over doubling values 1, 2, 4, ... up to M_max and reports the
// smallest admissible one, where admissible means (on the grid and a uniform
// time lattice): strict psh (Hessian eigenvalues >= floor), the pointwise
// inequality  d/dt u_bar <= log det H(u_bar) - A u_bar + f,  equality with the
// Dirichlet data at boundary projections, and u_bar(.,0) <= u0 at interior
// nodes.  phi must be an expression so the barrier extends into the domain.
PrincipleReport check_subsolution(const FlowProblem& prob, const GridPtr& grid,
                                  double M_max = 1024.0, double hessian_floor = 1e-8,
                                  double tol = 1e-7, int time_samples = 9);

// L1 gap between the flow and its initial slice over the earliest snapshots:
// the gap must shrink monotonically as t -> 0.  Checked on the first `count`
// positive-time snapshots; nodes floored in either slice are excluded from
// the norm, so singular initial data contributes only its finite part.
PrincipleReport check_continuity_at_zero(const FlowState& st, int count = 5,
                                         double tol = 1e-9);

// Randomized comparison-principle stress: each case draws a smooth strictly
// psh initial state, a bounded forcing f, and a nonnegative polynomial q, then
// solves the flow twice (forcing f and f + q) and counts interior nodes where
// the f-run exceeds the (f+q)-run by more than tol.
struct ComparisonCase {
  uint64_t seed = 0;
  double sup_gap = 0.0;     // max over snapshots of sup(u1 - u2), ideally <= 0
  int64_t violations = 0;
};

struct ComparisonSuite {
  std::vector<ComparisonCase> cases;
  int64_t total_violations = 0;
};

ComparisonSuite run_comparison_suite(int n_cases, uint64_t seed, int n, int resolution,
                                     double T, double dt, double tol);

}  // namespace pcma

#endif
