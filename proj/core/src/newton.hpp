#ifndef PCMA_SRC_NEWTON_HPP
#define PCMA_SRC_NEWTON_HPP

// Internal backward-Euler stepper.  Not installed; the public entry points are
// implicit_step / solve_flow in flow.hpp.

#include <Eigen/Sparse>
#include <vector>

#include "pcma/flow.hpp"

namespace pcma {

// Damped Newton solver for one implicit step
//   (1 + A dt) u - dt log det H(u) - dt f(., t) - u_prev = 0
// over the interior slots, with stencil arms that leave the domain closed by
// the boundary-crossing ghost rule.  Eigenvalues of H below the floor delta
// continue the log linearly with slope 1/delta, which keeps the residual C^1
// and penalizes states outside the psh cone.  The Jacobian uses the exact
// linearization trace(S H(w)) with S the floored inverse of H, and is
// refactorized on observed contraction loss or every jacobian_reuse steps;
// convergence is always judged on the true residual.
class FlowStepper {
 public:
  FlowStepper(GridPtr grid, double A, ExprPtr f, BoundaryPtr bd, const NewtonParams& np);

  // Advances the interior vector in place to time t_next.  u holds one value
  // per interior slot on entry (state at t_next - dt) and exit.  An optional
  // guess seeds the iteration (e.g. an extrapolation from earlier steps); it
  // is discarded if it leaves the plurisubharmonic cone.
  StepDiagnostics advance(Eigen::VectorXd& u, double t_next, double dt,
                          const Eigen::VectorXd* guess = nullptr);

  // Dirichlet values at the stencil boundary crossings for the given time,
  // in crossing-list order (used to reconstruct full fields).
  void refresh_time_data(double t);

  void force_refactorization() { need_refactor_ = true; }

 private:
  struct Arm {
    int32_t interior_slot = -1;  // >= 0: neighbor is an interior node
    int32_t crossing = -1;       // >= 0: arm leaves the domain
  };

  // residual and Hessian spectral data at one iterate
  struct Eval {
    Eigen::VectorXd G;
    Eigen::VectorXd h11, h22, re12, im12;  // h22/re12/im12 empty for n=1
    double res_sup = 0;
    int64_t clamp_count = 0;
    bool not_psh = false;
    double lam_min = 0;      // most negative clamped eigenvalue, 0 if none
    int64_t lam_min_slot = -1;
    double lam_all_min = 0;  // smallest Hessian eigenvalue over all slots
  };

  void evaluate(const Eigen::VectorXd& u, const Eigen::VectorXd& u_prev, double dt,
                Eval& ev) const;
  void build_matrix(const Eval& ev, double dt);
  Eigen::VectorXd solve_linear(const Eval& ev);

  GridPtr grid_;
  double A_;
  ExprPtr f_;
  BoundaryPtr bd_;
  NewtonParams np_;
  int n_;
  int n_offsets_;
  int64_t ni_;

  std::vector<Arm> arms_;            // ni_ * n_offsets_, arm-major per slot
  std::vector<Point> cross_pts_;
  std::vector<double> cross_wint_;
  std::vector<double> cross_wbc_;
  std::vector<double> cross_phi_;    // Dirichlet values at the cached time
  Eigen::VectorXd f_vals_;           // forcing per slot at the cached time
  bool f_time_dep_ = false;
  double cached_bd_time_;
  double cached_f_time_;
  double noise_scale_ = 0;           // roundoff scale of one Hessian entry

  Eigen::SparseMatrix<double> M_;
  Eigen::VectorXd build_scale_;      // n=1 row scaling frozen at build time
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg_;
  bool need_refactor_ = true;
  bool pattern_ready_ = false;
  double built_dt_ = -1.0;
  int64_t steps_since_build_ = 0;
};

}  // namespace pcma

#endif
