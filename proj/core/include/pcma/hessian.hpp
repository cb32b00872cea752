#ifndef PCMA_HESSIAN_HPP
#define PCMA_HESSIAN_HPP

#include <Eigen/Core>

#include "pcma/field.hpp"

namespace pcma {

// Discrete complex Hessian u_{alpha beta-bar} at interior nodes, from centered
// second differences of the stored node values:
//   u_{ab-bar} = 1/4 [ (u_{x_a x_b} + u_{y_a y_b}) + i (u_{x_a y_b} - u_{y_a x_b}) ].
// Diagonal entries are real; storage is symmetrized (entry (2,1) is the
// conjugate of (1,2) by construction), so matrices are Hermitian exactly.
// Centered differences are exact on real quadratics.
struct HermitianField {
  GridPtr grid;
  int n = 1;
  Eigen::VectorXd h11;   // per interior slot
  Eigen::VectorXd h22;   // n=2 only
  Eigen::VectorXd re12;  // n=2 only
  Eigen::VectorXd im12;  // n=2 only
};

HermitianField complex_hessian(const ScalarField& u);

// Eigenvalues per interior slot (ascending; n=1 gives one column).
Eigen::MatrixXd hermitian_eigenvalues(const HermitianField& H);

struct LogDetResult {
  Eigen::VectorXd values;      // log det with eigenvalues clamped at floor_delta
  int64_t clamp_count = 0;     // eigenvalues that hit the clamp
  double min_eigenvalue = 0;   // most negative eigenvalue seen
  int64_t worst_node = -1;     // grid node of min_eigenvalue
  bool not_psh = false;        // some eigenvalue fell below -10*floor_delta
};

// Clamped log-determinant.  If throw_on_notpsh, an eigenvalue below
// -10*floor_delta raises Error(NotPSH); otherwise the flag is returned so the
// caller (the Newton line search) can reject the trial state.
LogDetResult logdet_hessian(const HermitianField& H, double floor_delta,
                            bool throw_on_notpsh = true);

}  // namespace pcma

#endif
