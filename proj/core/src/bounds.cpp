#include "pcma/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "pcma/errors.hpp"

namespace pcma {

double epsilon_A(double A, double x, int n) {
  require(A >= 0.0, ErrorCode::InvalidArgument, "epsilon_A needs A >= 0");
  require(x >= 0.0, ErrorCode::InvalidArgument, "epsilon_A needs a nonnegative mass");
  require(n >= 1, ErrorCode::InvalidArgument, "epsilon_A needs n >= 1");
  const double two_n = 2.0 * n;
  if (A == 0.0) return x / two_n;
  return std::log1p(A * x / two_n) / A;
}

double time_forward(double A, double t) {
  require(A >= 0.0, ErrorCode::InvalidArgument, "time_forward needs A >= 0");
  if (A == 0.0) return t;
  return std::expm1(A * t) / A;
}

double time_backward(double A, double s) {
  require(A >= 0.0, ErrorCode::InvalidArgument, "time_backward needs A >= 0");
  if (A == 0.0) return s;
  require(A * s > -1.0, ErrorCode::TimeOutOfRange, "time_backward needs A*s + 1 > 0");
  return std::log1p(A * s) / A;
}

double lower_lipschitz_C(const TheoryConstants& tc, double t) {
  require(t >= 0.0 && t <= tc.T + 1e-12, ErrorCode::TimeOutOfRange,
          "lower_lipschitz_C needs 0 <= t <= T");
  require(tc.inf_rho < 0.0, ErrorCode::InvalidArgument,
          "defining function must be negative somewhere");
  const double modulus = tc.boundary_modulus ? tc.boundary_modulus(t) : 0.0;
  if (t == 0.0) return modulus;  // infimum is 0 as eps -> 0
  const double eps = std::clamp(tc.n * t / (-tc.inf_rho), 1e-300, 1.0);
  const double bracket =
      (-tc.n * std::log(eps) + tc.A * tc.sup_psi + tc.sup_g) * t - eps * tc.inf_rho;
  return bracket + modulus;
}

double dotu_bound_B(const TheoryConstants& tc) {
  require(tc.A == 0.0, ErrorCode::WrongRegime,
          "time-derivative bound is stated for the A=0 equation");
  return 2.0 * tc.sup_phidot + tc.T * tc.sup_fdot + tc.n;
}

}  // namespace pcma
