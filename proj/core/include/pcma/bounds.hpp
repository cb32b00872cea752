#ifndef PCMA_BOUNDS_HPP
#define PCMA_BOUNDS_HPP

#include <functional>

namespace pcma {

// Singularity-lifetime scale: a log pole of mass x survives for time
//   epsilon_A(x) = x/(2n)                                   if A = 0,
//   epsilon_A(x) = (1/A) * (log(A x + 2n) - log(2n))        if A > 0.
// The measured resolution time of an atom of mass nu is predicted to land in
// [epsilon_A(nu), epsilon_A(n*nu)]; the interval collapses for n=1.
double epsilon_A(double A, double x, int n);

// Time change between the damped flow (A > 0) and its undamped normal form:
// s = (e^{At} - 1)/A and t = log(A s + 1)/A.  Both extend continuously to
// A = 0 as the identity.
double time_forward(double A, double t);
double time_backward(double A, double s);

// Constants entering the a-priori estimates, measured from the discretized
// problem (sup norms over grid/boundary lattices).
struct TheoryConstants {
  double A = 0.0;
  int n = 1;
  double T = 0.0;
  double sup_psi = 0.0;     // sup |boundary data| over the boundary-time lattice
  double sup_g = 0.0;       // sup |forcing| over the space-time lattice
  double sup_phidot = 0.0;  // sup |d/dt boundary data|
  double sup_fdot = 0.0;    // sup |d/dt forcing|
  double inf_rho = -1.0;    // min of the defining function (= -radius^2)
  // sup over t' <= t of sup over the boundary of |psi(.,t') - psi(.,0)|
  std::function<double(double)> boundary_modulus;
};

// Lower Lipschitz barrier: u(z,t) - u(z,0) >= -C(t) with
//   C(t) = inf_{0<eps<1} [ (-n log eps + A sup|psi| + sup|g|) t - eps inf rho ]
//          + boundary_modulus(t).
// The infimum has the closed-form minimizer eps* = n t / (-inf rho), clamped
// to (0, 1].
double lower_lipschitz_C(const TheoryConstants& tc, double t);

// Two-sided time-derivative bound for the A=0 flow:
//   (u - sup u0)/t - B <= du/dt <= (u - u0)/t + B,
//   B = 2 sup|phidot| + T sup|fdot| + n.
// Raises WrongRegime when A != 0.
double dotu_bound_B(const TheoryConstants& tc);

}  // namespace pcma

#endif
