#ifndef PCMA_RESCALE_HPP
#define PCMA_RESCALE_HPP

#include "pcma/flow.hpp"

namespace pcma {

// Normal-form change of variables for the damped flow.  With A > 0, s =
// (e^{At} - 1)/A and v(z,s) = (A s + 1) u(z, t(s)) turns the A-flow into the
// undamped one with transformed data:
//   f~(z,s)   = -n log(A s + 1) + f(z, t(s)),
//   phi~(z,s) = (A s + 1) phi(z, t(s)),
// initial data unchanged.  Both the forcing and the Dirichlet data must be
// expressions so the substitution can happen symbolically; raises AIsZero for
// A = 0 (the transform is the identity there and nothing needs solving twice).
FlowProblem rescaled_problem(const FlowProblem& prob);

// Solution of the damped flow recovered from a rescaled run:
// u(., t) = v(., s)/(A s + 1) with s = (e^{At} - 1)/A, values linearly
// interpolated between the stored snapshots.  t must stay within the horizon
// covered by the run (TimeOutOfRange).
ScalarField pull_back(const FlowState& rescaled, double A, double t);

}  // namespace pcma

#endif
