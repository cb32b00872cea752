#include "pcma/rescale.hpp"

#include <algorithm>
#include <cmath>

#include "pcma/bounds.hpp"
#include "pcma/errors.hpp"

namespace pcma {

FlowProblem rescaled_problem(const FlowProblem& prob) {
  prob.validate();
  if (prob.A == 0.0)
    fail(ErrorCode::AIsZero, "rescaling is the identity for A = 0; run the flow directly");
  require(prob.boundary == nullptr, ErrorCode::ConfigError,
          "rescaling needs expression Dirichlet data");
  require(prob.phi != nullptr, ErrorCode::ConfigError,
          "rescaling needs expression Dirichlet data");

  using V = Expression::Var;
  // in the new problem Var::t stands for the rescaled time s
  ExprPtr as1 = expr_add(expr_mul(expr_num(prob.A), expr_var(V::t)), expr_num(1));
  ExprPtr t_of_s = expr_div(expr_log(as1), expr_num(prob.A));

  FlowProblem out = prob;
  out.A = 0.0;
  out.T = time_forward(prob.A, prob.T);
  ExprPtr log_term = expr_mul(expr_num(prob.domain.n), expr_log(as1));
  if (prob.f)
    out.f = expr_sub(prob.f->substitute_time(t_of_s), log_term);
  else
    out.f = expr_neg(log_term);
  out.phi = expr_mul(as1, prob.phi->substitute_time(t_of_s));
  if (prob.u0_smooth) out.u0_smooth = prob.u0_smooth;
  return out;
}

ScalarField pull_back(const FlowState& rescaled, double A, double t) {
  require(A > 0, ErrorCode::AIsZero, "pull-back needs A > 0");
  require(!rescaled.fields.empty(), ErrorCode::InvalidArgument, "run has no snapshots");
  require(t >= 0, ErrorCode::TimeOutOfRange, "pull-back time must be nonnegative");

  const double s = time_forward(A, t);
  const double s_max = rescaled.times.back();
  if (s > s_max * (1 + 1e-9) + 1e-12)
    fail(ErrorCode::TimeOutOfRange, "t = " + std::to_string(t) + " maps to s = " +
                                        std::to_string(s) + " beyond the computed horizon " +
                                        std::to_string(s_max));

  // bracket s in the snapshot times
  std::size_t hi = 1;
  while (hi < rescaled.times.size() && rescaled.times[hi] < s) ++hi;
  if (hi == rescaled.times.size()) --hi;
  const std::size_t lo = hi - 1;
  const double s0 = rescaled.times[lo], s1 = rescaled.times[hi];
  const double w = s1 > s0 ? std::clamp((s - s0) / (s1 - s0), 0.0, 1.0) : 0.0;

  ScalarField out = make_field(rescaled.grid, t, rescaled.fields[lo].m_cap);
  const double scale = 1.0 / (A * s + 1.0);
  out.values = scale * ((1.0 - w) * rescaled.fields[lo].values +
                        w * rescaled.fields[hi].values);
  return out;
}

}  // namespace pcma
