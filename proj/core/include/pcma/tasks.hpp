#ifndef PCMA_TASKS_HPP
#define PCMA_TASKS_HPP

#include "pcma/config.hpp"
#include "pcma/principles.hpp"
#include "pcma/rescale.hpp"

namespace pcma {

// Config-driven runs shared by the command-line tool and the test drivers.

struct SolveOutcome {
  GridPtr grid;
  FlowState flow;                  // the approximation-sequence estimate for
                                   // singular data, the plain flow otherwise
  std::vector<FlowState> levels;   // per-level runs when keep_levels was set
  std::vector<RampParams> ramps;
  bool singular = false;
};

SolveOutcome run_solve(const SolveConfig& c);

struct TrackingOutcome {
  SolveOutcome solve;
  TrackResult track;
  Point atom;       // snapped atom location actually tracked
  double mass = 0;
};

TrackingOutcome run_tracking(const TrackingConfig& c);

struct ConvergenceRow {
  int resolution = 0;
  double h = 0;
  double dt = 0;
  double sup_error = 0;
  double rate = 0;   // error ratio coarse/fine against the previous row
};

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& c);

struct RescaleOutcome {
  std::vector<double> times;   // comparison times
  std::vector<double> diffs;   // interior sup |direct - pulled back| per time
  double sup_diff = 0;
  bool tracked = false;        // resolution brackets were compared too
  double direct_lo = 0, direct_hi = 0;    // direct-run bracket
  double mapped_lo = 0, mapped_hi = 0;    // rescaled-run bracket mapped to t
  double bracket_gap = 0;      // |midpoint difference|
  bool agree = false;          // gap within stride_tol snapshot strides
};

RescaleOutcome run_rescale_compare(const RescaleCompareConfig& c);

struct VerifyOutcome {
  ComparisonSuite suite;
  std::vector<PrincipleReport> reports;
  bool passed = true;
};

VerifyOutcome run_verify(const VerifyConfig& c);

}  // namespace pcma

#endif
