#ifndef PCMA_CONFIG_HPP
#define PCMA_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pcma/demailly.hpp"
#include "pcma/flow.hpp"
#include "pcma/lelong.hpp"

namespace pcma {

// JSON-backed run descriptions.  Parsing is strict: unknown keys are rejected
// (ConfigError), malformed JSON raises ParseError, and every loader has a
// matching resolved_* serializer that echoes the configuration with all
// defaults filled in, so runs are reproducible from their logs.

struct SolveConfig {
  FlowProblem problem;
  int resolution = 65;
  TimeSchedule schedule;
  NewtonParams newton;
  int k_max = 4;             // approximation levels when the data is singular
  bool keep_levels = false;
};

struct TrackingConfig {
  SolveConfig solve;
  int atom = 0;
  LelongOptions lelong;
  double mass_tol = 0.05;
};

struct DemaillyConfig {
  DomainSpec domain;
  DemaillyWeight weight;
  DemaillyOptions options;
};

struct RescaleCompareConfig {
  SolveConfig solve;          // A must be positive
  std::vector<double> times;  // comparison times; empty = direct snapshot times
  int atom = -1;              // >= 0: also compare resolution brackets
  LelongOptions lelong;
  double mass_tol = 0.05;
  int64_t stride_tol = 2;     // admissible bracket disagreement, in snapshot strides
};

struct VerifyConfig {
  // randomized comparison-principle stress
  int cases = 20;
  uint64_t seed = 1;
  int resolution = 65;
  double T = 0.1;
  double dt = 2e-3;
  double tol = 1e-6;
  // structural checks on a manufactured run
  bool principles = true;
  int principle_resolution = 65;
  double principle_T = 0.25;
  double principle_dt = 1e-3;
  double slack_scale = 25.0;  // slack = tol + scale * (h^2 + dt)
};

struct ConvergenceConfig {
  int n = 1;
  double A = 0.0;
  double T = 0.5;
  std::vector<int> resolutions = {65, 129, 257};
  double dt_factor = 16.0;   // dt = dt_factor * h^2
  NewtonParams newton;
};

SolveConfig parse_solve_config(const std::string& json_text);
TrackingConfig parse_tracking_config(const std::string& json_text);
DemaillyConfig parse_demailly_config(const std::string& json_text);
RescaleCompareConfig parse_rescale_config(const std::string& json_text);
VerifyConfig parse_verify_config(const std::string& json_text);
ConvergenceConfig parse_convergence_config(const std::string& json_text);

SolveConfig load_solve_config(const std::string& path);
TrackingConfig load_tracking_config(const std::string& path);
DemaillyConfig load_demailly_config(const std::string& path);
RescaleCompareConfig load_rescale_config(const std::string& path);
VerifyConfig load_verify_config(const std::string& path);
ConvergenceConfig load_convergence_config(const std::string& path);

std::string resolved_solve_config(const SolveConfig& c);
std::string resolved_tracking_config(const TrackingConfig& c);
std::string resolved_demailly_config(const DemaillyConfig& c);
std::string resolved_rescale_config(const RescaleCompareConfig& c);
std::string resolved_verify_config(const VerifyConfig& c);
std::string resolved_convergence_config(const ConvergenceConfig& c);

std::string read_text_file(const std::string& path);

}  // namespace pcma

#endif
