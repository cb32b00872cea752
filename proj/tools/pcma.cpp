// Command-line front end: config-driven runs of the singular parabolic
// Monge-Ampere solver and its companion estimators.
//
// Exit codes: 0 success, 1 a verification-style check failed, 2 bad
// configuration or usage, 3 numerical/runtime failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcma/errors.hpp"
#include "pcma/field_io.hpp"
#include "pcma/series_io.hpp"
#include "pcma/tasks.hpp"

namespace fs = std::filesystem;
using namespace pcma;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* copt = cmd->add_option("--config", args.config, "JSON run configuration");
  if (config_required) copt->required();
  cmd->add_option("--out", args.out, "output directory (created if missing)");
  cmd->add_option("--seed", args.seed, "override the RNG seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--quiet", args.quiet, "suppress the resolved-config echo and progress");
}

fs::path ensure_outdir(const CommonArgs& args) {
  fs::path dir(args.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + dir.string());
  return dir;
}

void echo_resolved(const CommonArgs& args, const std::string& resolved, const fs::path& dir) {
  std::ofstream out(dir / "resolved_config.json", std::ios::trunc);
  out << resolved << '\n';
  if (!args.quiet) std::cout << resolved << '\n';
}

CsvTable diagnostics_table(const FlowState& st) {
  CsvTable t;
  if (!st.fields.empty()) t.comments = {"m_cap " + format_g17(st.fields.front().m_cap)};
  t.columns = {"t", "newton_iters", "residual", "clamp_count", "refactorized"};
  for (const StepDiagnostics& d : st.diagnostics)
    t.rows.push_back({d.t, static_cast<double>(d.newton_iters), d.residual,
                      static_cast<double>(d.clamp_count), d.refactorized ? 1.0 : 0.0});
  return t;
}

int cmd_solve(const CommonArgs& args) {
  SolveConfig cfg = load_solve_config(args.config);
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_solve_config(cfg), dir);

  SolveOutcome out = run_solve(cfg);
  for (std::size_t i = 0; i < out.flow.fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%04zu.bin", i);
    save_field(out.flow.fields[i], (dir / name).string());
  }
  if (!out.flow.diagnostics.empty())
    write_csv(diagnostics_table(out.flow), (dir / "diagnostics.csv").string());
  if (!args.quiet) {
    std::cout << (out.singular ? "approximation-sequence estimate" : "flow") << ": "
              << out.flow.fields.size() << " snapshots up to t = " << out.flow.final_time()
              << ", grid " << cfg.resolution << ", written to " << dir.string() << '\n';
  }
  return 0;
}

int cmd_track(const CommonArgs& args) {
  TrackingConfig cfg = load_tracking_config(args.config);
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_tracking_config(cfg), dir);

  TrackingOutcome out = run_tracking(cfg);
  write_csv(tracking_table(out.track), (dir / "tracking.csv").string());
  if (!args.quiet) {
    std::cout << "atom mass " << out.mass << ", predicted window [" << out.track.window_lo
              << ", " << out.track.window_hi << "]\n";
    if (out.track.resolved)
      std::cout << "resolved in [" << out.track.t_lo << ", " << out.track.t_hi
                << "], estimate " << out.track.estimate << '\n';
    else
      std::cout << "not resolved by t = " << out.solve.flow.final_time() << '\n';
  }
  return 0;
}

int cmd_demailly(const CommonArgs& args) {
  DemaillyConfig cfg = load_demailly_config(args.config);
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_demailly_config(cfg), dir);

  DemaillyResult res = demailly_approximation(cfg.domain, cfg.weight, cfg.options);

  CsvTable gram;
  gram.columns = {"degree", "kept", "gram_diag"};
  for (int d = 0; d <= cfg.options.max_degree; ++d) {
    const bool kept =
        std::find(res.kept.begin(), res.kept.end(), d) != res.kept.end();
    double diag = 0;
    if (kept) {
      const auto it = std::find(res.kept.begin(), res.kept.end(), d);
      const Eigen::Index i = it - res.kept.begin();
      diag = res.gram(i, i).real();
    }
    gram.rows.push_back({static_cast<double>(d), kept ? 1.0 : 0.0, diag});
  }
  write_csv(gram, (dir / "gram_diag.csv").string());

  // radial profile of the approximation with the degree-cap truncation share
  CsvTable prof;
  prof.columns = {"r", "phi_m", "truncation"};
  for (int i = 1; i <= 64; ++i) {
    const double r = cfg.domain.radius * i / 65.0;
    const DemaillyValue v = res.value_full(
        make_point1(cfg.domain.center.c[0] + r, cfg.domain.center.c[1]));
    prof.rows.push_back({r, v.phi_m, v.last_fraction});
  }
  write_csv(prof, (dir / "radial_profile.csv").string());

  const DemBoundsReport rep = dem_bounds_report(res, cfg.weight);
  CsvTable bounds;
  bounds.comments = {"lower bound fit: phi_m >= N log|z-center| - C on the 0.6R disc, N = " +
                         format_g17(rep.fit_N) + ", C = " + format_g17(rep.fit_C) +
                         ", margin = " + format_g17(rep.fit_margin),
                     std::string("truncation_flag ") + (rep.truncation_flag ? "1" : "0")};
  bounds.columns = {"x",  "y",          "is_atom",     "nu_phi", "nu_phi_m", "nu_est",
                    "lo", "hi",         "truncation",  "finite_disc", "pass"};
  for (const DemBoundsRow& r : rep.rows)
    bounds.rows.push_back({r.z.c[0], r.z.c[1], r.is_atom ? 1.0 : 0.0, r.nu_phi, r.nu_phi_m,
                           r.nu_est, r.lo, r.hi, r.truncation, r.finite_disc ? 1.0 : 0.0,
                           r.passed ? 1.0 : 0.0});
  write_csv(bounds, (dir / "bounds_report.csv").string());

  if (!args.quiet) {
    std::cout << "kept degrees " << res.kept.front() << ".." << res.kept.back() << " ("
              << res.excluded.size() << " excluded), Lelong number at center "
              << res.lelong_at_center() << ", Gram residual " << res.gram_residual << '\n';
    std::cout << (rep.passed ? "PASS" : "FAIL") << " Lelong sandwich report ("
              << rep.rows.size() << " points), lower-bound margin " << rep.fit_margin << '\n';
  }
  return rep.passed ? 0 : 1;
}

int cmd_verify(const CommonArgs& args) {
  VerifyConfig cfg = args.config.empty() ? VerifyConfig{} : load_verify_config(args.config);
  if (args.seed_set) cfg.seed = args.seed;
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_verify_config(cfg), dir);

  VerifyOutcome out = run_verify(cfg);
  std::cout << (out.suite.total_violations == 0 ? "PASS" : "FAIL") << " comparison principle: "
            << out.suite.cases.size() << " randomized pairs, " << out.suite.total_violations
            << " violations\n";
  for (const PrincipleReport& r : out.reports)
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';

  CsvTable t;
  t.columns = {"check_id", "worst", "pass"};
  t.comments = {"check_id 0: comparison principle (worst = violation count over " +
                std::to_string(out.suite.cases.size()) + " randomized pairs)"};
  t.rows.push_back({0.0, static_cast<double>(out.suite.total_violations),
                    out.suite.total_violations == 0 ? 1.0 : 0.0});
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const PrincipleReport& r = out.reports[i];
    t.comments.push_back("check_id " + std::to_string(i + 1) + ": " + r.name);
    t.rows.push_back({static_cast<double>(i + 1), r.worst, r.passed ? 1.0 : 0.0});
  }
  write_csv(t, (dir / "verify_report.csv").string());
  return out.passed ? 0 : 1;
}

int cmd_rescale(const CommonArgs& args) {
  RescaleCompareConfig cfg = load_rescale_config(args.config);
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_rescale_config(cfg), dir);

  RescaleOutcome out = run_rescale_compare(cfg);
  CsvTable t;
  t.comments = {"change of variables: v(z,s) = (At+1) u(z,t), s = ((At+1)-1)/A",
                "PDE identity: dv/ds = A u + du/dt and "
                "log det((At+1) H(u)) = n log(At+1) + log det H(u)",
                "m_cap " + format_g17(cfg.solve.problem.m_cap)};
  t.columns = {"t", "sup_diff"};
  for (std::size_t i = 0; i < out.times.size(); ++i)
    t.rows.push_back({out.times[i], out.diffs[i]});
  write_csv(t, (dir / "rescale_compare.csv").string());

  std::cout << "sup |direct - pulled back| = " << out.sup_diff << " over " << out.times.size()
            << " times\n";
  if (out.tracked) {
    std::cout << "direct bracket [" << out.direct_lo << ", " << out.direct_hi
              << "], mapped bracket [" << out.mapped_lo << ", " << out.mapped_hi
              << "], midpoint gap " << out.bracket_gap << (out.agree ? " (agree)" : " (DISAGREE)")
              << '\n';
    return out.agree ? 0 : 1;
  }
  return 0;
}

int cmd_convergence(const CommonArgs& args) {
  ConvergenceConfig cfg =
      args.config.empty() ? ConvergenceConfig{} : load_convergence_config(args.config);
  const fs::path dir = ensure_outdir(args);
  echo_resolved(args, resolved_convergence_config(cfg), dir);

  std::vector<ConvergenceRow> rows = run_convergence(cfg);
  CsvTable t;
  t.columns = {"resolution", "h", "dt", "sup_error", "rate"};
  for (const ConvergenceRow& r : rows) {
    t.rows.push_back({static_cast<double>(r.resolution), r.h, r.dt, r.sup_error, r.rate});
    if (!args.quiet)
      std::cout << "R = " << r.resolution << "  h = " << r.h << "  sup error = " << r.sup_error
                << (r.rate > 0 ? "  rate = " + format_g17(r.rate) : "") << '\n';
  }
  write_csv(t, (dir / "convergence.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular parabolic Monge-Ampere flow laboratory"};
  app.require_subcommand(1);

  CommonArgs a_solve, a_track, a_dem, a_verify, a_rescale, a_conv;
  CLI::App* c_solve = app.add_subcommand("solve", "run the flow and write snapshots");
  CLI::App* c_track =
      app.add_subcommand("track-singularity", "follow an atom's mass until it resolves");
  CLI::App* c_dem =
      app.add_subcommand("demailly", "Bergman-space approximation of a singular weight");
  CLI::App* c_verify =
      app.add_subcommand("verify", "randomized comparison and structural checks");
  CLI::App* c_rescale =
      app.add_subcommand("rescale-compare", "check the damped flow against its normal form");
  CLI::App* c_conv =
      app.add_subcommand("manufactured-convergence", "grid-refinement study on an exact solution");

  add_common(c_solve, a_solve, true);
  add_common(c_track, a_track, true);
  add_common(c_dem, a_dem, true);
  add_common(c_verify, a_verify, false);
  add_common(c_rescale, a_rescale, true);
  add_common(c_conv, a_conv, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_solve->parsed()) return cmd_solve(a_solve);
    if (c_track->parsed()) return cmd_track(a_track);
    if (c_dem->parsed()) return cmd_demailly(a_dem);
    if (c_verify->parsed()) return cmd_verify(a_verify);
    if (c_rescale->parsed()) return cmd_rescale(a_rescale);
    if (c_conv->parsed()) return cmd_convergence(a_conv);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::ParseError:
      case ErrorCode::InvalidArgument:
        return 2;
      case ErrorCode::VerificationFailed:
        return 1;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
