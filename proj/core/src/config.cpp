#include "pcma/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(ErrorCode::ParseError, "config is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::ParseError, "config root must be a JSON object");
  return j;
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      fail(ErrorCode::ConfigError, "unknown key '" + it.key() + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::ConfigError, where + " is missing '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorCode::ConfigError, where + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(ErrorCode::ConfigError, where + " must be an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(ErrorCode::ConfigError, where + " must be a boolean");
  return j.get<bool>();
}

ExprPtr expr(const json& j, const std::string& where) {
  if (!j.is_string()) fail(ErrorCode::ConfigError, where + " must be an expression string");
  return parse_expression(j.get<std::string>());
}

Point point(const json& j, int n, const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(2 * n))
    fail(ErrorCode::ConfigError, where + " must be an array of " + std::to_string(2 * n) +
                                     " coordinates");
  Point p;
  p.dim = 2 * n;
  for (int i = 0; i < 2 * n; ++i) p.c[static_cast<std::size_t>(i)] = num(j[static_cast<std::size_t>(i)], where);
  return p;
}

DomainSpec parse_domain(const json& j) {
  check_keys(j, "domain", {"n", "radius", "center"});
  DomainSpec d;
  d.n = integer(need(j, "n", "domain"), "domain.n");
  require(d.n == 1 || d.n == 2, ErrorCode::ConfigError, "domain.n must be 1 or 2");
  if (j.contains("radius")) d.radius = num(j["radius"], "domain.radius");
  d.center = d.n == 1 ? make_point1(0, 0) : make_point2(0, 0, 0, 0);
  if (j.contains("center")) d.center = point(j["center"], d.n, "domain.center");
  d.validate();
  return d;
}

NewtonParams parse_newton(const json& j) {
  check_keys(j, "newton", {"tol", "max_iter", "damping", "hessian_floor", "jacobian_reuse"});
  NewtonParams np;
  if (j.contains("tol")) np.tol = num(j["tol"], "newton.tol");
  if (j.contains("max_iter")) np.max_iter = integer(j["max_iter"], "newton.max_iter");
  if (j.contains("damping")) np.damping = num(j["damping"], "newton.damping");
  if (j.contains("hessian_floor"))
    np.hessian_floor = num(j["hessian_floor"], "newton.hessian_floor");
  if (j.contains("jacobian_reuse"))
    np.jacobian_reuse = integer(j["jacobian_reuse"], "newton.jacobian_reuse");
  return np;
}

LelongOptions parse_lelong(const json& j, double* mass_tol) {
  check_keys(j, "tracking", {"atom", "r_min", "r_max", "n_radii", "angular", "mass_tol"});
  LelongOptions lo;
  if (j.contains("r_min")) lo.r_min = num(j["r_min"], "tracking.r_min");
  if (j.contains("r_max")) lo.r_max = num(j["r_max"], "tracking.r_max");
  if (j.contains("n_radii")) lo.n_radii = integer(j["n_radii"], "tracking.n_radii");
  if (j.contains("angular")) lo.angular = integer(j["angular"], "tracking.angular");
  if (mass_tol && j.contains("mass_tol")) *mass_tol = num(j["mass_tol"], "tracking.mass_tol");
  return lo;
}

SolveConfig parse_solve_json(const json& j) {
  check_keys(j, "config",
             {"domain", "A", "T", "f", "phi", "initial", "m_cap", "grid", "schedule", "newton",
              "levels"});
  SolveConfig c;
  c.problem.domain = parse_domain(need(j, "domain", "config"));
  c.problem.A = num(need(j, "A", "config"), "A");
  c.problem.T = num(need(j, "T", "config"), "T");
  if (j.contains("f")) c.problem.f = expr(j["f"], "f");
  c.problem.phi = expr(need(j, "phi", "config"), "phi");
  if (j.contains("m_cap")) c.problem.m_cap = num(j["m_cap"], "m_cap");
  c.problem.u0_singular.m_cap = c.problem.m_cap;

  const json& init = need(j, "initial", "config");
  check_keys(init, "initial", {"smooth", "atoms"});
  if (init.contains("atoms")) {
    const json& atoms = init["atoms"];
    if (!atoms.is_array() || atoms.empty())
      fail(ErrorCode::ConfigError, "initial.atoms must be a nonempty array");
    for (const json& ja : atoms) {
      check_keys(ja, "atom", {"location", "mass"});
      Atom a;
      a.location = point(need(ja, "location", "atom"), c.problem.domain.n, "atom.location");
      a.mass = num(need(ja, "mass", "atom"), "atom.mass");
      c.problem.u0_singular.atoms.push_back(a);
    }
    if (init.contains("smooth"))
      c.problem.u0_singular.smooth = expr(init["smooth"], "initial.smooth");
  } else {
    c.problem.u0_smooth = expr(need(init, "smooth", "initial"), "initial.smooth");
  }

  const json& grid = need(j, "grid", "config");
  check_keys(grid, "grid", {"resolution"});
  c.resolution = integer(need(grid, "resolution", "grid"), "grid.resolution");

  const json& sched = need(j, "schedule", "config");
  check_keys(sched, "schedule", {"dt", "steps", "snapshot_stride"});
  c.schedule.dt = num(need(sched, "dt", "schedule"), "schedule.dt");
  if (sched.contains("steps"))
    c.schedule.steps = integer(sched["steps"], "schedule.steps");
  else
    c.schedule.steps = static_cast<int64_t>(c.problem.T / c.schedule.dt + 1e-9);
  if (sched.contains("snapshot_stride"))
    c.schedule.snapshot_stride = integer(sched["snapshot_stride"], "schedule.snapshot_stride");

  if (j.contains("newton")) c.newton = parse_newton(j["newton"]);
  if (j.contains("levels")) {
    check_keys(j["levels"], "levels", {"k_max", "keep"});
    if (j["levels"].contains("k_max")) c.k_max = integer(j["levels"]["k_max"], "levels.k_max");
    if (j["levels"].contains("keep")) c.keep_levels = boolean(j["levels"]["keep"], "levels.keep");
  }
  c.problem.validate();
  c.schedule.validate(c.problem.T);
  return c;
}

json domain_json(const DomainSpec& d) {
  json c = json::array();
  for (int i = 0; i < 2 * d.n; ++i) c.push_back(d.center.c[static_cast<std::size_t>(i)]);
  return json{{"n", d.n}, {"radius", d.radius}, {"center", c}};
}

json newton_json(const NewtonParams& np) {
  return json{{"tol", np.tol},
              {"max_iter", np.max_iter},
              {"damping", np.damping},
              {"hessian_floor", np.hessian_floor},
              {"jacobian_reuse", np.jacobian_reuse}};
}

json solve_json(const SolveConfig& c) {
  json init;
  if (c.problem.has_atoms()) {
    json atoms = json::array();
    for (const Atom& a : c.problem.u0_singular.atoms) {
      json loc = json::array();
      for (int i = 0; i < c.problem.domain.real_dim(); ++i)
        loc.push_back(a.location.c[static_cast<std::size_t>(i)]);
      atoms.push_back(json{{"location", loc}, {"mass", a.mass}});
    }
    init["atoms"] = atoms;
    if (c.problem.u0_singular.smooth)
      init["smooth"] = c.problem.u0_singular.smooth->to_string();
  } else {
    init["smooth"] = c.problem.u0_smooth ? c.problem.u0_smooth->to_string() : "0";
  }

  json j{{"domain", domain_json(c.problem.domain)},
         {"A", c.problem.A},
         {"T", c.problem.T},
         {"phi", c.problem.phi ? c.problem.phi->to_string() : "0"},
         {"initial", init},
         {"m_cap", c.problem.m_cap},
         {"grid", json{{"resolution", c.resolution}}},
         {"schedule", json{{"dt", c.schedule.dt},
                           {"steps", c.schedule.steps},
                           {"snapshot_stride", c.schedule.snapshot_stride}}},
         {"newton", newton_json(c.newton)},
         {"levels", json{{"k_max", c.k_max}, {"keep", c.keep_levels}}}};
  if (c.problem.f) j["f"] = c.problem.f->to_string();
  return j;
}

json lelong_json(const LelongOptions& lo, double mass_tol, int atom) {
  return json{{"atom", atom},         {"r_min", lo.r_min},   {"r_max", lo.r_max},
              {"n_radii", lo.n_radii}, {"angular", lo.angular}, {"mass_tol", mass_tol}};
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolveConfig parse_solve_config(const std::string& text) {
  return parse_solve_json(parse_json(text));
}

TrackingConfig parse_tracking_config(const std::string& text) {
  json j = parse_json(text);
  TrackingConfig c;
  json solve = j;
  solve.erase("tracking");
  c.solve = parse_solve_json(solve);
  require(c.solve.problem.has_atoms(), ErrorCode::ConfigError,
          "tracking needs singular initial data");
  if (j.contains("tracking")) {
    const json& tj = j["tracking"];
    c.lelong = parse_lelong(tj, &c.mass_tol);
    if (tj.contains("atom")) c.atom = integer(tj["atom"], "tracking.atom");
  }
  require(c.atom >= 0 &&
              c.atom < static_cast<int>(c.solve.problem.u0_singular.atoms.size()),
          ErrorCode::ConfigError, "tracking.atom is out of range");
  return c;
}

DemaillyConfig parse_demailly_config(const std::string& text) {
  json j = parse_json(text);
  check_keys(j, "config", {"domain", "weight", "approximation"});
  DemaillyConfig c;
  c.domain = parse_domain(need(j, "domain", "config"));
  const json& w = need(j, "weight", "config");
  check_keys(w, "weight", {"central_mass", "smooth"});
  if (w.contains("central_mass")) c.weight.central_mass = num(w["central_mass"], "central_mass");
  if (w.contains("smooth")) c.weight.smooth = expr(w["smooth"], "weight.smooth");
  if (j.contains("approximation")) {
    const json& a = j["approximation"];
    check_keys(a, "approximation",
               {"max_degree", "m", "annuli", "radial_points", "angular_points",
                "decay_threshold", "tail_rtol"});
    if (a.contains("max_degree")) c.options.max_degree = integer(a["max_degree"], "max_degree");
    if (a.contains("m")) c.options.m = integer(a["m"], "m");
    if (a.contains("annuli")) c.options.annuli = integer(a["annuli"], "annuli");
    if (a.contains("radial_points"))
      c.options.radial_points = integer(a["radial_points"], "radial_points");
    if (a.contains("angular_points"))
      c.options.angular_points = integer(a["angular_points"], "angular_points");
    if (a.contains("decay_threshold"))
      c.options.decay_threshold = num(a["decay_threshold"], "decay_threshold");
    if (a.contains("tail_rtol")) c.options.tail_rtol = num(a["tail_rtol"], "tail_rtol");
  }
  return c;
}

RescaleCompareConfig parse_rescale_config(const std::string& text) {
  json j = parse_json(text);
  RescaleCompareConfig c;
  json solve = j;
  solve.erase("compare");
  solve.erase("tracking");
  c.solve = parse_solve_json(solve);
  require(c.solve.problem.A > 0, ErrorCode::ConfigError,
          "rescale comparison needs A > 0");
  if (j.contains("compare")) {
    const json& cj = j["compare"];
    check_keys(cj, "compare", {"times", "atom", "stride_tol"});
    if (cj.contains("times")) {
      if (!cj["times"].is_array())
        fail(ErrorCode::ConfigError, "compare.times must be an array");
      for (const json& t : cj["times"]) c.times.push_back(num(t, "compare.times"));
    }
    if (cj.contains("atom")) c.atom = integer(cj["atom"], "compare.atom");
    if (cj.contains("stride_tol")) c.stride_tol = integer(cj["stride_tol"], "compare.stride_tol");
  }
  if (j.contains("tracking")) c.lelong = parse_lelong(j["tracking"], &c.mass_tol);
  if (c.atom >= 0)
    require(c.atom < static_cast<int>(c.solve.problem.u0_singular.atoms.size()),
            ErrorCode::ConfigError, "compare.atom is out of range");
  return c;
}

VerifyConfig parse_verify_config(const std::string& text) {
  json j = parse_json(text);
  check_keys(j, "config", {"comparison", "principles"});
  VerifyConfig c;
  if (j.contains("comparison")) {
    const json& cj = j["comparison"];
    check_keys(cj, "comparison", {"cases", "seed", "resolution", "T", "dt", "tol"});
    if (cj.contains("cases")) c.cases = integer(cj["cases"], "cases");
    if (cj.contains("seed")) c.seed = static_cast<uint64_t>(cj["seed"].get<int64_t>());
    if (cj.contains("resolution")) c.resolution = integer(cj["resolution"], "resolution");
    if (cj.contains("T")) c.T = num(cj["T"], "T");
    if (cj.contains("dt")) c.dt = num(cj["dt"], "dt");
    if (cj.contains("tol")) c.tol = num(cj["tol"], "tol");
  }
  if (j.contains("principles")) {
    const json& pj = j["principles"];
    check_keys(pj, "principles", {"enabled", "resolution", "T", "dt", "slack_scale"});
    if (pj.contains("enabled")) c.principles = boolean(pj["enabled"], "enabled");
    if (pj.contains("resolution"))
      c.principle_resolution = integer(pj["resolution"], "resolution");
    if (pj.contains("T")) c.principle_T = num(pj["T"], "T");
    if (pj.contains("dt")) c.principle_dt = num(pj["dt"], "dt");
    if (pj.contains("slack_scale")) c.slack_scale = num(pj["slack_scale"], "slack_scale");
  }
  return c;
}

ConvergenceConfig parse_convergence_config(const std::string& text) {
  json j = parse_json(text);
  check_keys(j, "config", {"n", "A", "T", "resolutions", "dt_factor", "newton"});
  ConvergenceConfig c;
  if (j.contains("n")) c.n = integer(j["n"], "n");
  if (j.contains("A")) c.A = num(j["A"], "A");
  if (j.contains("T")) c.T = num(j["T"], "T");
  if (j.contains("resolutions")) {
    if (!j["resolutions"].is_array() || j["resolutions"].size() < 2)
      fail(ErrorCode::ConfigError, "resolutions must list at least two grids");
    c.resolutions.clear();
    for (const json& r : j["resolutions"]) c.resolutions.push_back(integer(r, "resolutions"));
  }
  if (j.contains("dt_factor")) c.dt_factor = num(j["dt_factor"], "dt_factor");
  if (j.contains("newton")) c.newton = parse_newton(j["newton"]);
  return c;
}

SolveConfig load_solve_config(const std::string& path) {
  return parse_solve_config(read_text_file(path));
}
TrackingConfig load_tracking_config(const std::string& path) {
  return parse_tracking_config(read_text_file(path));
}
DemaillyConfig load_demailly_config(const std::string& path) {
  return parse_demailly_config(read_text_file(path));
}
RescaleCompareConfig load_rescale_config(const std::string& path) {
  return parse_rescale_config(read_text_file(path));
}
VerifyConfig load_verify_config(const std::string& path) {
  return parse_verify_config(read_text_file(path));
}
ConvergenceConfig load_convergence_config(const std::string& path) {
  return parse_convergence_config(read_text_file(path));
}

std::string resolved_solve_config(const SolveConfig& c) { return solve_json(c).dump(2); }

std::string resolved_tracking_config(const TrackingConfig& c) {
  json j = solve_json(c.solve);
  j["tracking"] = lelong_json(c.lelong, c.mass_tol, c.atom);
  return j.dump(2);
}

std::string resolved_demailly_config(const DemaillyConfig& c) {
  json j{{"domain", domain_json(c.domain)},
         {"weight", json{{"central_mass", c.weight.central_mass}}},
         {"approximation", json{{"max_degree", c.options.max_degree},
                                {"m", c.options.m},
                                {"annuli", c.options.annuli},
                                {"radial_points", c.options.radial_points},
                                {"angular_points", c.options.angular_points},
                                {"decay_threshold", c.options.decay_threshold},
                                {"tail_rtol", c.options.tail_rtol}}}};
  if (c.weight.smooth) j["weight"]["smooth"] = c.weight.smooth->to_string();
  return j.dump(2);
}

std::string resolved_rescale_config(const RescaleCompareConfig& c) {
  json j = solve_json(c.solve);
  j["compare"] = json{{"times", c.times}, {"atom", c.atom}, {"stride_tol", c.stride_tol}};
  if (c.atom >= 0) j["tracking"] = lelong_json(c.lelong, c.mass_tol, c.atom);
  return j.dump(2);
}

std::string resolved_verify_config(const VerifyConfig& c) {
  json j{{"comparison", json{{"cases", c.cases},
                             {"seed", c.seed},
                             {"resolution", c.resolution},
                             {"T", c.T},
                             {"dt", c.dt},
                             {"tol", c.tol}}},
         {"principles", json{{"enabled", c.principles},
                             {"resolution", c.principle_resolution},
                             {"T", c.principle_T},
                             {"dt", c.principle_dt},
                             {"slack_scale", c.slack_scale}}}};
  return j.dump(2);
}

std::string resolved_convergence_config(const ConvergenceConfig& c) {
  json j{{"n", c.n},
         {"A", c.A},
         {"T", c.T},
         {"resolutions", c.resolutions},
         {"dt_factor", c.dt_factor},
         {"newton", newton_json(c.newton)}};
  return j.dump(2);
}

}  // namespace pcma
