#include "config.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>

namespace riddled::cli {

using nlohmann::json;

namespace {

/// Reads fields from one JSON object and remembers which keys were used, so
/// that leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  /// Sub-object, or nullptr when absent.
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

StepMode parse_mode(const std::string& s) {
  if (s == "adaptive") return StepMode::Adaptive;
  if (s == "fixed") return StepMode::Fixed;
  throw ConfigError("step.mode: expected 'adaptive' or 'fixed', got '" + s + "'");
}

RhoTheta parse_rho(const std::string& s) {
  if (s == "isotropic") return RhoTheta::Isotropic;
  if (s == "prepared") return RhoTheta::Prepared;
  if (s == "superposition") return RhoTheta::Superposition;
  throw ConfigError("rho_theta: expected isotropic, prepared or superposition, got '" + s + "'");
}

const char* rho_name(RhoTheta r) {
  switch (r) {
    case RhoTheta::Isotropic: return "isotropic";
    case RhoTheta::Prepared: return "prepared";
    case RhoTheta::Superposition: return "superposition";
  }
  return "isotropic";
}

AngleSpec angle_from_pi_fraction(long long num, long long den) {
  AngleSpec a;
  a.angle = Angle::pi_fraction(num, den);
  if (num == 0) a.text = "0";
  else a.text = (num == 1 ? "" : num == -1 ? "-" : std::to_string(num)) + "pi" + (den == 1 ? "" : "/" + std::to_string(den));
  return a;
}

std::vector<AngleSpec> parse_angles(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of angles");
  std::vector<AngleSpec> out;
  for (const auto& a : j) {
    try {
      out.push_back(parse_angle(a));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return out;
}

json angles_json(const std::vector<AngleSpec>& angles) {
  json out = json::array();
  for (const auto& a : angles) out.push_back(a.text);
  return out;
}

void parse_grid(const json& j, const std::string& where, GridSpec& g) {
  Fields f(j, where);
  f.get("x_min", g.x_min);
  f.get("x_max", g.x_max);
  f.get("nx", g.nx);
  f.get("y_min", g.y_min);
  f.get("y_max", g.y_max);
  f.get("ny", g.ny);
  f.get("centered", g.centered);
  f.finish();
}

json grid_json(const GridSpec& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx},         {"y_min", g.y_min},
          {"y_max", g.y_max}, {"ny", g.ny},       {"centered", g.centered}};
}

void parse_ensemble(const json& j, const std::string& where, EnsembleConfig& e) {
  Fields f(j, where);
  std::string rho = rho_name(e.rho_theta);
  f.get("rho_theta", rho);
  e.rho_theta = parse_rho(rho);
  if (const json* phi = f.child("phi")) e.phi = parse_angle(*phi);
  if (const json* t0 = f.child("theta0")) e.theta0 = parse_angle(*t0);
  f.get("n", e.n);
  f.get("burn_in", e.burn_in);
  f.finish();
}

json ensemble_json(const EnsembleConfig& e) {
  return {{"rho_theta", rho_name(e.rho_theta)},
          {"phi", e.phi.text},
          {"theta0", e.theta0.text},
          {"n", e.n},
          {"burn_in", e.burn_in}};
}

}  // namespace

AngleSpec parse_angle(const json& j) {
  AngleSpec a;
  if (j.is_number()) {
    const double r = j.get<double>();
    if (!std::isfinite(r)) throw ConfigError("angle is not finite");
    a.angle = Angle::from_radians(r);
    a.text = j.dump();
    return a;
  }
  if (!j.is_string()) throw ConfigError("angle must be a number (radians) or a string like \"3pi/8\"");
  const std::string s = j.get<std::string>();
  static const std::regex re(R"(^\s*([+-]?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$)");
  static const std::regex zero(R"(^\s*[+-]?0+\s*$)");
  std::smatch m;
  if (std::regex_match(s, zero)) {
    a.text = "0";
    return a;
  }
  if (!std::regex_match(s, m, re)) throw ConfigError("cannot parse angle '" + s + "'");
  long long num = 1;
  const std::string k = m[1].str();
  if (k == "-") num = -1;
  else if (!k.empty() && k != "+") num = std::stoll(k);
  const long long den = m[2].matched ? std::stoll(m[2].str()) : 1;
  if (den < 1 || den > (1LL << 31)) throw ConfigError("angle denominator out of range in '" + s + "'");
  a.angle = Angle::pi_fraction(num, den);
  a.text = s;
  return a;
}

EnsembleSpec EnsembleConfig::spec() const {
  EnsembleSpec s;
  s.rho_theta = rho_theta;
  s.phi = phi.angle;
  s.theta0 = theta0.angle;
  s.n = n;
  s.burn_in = burn_in;
  return s;
}

SpinContext RunConfig::spin_context() const {
  SpinContext ctx;
  ctx.params = system;
  ctx.control = control();
  ctx.criterion = capture;
  ctx.warp = WarpModel::analytic(spin.warp.eta);
  return ctx;
}

void RunConfig::validate() const {
  try {
    system.validate();
    control().validate();
    capture.validate();
    if (tol_index < 1) throw ConfigError("tol_index must be >= 1");
    if (duffing.sections < 1) throw ConfigError("duffing.sections must be >= 1");
    auto g = basin_grid.grid;
    g.criterion = capture;
    g.validate();
    if (tol_scan.x_points < 1 || tol_scan.n_max < 2) throw ConfigError("tol_scan needs x_points >= 1, n_max >= 2");
    if (fraction.samples < 1 || fraction.n_y < 1) throw ConfigError("fraction needs samples >= 1, n_y >= 1");
    if (fraction.sampling != "line" && fraction.sampling != "attractor")
      throw ConfigError("fraction.sampling must be 'line' or 'attractor'");
    if (!(fraction.y_min > 0.0 && fraction.y_max >= fraction.y_min && fraction.y_max < kPi))
      throw ConfigError("fraction needs 0 < y_min <= y_max < pi");
    if (!(fraction.lyapunov.window_periods > 0.0) || fraction.lyapunov.n_windows < 2)
      throw ConfigError("fraction.lyapunov needs window_periods > 0, n_windows >= 2");
    if (!(spin.warp.eta > 0.0)) throw ConfigError("spin.warp.eta must be positive");
    spin.ensemble.spec().validate();
    bell.ensemble.spec().validate();
    auto sg = spin.grid;
    sg.criterion = capture;
    sg.validate();
    if (spin.angles.empty()) throw ConfigError("spin.angles must not be empty");
    if (bell.angles.empty() || bell.angles.front().angle != Angle{})
      throw ConfigError("bell.angles must start with 0");
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfig default_config() {
  RunConfig c;
  c.basin_grid.grid = GridSpec{};
  c.basin_grid.grid.nx = 100;
  c.basin_grid.grid.ny = 100;
  c.basin_grid.grid.centered = true;
  for (long long k = 1; k < 16; k += 2) c.spin.angles.push_back(angle_from_pi_fraction(k, 8));
  c.spin.ensemble.rho_theta = RhoTheta::Prepared;
  c.spin.ensemble.n = 500;
  c.spin.ensemble.phi = angle_from_pi_fraction(0, 1);
  c.spin.ensemble.theta0 = angle_from_pi_fraction(0, 1);
  c.spin.grid.nx = 50;
  c.spin.grid.ny = 50;
  c.spin.grid.y_min = 0.0;
  c.spin.grid.y_max = kPi;
  c.bell.ensemble.n = 200;
  c.bell.ensemble.phi = angle_from_pi_fraction(0, 1);
  c.bell.ensemble.theta0 = angle_from_pi_fraction(0, 1);
  for (long long k = 0; k <= 12; ++k) c.bell.angles.push_back(angle_from_pi_fraction(k, 12));
  return c;
}

RunConfig parse_config(const json& j) {
  RunConfig c = default_config();
  Fields f(j, "config");
  f.get("seed", c.seed);
  if (const json* t = f.child("threads")) {
    if (!t->is_number_unsigned()) throw ConfigError("config.threads: expected a non-negative integer");
    c.threads = t->get<unsigned>();
  }
  if (const json* o = f.child("output_dir")) {
    if (!o->is_string()) throw ConfigError("config.output_dir: expected a string");
    c.output_dir = o->get<std::string>();
  }
  f.get("tol_index", c.tol_index);

  if (const json* s = f.child("system")) {
    Fields g(*s, "system");
    g.get("gamma", c.system.gamma);
    g.get("p", c.system.p);
    g.get("omega", c.system.omega);
    g.get("epsilon", c.system.epsilon);
    g.get("xbar", c.system.xbar);
    g.finish();
  }
  if (const json* s = f.child("step")) {
    Fields g(*s, "step");
    std::string mode = c.step.mode == StepMode::Adaptive ? "adaptive" : "fixed";
    g.get("mode", mode);
    c.step.mode = parse_mode(mode);
    g.get("tol0", c.step.tol0);
    g.get("h_init", c.step.h_init);
    g.get("h_min", c.step.h_min);
    g.get("h_max", c.step.h_max);
    g.get("t_max_periods", c.step.t_max);
    g.finish();
  }
  if (const json* s = f.child("capture")) {
    Fields g(*s, "capture");
    g.get("delta_y", c.capture.delta_y);
    g.get("delta_v", c.capture.delta_v);
    g.get("k_sections", c.capture.k_sections);
    g.get("t_max_periods", c.capture.t_max_periods);
    g.get("relative_delta", c.capture.relative_delta);
    g.get("min_delta_y", c.capture.min_delta_y);
    g.finish();
  }
  if (const json* s = f.child("duffing")) {
    Fields g(*s, "duffing");
    g.get("sections", c.duffing.sections);
    g.get("burn_in", c.duffing.burn_in);
    g.finish();
  }
  if (const json* s = f.child("basin_grid")) parse_grid(*s, "basin_grid", c.basin_grid.grid);
  if (const json* s = f.child("tol_scan")) {
    Fields g(*s, "tol_scan");
    g.get("x_points", c.tol_scan.x_points);
    g.get("y0", c.tol_scan.y0);
    g.get("n_max", c.tol_scan.n_max);
    g.finish();
  }
  if (const json* s = f.child("fraction")) {
    Fields g(*s, "fraction");
    g.get("samples", c.fraction.samples);
    g.get("sampling", c.fraction.sampling);
    g.get("burn_in", c.fraction.burn_in);
    g.get("y_min", c.fraction.y_min);
    g.get("y_max", c.fraction.y_max);
    g.get("n_y", c.fraction.n_y);
    if (const json* l = g.child("lyapunov")) {
      Fields h(*l, "fraction.lyapunov");
      h.get("enabled", c.fraction.lyapunov.enabled);
      h.get("window_periods", c.fraction.lyapunov.window_periods);
      h.get("n_windows", c.fraction.lyapunov.n_windows);
      h.get("burn_in", c.fraction.lyapunov.burn_in);
      h.finish();
    }
    g.finish();
  }
  if (const json* s = f.child("spin")) {
    Fields g(*s, "spin");
    if (const json* e = g.child("ensemble")) parse_ensemble(*e, "spin.ensemble", c.spin.ensemble);
    if (const json* a = g.child("angles")) c.spin.angles = parse_angles(*a, "spin.angles");
    if (const json* w = g.child("warp")) {
      Fields h(*w, "spin.warp");
      h.get("eta", c.spin.warp.eta);
      h.finish();
    }
    if (const json* gr = g.child("grid")) parse_grid(*gr, "spin.grid", c.spin.grid);
    g.finish();
  }
  if (const json* s = f.child("bell")) {
    Fields g(*s, "bell");
    if (const json* e = g.child("ensemble")) parse_ensemble(*e, "bell.ensemble", c.bell.ensemble);
    if (const json* a = g.child("angles")) c.bell.angles = parse_angles(*a, "bell.angles");
    g.finish();
  }
  f.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["tol_index"] = c.tol_index;
  j["system"] = {{"gamma", c.system.gamma},
                 {"p", c.system.p},
                 {"omega", c.system.omega},
                 {"epsilon", c.system.epsilon},
                 {"xbar", c.system.xbar}};
  j["step"] = {{"mode", c.step.mode == StepMode::Adaptive ? "adaptive" : "fixed"},
               {"tol0", c.step.tol0},
               {"h_init", c.step.h_init},
               {"h_min", c.step.h_min},
               {"h_max", c.step.h_max},
               {"t_max_periods", c.step.t_max}};
  j["capture"] = {{"delta_y", c.capture.delta_y},
                  {"delta_v", c.capture.delta_v},
                  {"k_sections", c.capture.k_sections},
                  {"t_max_periods", c.capture.t_max_periods},
                  {"relative_delta", c.capture.relative_delta},
                  {"min_delta_y", c.capture.min_delta_y}};
  j["duffing"] = {{"sections", c.duffing.sections}, {"burn_in", c.duffing.burn_in}};
  j["basin_grid"] = grid_json(c.basin_grid.grid);
  j["tol_scan"] = {{"x_points", c.tol_scan.x_points}, {"y0", c.tol_scan.y0}, {"n_max", c.tol_scan.n_max}};
  j["fraction"] = {{"samples", c.fraction.samples},
                   {"sampling", c.fraction.sampling},
                   {"burn_in", c.fraction.burn_in},
                   {"y_min", c.fraction.y_min},
                   {"y_max", c.fraction.y_max},
                   {"n_y", c.fraction.n_y},
                   {"lyapunov",
                    {{"enabled", c.fraction.lyapunov.enabled},
                     {"window_periods", c.fraction.lyapunov.window_periods},
                     {"n_windows", c.fraction.lyapunov.n_windows},
                     {"burn_in", c.fraction.lyapunov.burn_in}}}};
  j["spin"] = {{"ensemble", ensemble_json(c.spin.ensemble)},
               {"angles", angles_json(c.spin.angles)},
               {"warp", {{"eta", c.spin.warp.eta}}},
               {"grid", grid_json(c.spin.grid)}};
  j["bell"] = {{"ensemble", ensemble_json(c.bell.ensemble)}, {"angles", angles_json(c.bell.angles)}};
  return j;
}

}  // namespace riddled::cli
