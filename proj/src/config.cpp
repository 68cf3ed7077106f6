#include "fsi/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

double parse_double(const std::string& value, int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError("expected a number, got '" + value + "'", line);
  return x;
}

int parse_int(const std::string& value, int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const long x = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ParseError("expected an integer, got '" + value + "'", line);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("expected true or false, got '" + value + "'", line);
}

struct Assignment {
  std::string key, value;
  int line;
};

std::vector<Assignment> tokenize(const std::string& text) {
  std::vector<Assignment> out;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", line_no);
    Assignment a;
    a.key = trim(line.substr(0, eq));
    a.value = trim(line.substr(eq + 1));
    a.line = line_no;
    if (a.key.empty()) throw ParseError("missing key before '='", line_no);
    if (a.value.empty()) throw ParseError("missing value for '" + a.key + "'", line_no);
    out.push_back(std::move(a));
  }
  return out;
}

void apply_assignment(RunConfig& cfg, const Assignment& a) {
  const std::string& v = a.value;
  const int ln = a.line;
  using Handler = std::function<void()>;
  const std::map<std::string, Handler> handlers = {
      {"box_x0", [&] { cfg.geometry.box.lo.x() = parse_double(v, ln); }},
      {"box_y0", [&] { cfg.geometry.box.lo.y() = parse_double(v, ln); }},
      {"box_x1", [&] { cfg.geometry.box.hi.x() = parse_double(v, ln); }},
      {"box_y1", [&] { cfg.geometry.box.hi.y() = parse_double(v, ln); }},
      {"disk_cx", [&] { cfg.geometry.disk_center.x() = parse_double(v, ln); }},
      {"disk_cy", [&] { cfg.geometry.disk_center.y() = parse_double(v, ln); }},
      {"radius",
       [&] {
         cfg.geometry.disk_radius = parse_double(v, ln);
         cfg.rigid.radius = cfg.geometry.disk_radius;
       }},
      {"h", [&] { cfg.geometry.target_h = parse_double(v, ln); }},
      {"rho", [&] { cfg.fluid.rho = parse_double(v, ln); }},
      {"mu", [&] { cfg.fluid.mu = parse_double(v, ln); }},
      {"picard_tol", [&] { cfg.fluid.picard_tol = parse_double(v, ln); }},
      {"picard_max_iters", [&] { cfg.fluid.picard_max_iters = parse_int(v, ln); }},
      {"antisymmetrize", [&] { cfg.fluid.antisymmetrize = parse_bool(v, ln); }},
      {"rho_body", [&] { cfg.rigid.rho_body = parse_double(v, ln); }},
      {"gx", [&] { cfg.rigid.gravity.x() = parse_double(v, ln); }},
      {"gy", [&] { cfg.rigid.gravity.y() = parse_double(v, ln); }},
      {"schedule",
       [&] {
         if (v == "global")
           cfg.iter.schedule = Schedule::Global;
         else if (v == "per_timestep")
           cfg.iter.schedule = Schedule::PerTimestep;
         else
           throw InconsistentConfig("unknown schedule '" + v + "'");
       }},
      {"k_max", [&] { cfg.iter.k_max = parse_int(v, ln); }},
      {"trajectory_tol", [&] { cfg.iter.trajectory_tol = parse_double(v, ln); }},
      {"force_method",
       [&] {
         if (v == "boundary")
           cfg.iter.force_method = ForceMethod::Boundary;
         else if (v == "bulk")
           cfg.iter.force_method = ForceMethod::Bulk;
         else
           throw InconsistentConfig("unknown force_method '" + v + "'");
       }},
      {"collision_fraction", [&] { cfg.iter.collision_fraction = parse_double(v, ln); }},
      {"tau", [&] { cfg.iter.tau = parse_double(v, ln); }},
      {"t_end", [&] { cfg.iter.t_end = parse_double(v, ln); }},
      {"exact_boundary_motion", [&] { cfg.iter.exact_boundary_motion = parse_bool(v, ln); }},
      {"extension",
       [&] {
         if (v == "harmonic")
           cfg.iter.extension = ExtensionKind::Harmonic;
         else if (v == "stokes")
           cfg.iter.extension = ExtensionKind::Stokes;
         else
           throw InconsistentConfig("unknown extension '" + v + "'");
       }},
      {"snapshot_stride", [&] { cfg.iter.snapshot_stride = parse_int(v, ln); }},
      {"out_dir", [&] { cfg.out_dir = v; }},
  };
  const auto it = handlers.find(a.key);
  if (it == handlers.end()) throw ParseError("unknown key '" + a.key + "'", ln);
  it->second();
}

void validate(const RunConfig& cfg) {
  if (cfg.geometry.box.width() <= 0.0 || cfg.geometry.box.height() <= 0.0)
    throw InconsistentConfig("box must have positive extent");
  if (cfg.geometry.disk_radius <= 0.0) throw InconsistentConfig("radius must be positive");
  if (cfg.geometry.target_h <= 0.0) throw InconsistentConfig("h must be positive");
  if (cfg.fluid.rho <= 0.0) throw InconsistentConfig("rho must be positive");
  if (cfg.fluid.mu <= 0.0) throw InconsistentConfig("mu must be positive");
  if (cfg.fluid.picard_tol <= 0.0) throw InconsistentConfig("picard_tol must be positive");
  if (cfg.fluid.picard_max_iters < 1)
    throw InconsistentConfig("picard_max_iters must be at least 1");
  if (cfg.rigid.rho_body <= 0.0) throw InconsistentConfig("rho_body must be positive");
  if (cfg.iter.k_max < 1) throw InconsistentConfig("k_max must be at least 1");
  if (cfg.iter.collision_fraction <= 0.0 || cfg.iter.collision_fraction >= 1.0)
    throw InconsistentConfig("collision_fraction must lie strictly between 0 and 1");
  if (cfg.iter.snapshot_stride < 0)
    throw InconsistentConfig("snapshot_stride must be nonnegative");
  cfg.iter.n_steps();  // throws unless t_end is a positive integer multiple of tau
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  if (name == "heavy_ball") {
    cfg.rigid.rho_body = 200.0 / std::numbers::pi;
    cfg.iter.tau = 5e-4;
    cfg.iter.t_end = 0.1;
    cfg.iter.k_max = 5;
  } else if (name == "light_ball") {
    cfg.rigid.rho_body = 10.0 / std::numbers::pi;
    cfg.iter.tau = 5e-4;
    cfg.iter.t_end = 0.05;
    cfg.iter.k_max = 10;
  } else if (name == "refined") {
    cfg.rigid.rho_body = 200.0 / std::numbers::pi;
    cfg.iter.tau = 2.5e-5;
    cfg.iter.t_end = 0.1;
    cfg.iter.k_max = 5;
    cfg.geometry.target_h = 4.879e-2;
  } else {
    throw InconsistentConfig("unknown preset '" + name + "'");
  }
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  const auto assignments = tokenize(text);
  RunConfig cfg;
  for (const Assignment& a : assignments) {
    if (a.key != "preset") continue;
    cfg = preset_config(a.value);
  }
  for (const Assignment& a : assignments) {
    if (a.key == "preset") continue;
    apply_assignment(cfg, a);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RigidState initial_state(const RunConfig& cfg) {
  RigidState s;
  s.q = cfg.geometry.disk_center;
  return s;
}

IterationHistory run_simulation(const RunConfig& cfg) {
  const RigidState s0 = initial_state(cfg);
  if (cfg.iter.schedule == Schedule::PerTimestep)
    return run_per_timestep(s0, cfg.geometry, cfg.fluid, cfg.rigid, cfg.iter);
  const RigidTrajectory guess =
      initial_guess_freefall(s0, cfg.rigid.gravity, cfg.iter.tau, cfg.iter.n_steps());
  return run_global(guess, cfg.geometry, cfg.fluid, cfg.rigid, cfg.iter);
}

}  // namespace fsi
