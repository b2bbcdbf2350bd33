#include "stdwr/config.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stdwr {

RefinementMode parse_refinement_mode(const std::string& name) {
  if (name == "adaptive") return RefinementMode::adaptive;
  if (name == "uniform") return RefinementMode::uniform;
  if (name == "uniform_space") return RefinementMode::uniform_space;
  if (name == "uniform_time") return RefinementMode::uniform_time;
  throw std::invalid_argument("unknown refinement mode: " + name);
}

std::string to_string(RefinementMode m) {
  switch (m) {
    case RefinementMode::adaptive: return "adaptive";
    case RefinementMode::uniform: return "uniform";
    case RefinementMode::uniform_space: return "uniform_space";
    case RefinementMode::uniform_time: return "uniform_time";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw std::invalid_argument(key + ": not a number: " + v);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw std::invalid_argument(key + ": not an integer: " + v);
  return int(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: " + v);
}

}  // namespace

std::vector<std::string> Config::keys() {
  return {"name", "equation", "geometry", "nu", "end_time", "inflow_profile", "intervals", "max_per_slab",
          "initial_refinements", "support_points", "primal.velocity_degree", "primal.temporal_degree",
          "primal.quadrature", "adjoint.velocity_degree", "adjoint.pressure_degree", "adjoint.temporal_degree", "adjoint.quadrature", "goal", "goal.line_points", "goal.cell_points",
          "reference", "loops", "refinement", "estimate", "projection", "initial_guess", "newton.tolerance",
          "newton.max_iterations", "newton.max_line_search", "newton.damping", "newton.theta_max", "marking.c",
          "marking.space", "marking.alpha", "marking.space_rate", "marking.time_rate", "marking.time_score",
          "study.space_levels", "study.time_levels", "output.vtk"};
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "name") name = v;
  else if (key == "equation") primal.equation = parse_equation(v);
  else if (key == "geometry") primal.inflow.geometry = parse_geometry(v);
  else if (key == "nu") primal.nu = to_double(key, v);
  else if (key == "end_time") primal.inflow.end_time = to_double(key, v);
  else if (key == "inflow_profile") primal.inflow.profile = parse_time_profile(v);
  else if (key == "intervals") intervals = to_int(key, v);
  else if (key == "max_per_slab") max_per_slab = to_int(key, v);
  else if (key == "initial_refinements") initial_refinements = to_int(key, v);
  else if (key == "support_points") primal.family = parse_support_family(v);
  else if (key == "primal.velocity_degree") primal.velocity_degree = to_int(key, v);
  else if (key == "primal.temporal_degree") primal.temporal_degree = to_int(key, v);
  else if (key == "primal.quadrature") primal.quadrature = to_int(key, v);
  else if (key == "adjoint.velocity_degree") adjoint.velocity_degree = to_int(key, v);
  else if (key == "adjoint.pressure_degree") adjoint.pressure_degree = to_int(key, v);
  else if (key == "adjoint.temporal_degree") adjoint.temporal_degree = to_int(key, v);
  else if (key == "adjoint.quadrature") adjoint.quadrature = to_int(key, v);
  else if (key == "goal") goal = parse_goal(v);
  else if (key == "goal.line_points") goal_line_points = to_int(key, v);
  else if (key == "goal.cell_points") goal_cell_points = to_int(key, v);
  else if (key == "reference") reference = (v == "none" || v.empty()) ? std::nullopt : std::optional(to_double(key, v));
  else if (key == "loops") loops = to_int(key, v);
  else if (key == "refinement") refinement = parse_refinement_mode(v);
  else if (key == "estimate") estimate = to_bool(key, v);
  else if (key == "projection") primal.projection = parse_projection(v);
  else if (key == "initial_guess") primal.guess = parse_initial_guess(v);
  else if (key == "newton.tolerance") primal.newton.tolerance = to_double(key, v);
  else if (key == "newton.max_iterations") primal.newton.max_iterations = to_int(key, v);
  else if (key == "newton.max_line_search") primal.newton.max_line_search = to_int(key, v);
  else if (key == "newton.damping") primal.newton.damping = to_double(key, v);
  else if (key == "newton.theta_max") primal.newton.theta_max = to_double(key, v);
  else if (key == "marking.c") marking.equilibration = to_double(key, v);
  else if (key == "marking.space") marking.space = parse_space_marking(v);
  else if (key == "marking.alpha") marking.alpha = to_double(key, v);
  else if (key == "marking.space_rate") marking.space_rate = to_double(key, v);
  else if (key == "marking.time_rate") marking.time_rate = to_double(key, v);
  else if (key == "marking.time_score") marking.score = parse_time_score(v);
  else if (key == "study.space_levels") study_space_levels = to_int(key, v);
  else if (key == "study.time_levels") study_time_levels = to_int(key, v);
  else if (key == "output.vtk") write_vtk = to_bool(key, v);
  else throw std::invalid_argument("unknown config key: " + key);
}

void Config::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid config: " + m); };
  if (primal.nu <= 0) fail("nu must be positive");
  if (end_time() <= 0) fail("end_time must be positive");
  if (intervals < 1) fail("intervals must be >= 1");
  if (max_per_slab < 1) fail("max_per_slab must be >= 1");
  if (initial_refinements < 0) fail("initial_refinements must be >= 0");
  if (loops < 1) fail("loops must be >= 1");
  if (primal.velocity_degree < 2) fail("primal.velocity_degree must be >= 2");
  if (primal.temporal_degree < 0) fail("primal.temporal_degree must be >= 0");
  if (primal.family == SupportFamily::gauss_lobatto && primal.temporal_degree < 1)
    fail("Gauss-Lobatto support needs temporal degree >= 1");
  if (adjoint.velocity_degree <= primal.velocity_degree) fail("adjoint.velocity_degree must exceed the primal one");
  if (adjoint.pressure_degree < primal.velocity_degree - 1 || adjoint.pressure_degree >= adjoint.velocity_degree)
    fail("adjoint.pressure_degree must contain the primal pressure and stay below adjoint.velocity_degree");
  if (adjoint.temporal_degree <= primal.temporal_degree) fail("adjoint.temporal_degree must exceed the primal one");
  if (primal.quadrature < 1 || adjoint.quadrature < 1) fail("quadrature must be >= 1");
  if (goal_line_points < 0 || goal_cell_points < 0) fail("goal quadrature must be >= 0");
  if ((goal == GoalKind::drag || goal == GoalKind::lift) && geometry() != Geometry::cylinder2d3)
    fail("drag and lift need the cylinder geometry");
  if (primal.newton.damping <= 0 || primal.newton.damping > 1) fail("newton.damping must lie in (0,1]");
  if (primal.newton.max_iterations < 1 || primal.newton.max_line_search < 1) fail("newton counts must be >= 1");
  if (marking.equilibration <= 0) fail("marking.c must be positive");
  if (marking.alpha <= 0) fail("marking.alpha must be positive");
  if (marking.time_rate <= 0 || marking.time_rate > 100) fail("marking.time_rate must lie in (0,100]");
  if (marking.space_rate <= 0 || marking.space_rate > 100) fail("marking.space_rate must lie in (0,100]");
}

void Config::write(std::ostream& os) const {
  os.precision(17);
  os << "name = " << name << "\n"
     << "equation = " << to_string(primal.equation) << "\n"
     << "geometry = " << to_string(geometry()) << "\n"
     << "nu = " << primal.nu << "\n"
     << "end_time = " << end_time() << "\n"
     << "inflow_profile = " << to_string(primal.inflow.profile) << "\n"
     << "intervals = " << intervals << "\n"
     << "max_per_slab = " << max_per_slab << "\n"
     << "initial_refinements = " << initial_refinements << "\n"
     << "support_points = " << to_string(primal.family) << "\n"
     << "primal.velocity_degree = " << primal.velocity_degree << "\n"
     << "primal.temporal_degree = " << primal.temporal_degree << "\n"
     << "primal.quadrature = " << primal.quadrature << "\n"
     << "adjoint.velocity_degree = " << adjoint.velocity_degree << "\n"
     << "adjoint.pressure_degree = " << adjoint.pressure_degree << "\n"
     << "adjoint.temporal_degree = " << adjoint.temporal_degree << "\n"
     << "adjoint.quadrature = " << adjoint.quadrature << "\n"
     << "goal = " << to_string(goal) << "\n"
     << "goal.line_points = " << goal_line_points << "\n"
     << "goal.cell_points = " << goal_cell_points << "\n"
     << "reference = ";
  if (reference)
    os << *reference;
  else
    os << "none";
  os << "\n"
     << "loops = " << loops << "\n"
     << "refinement = " << to_string(refinement) << "\n"
     << "estimate = " << (estimate ? "true" : "false") << "\n"
     << "projection = " << to_string(primal.projection) << "\n"
     << "initial_guess = " << to_string(primal.guess) << "\n"
     << "newton.tolerance = " << primal.newton.tolerance << "\n"
     << "newton.max_iterations = " << primal.newton.max_iterations << "\n"
     << "newton.max_line_search = " << primal.newton.max_line_search << "\n"
     << "newton.damping = " << primal.newton.damping << "\n"
     << "newton.theta_max = " << primal.newton.theta_max << "\n"
     << "marking.c = " << marking.equilibration << "\n"
     << "marking.space = " << to_string(marking.space) << "\n"
     << "marking.alpha = " << marking.alpha << "\n"
     << "marking.space_rate = " << marking.space_rate << "\n"
     << "marking.time_rate = " << marking.time_rate << "\n"
     << "marking.time_score = " << to_string(marking.score) << "\n"
     << "study.space_levels = " << study_space_levels << "\n"
     << "study.time_levels = " << study_time_levels << "\n"
     << "output.vtk = " << (write_vtk ? "true" : "false") << "\n";
}

std::vector<std::string> preset_names() { return {"stokes-2d3", "nse-2d3", "bfs-vorticity"}; }

Config preset(const std::string& name) {
  Config c;
  c.name = name;
  if (name == "stokes-2d3" || name == "nse-2d3") {
    c.primal.equation = name == "stokes-2d3" ? Equation::stokes : Equation::navier_stokes;
    c.primal.inflow = {Geometry::cylinder2d3, TimeProfile::sine, 8.0};
    c.primal.nu = 1e-3;
    c.goal = GoalKind::drag;
    c.reference = name == "stokes-2d3" ? 0.40284197485629031 : 1.6031368118815639;
    c.intervals = 20;
    c.marking.space = SpaceMarking::averaging;
    c.marking.alpha = 1.1;
    c.marking.time_rate = 75;
    c.loops = 3;
    return c;
  }
  if (name == "bfs-vorticity") {
    c.primal.equation = Equation::navier_stokes;
    c.primal.inflow = {Geometry::backward_step, TimeProfile::sine, 8.0};
    c.primal.nu = 1.0;
    c.goal = GoalKind::vorticity;
    c.reference = 513.84343972465513;
    c.intervals = 40;
    c.initial_refinements = 2;
    c.marking.space = SpaceMarking::fixed_rate;
    c.marking.space_rate = 30;
    c.marking.time_rate = 30;
    c.loops = 3;
    return c;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

Config read_config(std::istream& is, Config base) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

void apply_overrides(Config& cfg, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override without '=': " + o);
    cfg.set(trim(o.substr(0, eq)), o.substr(eq + 1));
  }
}

}  // namespace stdwr
