#pragma once

#include "stdwr/adaptivity.hpp"
#include "stdwr/adjoint.hpp"
#include "stdwr/goal.hpp"
#include "stdwr/newton.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stdwr {

enum class RefinementMode { adaptive, uniform, uniform_space, uniform_time };
RefinementMode parse_refinement_mode(const std::string& name);
std::string to_string(RefinementMode m);

/// Everything a run needs. Text form: one `key = value` per line, `#` starts a comment.
struct Config {
  std::string name = "custom";
  PrimalSettings primal;
  AdjointSettings adjoint;
  GoalKind goal = GoalKind::drag;
  int goal_line_points = 0;  // 0: s_v + 1 of the space at hand
  int goal_cell_points = 0;
  std::optional<double> reference;
  int intervals = 20;
  int max_per_slab = 1;
  int initial_refinements = 0;
  int loops = 1;
  RefinementMode refinement = RefinementMode::adaptive;
  MarkingConfig marking;
  bool estimate = true;
  int study_space_levels = 2;
  int study_time_levels = 2;
  bool write_vtk = false;

  Geometry geometry() const { return primal.inflow.geometry; }
  double end_time() const { return primal.inflow.end_time; }
  Goal make_goal() const { return Goal(goal, end_time(), primal.nu, goal_line_points, goal_cell_points); }

  /// Set one key from its text value; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  void write(std::ostream& os) const;
  static std::vector<std::string> keys();
};

std::vector<std::string> preset_names();
Config preset(const std::string& name);
/// Apply `key = value` lines from a stream on top of `base`.
Config read_config(std::istream& is, Config base = {});
/// Parse `key=value` override strings.
void apply_overrides(Config& cfg, const std::vector<std::string>& overrides);

}  // namespace stdwr
