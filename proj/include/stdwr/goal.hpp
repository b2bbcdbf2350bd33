#pragma once

#include "stdwr/taylor_hood.hpp"

#include <Eigen/Sparse>

#include <deque>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace stdwr {

enum class GoalKind { drag, lift, vorticity, none };
GoalKind parse_goal(const std::string& name);
std::string to_string(GoalKind g);

/// Time-averaged goal functionals: mean drag / lift (20/T) int int sigma n . e over the circle,
/// mean squared vorticity (1/T) int int curl(v)^2.
class Goal {
 public:
  /// `line_points` / `cell_points` = 0 picks s_v + 1 from the space.
  Goal(GoalKind kind, double end_time, double nu, int line_points = 0, int cell_points = 0);

  GoalKind kind() const { return kind_; }
  bool linear() const { return kind_ != GoalKind::vorticity; }
  double end_time() const { return end_time_; }
  double viscosity() const { return nu_; }

  /// Contribution of one slab.
  double evaluate(const SpaceTimeVector& u) const;
  /// Full-space vector g with J'(u)(d) = g . d for every full space-time vector d of the slab.
  Eigen::VectorXd derivative(const SpaceTimeVector& u) const;

  /// Instantaneous coefficients at a spatial state: drag/lift coefficients c_D, c_L or curl^2 integral.
  using SpacePtr = std::shared_ptr<const TaylorHoodSpace>;
  double drag_coefficient(const SpacePtr& space, const Eigen::VectorXd& full) const;
  double lift_coefficient(const SpacePtr& space, const Eigen::VectorXd& full) const;
  double vorticity_integral(const SpacePtr& space, const Eigen::VectorXd& full) const;

  /// Boundary force functional of direction `component` (0: x, 1: y) scaled by 20.
  const Eigen::VectorXd& force_vector(const SpacePtr& space, int component) const;
  /// Curl-curl matrix on the full space.
  const Eigen::SparseMatrix<double>& vorticity_matrix(const SpacePtr& space) const;

 private:
  struct Cached {
    SpacePtr space;
    Eigen::VectorXd force[2];
    Eigen::SparseMatrix<double> curl;
    bool has_force = false, has_curl = false;
  };
  Cached& cached(const SpacePtr& space) const;

  GoalKind kind_;
  double end_time_;
  double nu_;
  int line_points_, cell_points_;
  mutable std::deque<Cached> cache_;
};

/// Sample point of the goal trajectory.
struct TrajectoryPoint {
  double t;
  double drag, lift, vorticity;
};
std::vector<TrajectoryPoint> trajectory(const Goal& goal, const std::vector<SpaceTimeVector>& slabs);
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points);

}  // namespace stdwr
