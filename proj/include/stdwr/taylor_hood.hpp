#pragma once

#include "stdwr/lagrange_space.hpp"
#include "stdwr/temporal.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace stdwr {

enum class TimeProfile { sine, ramp, zero };
TimeProfile parse_time_profile(const std::string& name);
std::string to_string(TimeProfile p);

/// Inflow boundary data of a benchmark: spatial profile times a time factor.
struct InflowData {
  Geometry geometry = Geometry::cylinder2d3;
  TimeProfile profile = TimeProfile::sine;
  double end_time = 8.0;

  double time_factor(double t) const;
  double profile_x(const Eigen::Vector2d& x) const;
  double value_x(const Eigen::Vector2d& x, double t) const { return profile_x(x) * time_factor(t); }
};

/// Q_s / Q_{s-1} velocity-pressure pair with condensed constraints
/// U_full = C x + G d. Full ordering: [v_x | v_y | p].
class TaylorHoodSpace {
 public:
  /// Pressure degree defaults to velocity_degree - 1.
  TaylorHoodSpace(std::shared_ptr<const SpatialMesh> mesh, int velocity_degree, int pressure_degree = -1);

  const SpatialMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const SpatialMesh>& mesh_ptr() const { return mesh_; }
  const ScalarLagrangeSpace& velocity() const { return velocity_; }
  const ScalarLagrangeSpace& pressure() const { return pressure_; }
  int velocity_degree() const { return velocity_.degree(); }
  int pressure_degree() const { return pressure_.degree(); }

  Eigen::Index n_velocity() const { return velocity_.n_dofs(); }
  Eigen::Index n_pressure() const { return pressure_.n_dofs(); }
  Eigen::Index n_full() const { return 2 * n_velocity() + n_pressure(); }
  Eigen::Index n_free() const { return Eigen::Index(free_to_full_.size()); }
  Eigen::Index n_dirichlet() const { return Eigen::Index(dirichlet_to_full_.size()); }
  Eigen::Index pressure_offset() const { return 2 * n_velocity(); }

  const Eigen::SparseMatrix<double>& constraint_matrix() const { return c_; }
  const Eigen::SparseMatrix<double>& dirichlet_matrix() const { return g_; }
  const std::vector<int>& free_to_full() const { return free_to_full_; }
  const std::vector<int>& dirichlet_to_full() const { return dirichlet_to_full_; }
  /// Full index to free index, or -1.
  int free_index(Eigen::Index full) const { return full_to_free_[full]; }

  Eigen::VectorXd dirichlet_values(const InflowData& data, double t) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
  /// Overwrite hanging values from masters (Dirichlet entries untouched).
  void distribute(Eigen::VectorXd& full) const;
  void set_dirichlet(Eigen::VectorXd& full, const Eigen::VectorXd& d) const;

  /// Global full DoFs of an active cell: velocity x, velocity y and pressure blocks.
  void cell_full_dofs(int active, std::vector<int>& vx, std::vector<int>& vy, std::vector<int>& p) const;

 private:
  std::shared_ptr<const SpatialMesh> mesh_;
  ScalarLagrangeSpace velocity_;
  ScalarLagrangeSpace pressure_;
  std::vector<int> free_to_full_, dirichlet_to_full_, full_to_free_;
  Eigen::SparseMatrix<double> c_, g_;
};

/// Tensor product of a dG(r) basis on the slab intervals with a spatial pair.
/// Ordering: (interval, temporal node, spatial DoF) with the spatial index fastest.
struct SlabSpace {
  std::shared_ptr<const TaylorHoodSpace> space;
  std::shared_ptr<const TemporalBasis> basis;
  std::vector<Interval> intervals;

  int n_intervals() const { return int(intervals.size()); }
  int n_temporal() const { return n_intervals() * basis->size(); }
  Eigen::Index n_full() const { return n_temporal() * space->n_full(); }
  Eigen::Index n_free() const { return n_temporal() * space->n_free(); }
  Eigen::Index offset(int m, int a) const { return (Eigen::Index(m) * basis->size() + a) * space->n_full(); }
  Eigen::Index free_offset(int m, int a) const { return (Eigen::Index(m) * basis->size() + a) * space->n_free(); }
  int interval_containing(double t) const;
};

struct SpaceTimeVector {
  SlabSpace slab;
  Eigen::VectorXd values;

  SpaceTimeVector() = default;
  explicit SpaceTimeVector(SlabSpace s) : slab(std::move(s)), values(Eigen::VectorXd::Zero(slab.n_full())) {}

  auto block(int m, int a) { return values.segment(slab.offset(m, a), slab.space->n_full()); }
  auto block(int m, int a) const { return values.segment(slab.offset(m, a), slab.space->n_full()); }
  /// Spatial coefficient vector at time t.
  Eigen::VectorXd at(double t) const;
  Eigen::VectorXd at_interval(int m, double tau) const;
  Eigen::VectorXd end_trace() const { return at_interval(slab.n_intervals() - 1, 1.0); }
};

/// Velocity, velocity gradient (row i = grad of component i) and pressure at a point.
struct FieldValue {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
  double p = 0;
};
FieldValue evaluate_in_cell(const TaylorHoodSpace& space, const Eigen::VectorXd& full, int active,
                            const Eigen::Vector2d& xi);

struct PointLocation {
  int active = -1;
  Eigen::Vector2d xi;
};
/// Active cell of `mesh` containing x, scanning all cells; active = -1 if none.
PointLocation locate(const SpatialMesh& mesh, const Eigen::Vector2d& x, double tol = 1e-10);
/// Locate x, known to lie in (or next to) a cell of `target`, in the hierarchy of `source`.
PointLocation locate_in_hierarchy(const SpatialMesh& source, const SpatialMesh& target, int target_cell,
                                  const Eigen::Vector2d& x);
bool same_active_cells(const SpatialMesh& a, const SpatialMesh& b);

/// Nodal interpolation matrix (full -> full) between two pairs on the same mesh;
/// hanging rows of the target are expanded from their masters.
Eigen::SparseMatrix<double> interpolation_matrix(const TaylorHoodSpace& from, const TaylorHoodSpace& to);
/// Nodal interpolation across meshes of one refinement hierarchy (hanging rows distributed).
Eigen::VectorXd interpolate_across_meshes(const TaylorHoodSpace& from, const Eigen::VectorXd& full,
                                          const TaylorHoodSpace& to);

SpaceTimeVector interpolate_space(const SpaceTimeVector& v, std::shared_ptr<const TaylorHoodSpace> to);
SpaceTimeVector interpolate_time(const SpaceTimeVector& v, std::shared_ptr<const TemporalBasis> to);
/// Exact re-expansion of a lower order function into a richer slab space.
SpaceTimeVector embed(const SpaceTimeVector& v, std::shared_ptr<const TaylorHoodSpace> space,
                      std::shared_ptr<const TemporalBasis> basis);

/// Point evaluation of a space-time function (slow path, scans cells).
FieldValue evaluate(const SpaceTimeVector& v, double t, const Eigen::Vector2d& x);

}  // namespace stdwr
