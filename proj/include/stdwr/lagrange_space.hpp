#pragma once

#include "stdwr/mesh.hpp"
#include "stdwr/polynomials.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace stdwr {

/// Bilinear map of one quadrilateral from the unit square.
class CellGeometry {
 public:
  explicit CellGeometry(const std::array<Eigen::Vector2d, 4>& corners) : p_(corners) {}

  Eigen::Vector2d map(const Eigen::Vector2d& xi) const;
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& xi) const;
  /// Newton inversion of the bilinear map; the result may lie outside [0,1]^2.
  Eigen::Vector2d inverse_map(const Eigen::Vector2d& x) const;

 private:
  std::array<Eigen::Vector2d, 4> p_;
};

bool inside_reference(const Eigen::Vector2d& xi, double tol = 1e-10);

/// Tensor-product Lagrange element Q_s on [0,1]^2 with Gauss-Lobatto nodes;
/// local index = iy * (s+1) + ix.
class ReferenceQuad {
 public:
  explicit ReferenceQuad(int degree);

  int degree() const { return s_; }
  int n_dofs() const { return (s_ + 1) * (s_ + 1); }
  const LagrangeBasis1D<double>& basis1d() const { return basis1d_; }
  Eigen::Vector2d node(int local) const;

  void values(const Eigen::Vector2d& xi, Eigen::VectorXd& out) const;
  /// Reference gradients: column 0 is d/dxi, column 1 is d/deta.
  void gradients(const Eigen::Vector2d& xi, Eigen::MatrixX2d& out) const;

 private:
  int s_;
  LagrangeBasis1D<double> basis1d_;
};

/// Tensor Gauss rule on the unit square with shape-function tables.
struct Tabulation {
  std::vector<Eigen::Vector2d> points;
  Eigen::VectorXd weights;
  Eigen::MatrixXd values;                // n_q x n_dofs
  std::vector<Eigen::MatrixX2d> grads;   // per point, n_dofs x 2 (reference)
};
Tabulation tabulate(const ReferenceQuad& element, int points_per_direction);
Tabulation tabulate_at(const ReferenceQuad& element, const std::vector<Eigen::Vector2d>& points);

/// Continuous Q_s space on a SpatialMesh with hanging-node and Dirichlet classification.
class ScalarLagrangeSpace {
 public:
  enum class Kind : unsigned char { free, hanging, dirichlet };

  /// `dirichlet` decides which boundary markers fix the DoF values.
  ScalarLagrangeSpace(std::shared_ptr<const SpatialMesh> mesh, int degree,
                      const std::function<bool(Boundary)>& dirichlet);

  const SpatialMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const SpatialMesh>& mesh_ptr() const { return mesh_; }
  const ReferenceQuad& element() const { return element_; }
  int degree() const { return element_.degree(); }
  int n_dofs() const { return n_dofs_; }

  /// Global DoFs of the i-th active cell in local ordering.
  const int* cell_dofs(int active) const { return cell_dofs_.data() + std::size_t(active) * element_.n_dofs(); }
  Eigen::Vector2d support_point(int dof) const { return support_points_[dof]; }
  Kind kind(int dof) const { return kind_[dof]; }
  Boundary boundary(int dof) const { return boundary_[dof]; }
  /// Expansion of a hanging DoF into free or Dirichlet DoFs.
  const std::vector<std::pair<int, double>>& constraint(int dof) const { return constraints_[dof]; }

  /// Overwrite hanging values from their masters.
  void distribute(Eigen::Ref<Eigen::VectorXd> values) const;

 private:
  std::shared_ptr<const SpatialMesh> mesh_;
  ReferenceQuad element_;
  int n_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<Eigen::Vector2d> support_points_;
  std::vector<Kind> kind_;
  std::vector<Boundary> boundary_;
  std::vector<std::vector<std::pair<int, double>>> constraints_;
};

/// Local node indices on local edge `le` ordered from its first to second corner.
std::vector<int> edge_local_nodes(int degree, int local_edge);

}  // namespace stdwr
