#include "stdwr/goal.hpp"

#include "stdwr/forms.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace stdwr {

GoalKind parse_goal(const std::string& name) {
  if (name == "drag") return GoalKind::drag;
  if (name == "lift") return GoalKind::lift;
  if (name == "vorticity") return GoalKind::vorticity;
  if (name == "none") return GoalKind::none;
  throw std::invalid_argument("unknown goal: " + name);
}

std::string to_string(GoalKind g) {
  switch (g) {
    case GoalKind::drag: return "drag";
    case GoalKind::lift: return "lift";
    case GoalKind::vorticity: return "vorticity";
    case GoalKind::none: return "none";
  }
  return "?";
}

Goal::Goal(GoalKind kind, double end_time, double nu, int line_points, int cell_points)
    : kind_(kind), end_time_(end_time), nu_(nu), line_points_(line_points), cell_points_(cell_points) {
  if (end_time <= 0) throw std::invalid_argument("Goal: end time must be positive");
}

Goal::Cached& Goal::cached(const SpacePtr& space) const {
  for (auto& c : cache_)
    if (c.space == space) return c;
  if (cache_.size() >= 4) cache_.pop_front();
  cache_.emplace_back();
  cache_.back().space = space;
  return cache_.back();
}

const Eigen::VectorXd& Goal::force_vector(const SpacePtr& sp, int component) const {
  Cached& c = cached(sp);
  if (c.has_force) return c.force[component];
  const TaylorHoodSpace& space = *sp;
  const SpatialMesh& mesh = space.mesh();
  if (!mesh.has_circle()) throw std::invalid_argument("drag and lift need the cylinder geometry");
  const int n = line_points_ > 0 ? line_points_ : space.velocity_degree() + 1;
  const auto rule = gauss_legendre<double>(n);
  for (auto& f : c.force) f = Eigen::VectorXd::Zero(space.n_full());
  const ReferenceQuad& ve = space.velocity().element();
  const ReferenceQuad& pe = space.pressure().element();
  Eigen::VectorXd vval, pval;
  Eigen::MatrixX2d vgrad;
  std::vector<int> vx, vy, p;
  for (int a = 0; a < mesh.n_active(); ++a) {
    const int id = mesh.active_cells()[a];
    const auto& cell = mesh.cell(id);
    const CellGeometry geo(mesh.corners(id));
    for (int le = 0; le < 4; ++le) {
      if (mesh.edge(cell.e[le]).marker != Boundary::circle) continue;
      space.cell_full_dofs(a, vx, vy, p);
      for (Eigen::Index q = 0; q < rule.size(); ++q) {
        const double s = rule.points(q);
        Eigen::Vector2d xi;
        switch (le) {
          case 0: xi = {s, 0.0}; break;
          case 1: xi = {1.0, s}; break;
          case 2: xi = {s, 1.0}; break;
          default: xi = {0.0, s}; break;
        }
        const Eigen::Matrix2d jac = geo.jacobian(xi);
        Eigen::Vector2d tangent = (le == 0 || le == 2) ? jac.col(0) : jac.col(1);
        const double ds = tangent.norm();
        if (le >= 2) tangent = -tangent;  // counterclockwise
        // outward normal of the obstacle, i.e. the inward normal of the fluid cell
        const Eigen::Vector2d normal = Eigen::Vector2d(-tangent.y(), tangent.x()) / ds;
        const double w = 20.0 * rule.weights(q) * ds;
        ve.values(xi, vval);
        ve.gradients(xi, vgrad);
        pe.values(xi, pval);
        const Eigen::MatrixX2d g = vgrad * jac.inverse();
        for (int i = 0; i < vval.size(); ++i) {
          const double dn = nu_ * g.row(i).dot(normal);
          c.force[0](vx[i]) += w * dn;
          c.force[1](vy[i]) += w * dn;
        }
        for (int k = 0; k < pval.size(); ++k) {
          c.force[0](p[k]) -= w * pval(k) * normal.x();
          c.force[1](p[k]) -= w * pval(k) * normal.y();
        }
      }
    }
  }
  c.has_force = true;
  return c.force[component];
}

const Eigen::SparseMatrix<double>& Goal::vorticity_matrix(const SpacePtr& sp) const {
  Cached& c = cached(sp);
  if (c.has_curl) return c.curl;
  const TaylorHoodSpace& space = *sp;
  const int n = cell_points_ > 0 ? cell_points_ : space.velocity_degree() + 1;
  const CellQuadrature quad(space, n);
  const int nl = space.velocity().element().n_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<int> vx, vy, p;
  Eigen::MatrixXd local(2 * nl, 2 * nl);
  Eigen::VectorXd curl(2 * nl);
  for (int a = 0; a < space.mesh().n_active(); ++a) {
    local.setZero();
    for (int q = 0; q < quad.n_q; ++q) {
      const Eigen::Index r = quad.row(a, q);
      curl.head(nl) = -quad.grad_y.row(r).transpose();
      curl.tail(nl) = quad.grad_x.row(r).transpose();
      local.noalias() += quad.jxw(r) * curl * curl.transpose();
    }
    space.cell_full_dofs(a, vx, vy, p);
    for (int i = 0; i < 2 * nl; ++i) {
      const int gi = i < nl ? vx[i] : vy[i - nl];
      for (int j = 0; j < 2 * nl; ++j) trip.emplace_back(gi, j < nl ? vx[j] : vy[j - nl], local(i, j));
    }
  }
  c.curl.resize(space.n_full(), space.n_full());
  c.curl.setFromTriplets(trip.begin(), trip.end());
  c.has_curl = true;
  return c.curl;
}

double Goal::drag_coefficient(const SpacePtr& space, const Eigen::VectorXd& full) const {
  return force_vector(space, 0).dot(full);
}

double Goal::lift_coefficient(const SpacePtr& space, const Eigen::VectorXd& full) const {
  return force_vector(space, 1).dot(full);
}

double Goal::vorticity_integral(const SpacePtr& space, const Eigen::VectorXd& full) const {
  return full.dot(vorticity_matrix(space) * full);
}

double Goal::evaluate(const SpaceTimeVector& u) const {
  const TemporalBasis& tb = *u.slab.basis;
  const auto& rule = tb.quadrature();
  double j = 0;
  for (int m = 0; m < u.slab.n_intervals(); ++m) {
    const double k = u.slab.intervals[m].length();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd uq = u.at_interval(m, rule.points(q));
      double val = 0;
      switch (kind_) {
        case GoalKind::drag: val = drag_coefficient(u.slab.space, uq); break;
        case GoalKind::lift: val = lift_coefficient(u.slab.space, uq); break;
        case GoalKind::vorticity: val = vorticity_integral(u.slab.space, uq); break;
        case GoalKind::none: break;
      }
      j += k * rule.weights(q) * val;
    }
  }
  return j / end_time_;
}

Eigen::VectorXd Goal::derivative(const SpaceTimeVector& u) const {
  const TemporalBasis& tb = *u.slab.basis;
  const auto& rule = tb.quadrature();
  const Eigen::Index n = u.slab.space->n_full();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.slab.n_full());
  if (kind_ == GoalKind::none) return g;
  for (int m = 0; m < u.slab.n_intervals(); ++m) {
    const double k = u.slab.intervals[m].length();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      Eigen::VectorXd dq;
      if (kind_ == GoalKind::vorticity)
        dq = 2.0 * (vorticity_matrix(u.slab.space) * u.at_interval(m, rule.points(q)));
      else
        dq = force_vector(u.slab.space, kind_ == GoalKind::drag ? 0 : 1);
      const double w = k * rule.weights(q) / end_time_;
      for (int b = 0; b < tb.size(); ++b)
        g.segment(u.slab.offset(m, b), n) += (w * tb.quadrature_values()(q, b)) * dq;
    }
  }
  return g;
}

std::vector<TrajectoryPoint> trajectory(const Goal& goal, const std::vector<SpaceTimeVector>& slabs) {
  std::vector<TrajectoryPoint> out;
  for (const auto& u : slabs) {
    const auto& rule = u.slab.basis->quadrature();
    const bool circle = u.slab.space->mesh().has_circle();
    for (int m = 0; m < u.slab.n_intervals(); ++m)
      for (Eigen::Index q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd uq = u.at_interval(m, rule.points(q));
        TrajectoryPoint p{};
        p.t = u.slab.intervals[m].from_reference(rule.points(q));
        if (circle) {
          p.drag = goal.drag_coefficient(u.slab.space, uq);
          p.lift = goal.lift_coefficient(u.slab.space, uq);
        }
        p.vorticity = goal.vorticity_integral(u.slab.space, uq);
        out.push_back(p);
      }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
  os << "t,c_drag,c_lift,vorticity\n";
  os.precision(16);
  for (const auto& p : points) os << p.t << "," << p.drag << "," << p.lift << "," << p.vorticity << "\n";
}

}  // namespace stdwr
