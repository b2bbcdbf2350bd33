#include "stdwr/transfer.hpp"

#include "stdwr/forms.hpp"
#include "stdwr/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stdwr {

ProjectionKind parse_projection(const std::string& name) {
  if (name == "none") return ProjectionKind::none;
  if (name == "l2" || name == "l2_divfree") return ProjectionKind::l2_divfree;
  if (name == "h1" || name == "h1_divfree") return ProjectionKind::h1_divfree;
  throw std::invalid_argument("unknown projection: " + name);
}

std::string to_string(ProjectionKind k) {
  switch (k) {
    case ProjectionKind::none: return "none";
    case ProjectionKind::l2_divfree: return "l2";
    case ProjectionKind::h1_divfree: return "h1";
  }
  return "?";
}

namespace {

std::shared_ptr<const TaylorHoodSpace> borrow(const TaylorHoodSpace& s) {
  return std::shared_ptr<const TaylorHoodSpace>(&s, [](const TaylorHoodSpace*) {});
}

/// Max |C^T (B v)| over free pressure rows, B taken from a nu = 0 Stokes operator.
double pressure_residual(const TaylorHoodSpace& space, const SpatialOperators& div_ops, const Eigen::VectorXd& full) {
  Eigen::VectorXd v = full;
  v.tail(space.n_pressure()).setZero();
  const Eigen::VectorXd r = space.constraint_matrix().transpose() * (div_ops.stokes * v);
  double worst = 0;
  for (Eigen::Index i = 0; i < space.n_free(); ++i)
    if (space.free_to_full()[i] >= space.pressure_offset()) worst = std::max(worst, std::abs(r(i)));
  return worst;
}

/// Right-hand side (v, phi) or (grad v, grad phi) on the target mesh, integrating on whichever
/// of the two overlapping cells is finer.
Eigen::VectorXd projection_rhs(const TaylorHoodSpace& from, const Eigen::VectorXd& trace, const TaylorHoodSpace& to,
                               bool gradient, int n) {
  const SpatialMesh& sm = from.mesh();
  const SpatialMesh& tm = to.mesh();
  const ReferenceQuad& te = to.velocity().element();
  const Tabulation tab = tabulate(te, n);
  const Eigen::Index nvt = to.n_velocity();
  const int nloc = te.n_dofs();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(to.n_full());
  Eigen::VectorXd val;
  Eigen::MatrixX2d grad;
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> jxw;
  std::vector<FieldValue> src;
  for (int a = 0; a < tm.n_active(); ++a) {
    const int tid = tm.active_cells()[a];
    const CellGeometry tgeo(tm.corners(tid));
    const int sid = sm.deepest_existing(tm.key(tid));
    pts.clear();
    jxw.clear();
    src.clear();
    const bool source_finer = sm.active_index(sid) < 0;
    if (!source_finer) {
      const CellGeometry sgeo(sm.corners(sid));
      const int sa = sm.active_index(sid);
      for (std::size_t q = 0; q < tab.points.size(); ++q) {
        const Eigen::Vector2d x = tgeo.map(tab.points[q]);
        pts.push_back(tab.points[q]);
        jxw.push_back(tab.weights(Eigen::Index(q)) * std::abs(tgeo.jacobian(tab.points[q]).determinant()));
        src.push_back(evaluate_in_cell(from, trace, sa, sid == tid ? tab.points[q] : sgeo.inverse_map(x)));
      }
    } else {
      for (int did : sm.active_descendants(sid)) {
        const CellGeometry dgeo(sm.corners(did));
        const int da = sm.active_index(did);
        for (std::size_t q = 0; q < tab.points.size(); ++q) {
          const Eigen::Vector2d x = dgeo.map(tab.points[q]);
          pts.push_back(tgeo.inverse_map(x));
          jxw.push_back(tab.weights(Eigen::Index(q)) * std::abs(dgeo.jacobian(tab.points[q]).determinant()));
          src.push_back(evaluate_in_cell(from, trace, da, tab.points[q]));
        }
      }
    }
    const int* dofs = to.velocity().cell_dofs(a);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      if (gradient) {
        te.gradients(pts[q], grad);
        const Eigen::MatrixX2d g = grad * tgeo.jacobian(pts[q]).inverse();
        for (int i = 0; i < nloc; ++i) {
          f(dofs[i]) += jxw[q] * src[q].grad.row(0).dot(g.row(i));
          f(nvt + dofs[i]) += jxw[q] * src[q].grad.row(1).dot(g.row(i));
        }
      } else {
        te.values(pts[q], val);
        for (int i = 0; i < nloc; ++i) {
          f(dofs[i]) += jxw[q] * src[q].v.x() * val(i);
          f(nvt + dofs[i]) += jxw[q] * src[q].v.y() * val(i);
        }
      }
    }
  }
  return f;
}

}  // namespace

double divergence_residual(const TaylorHoodSpace& space, const Eigen::VectorXd& full, int n) {
  const SpatialOperators ops(borrow(space), 0.0, n);
  return pressure_residual(space, ops, full);
}

TransferResult transfer_trace(const TaylorHoodSpace& from, const Eigen::VectorXd& trace, const TaylorHoodSpace& to,
                              ProjectionKind kind, const InflowData& inflow, double t, int n) {
  TransferResult out;
  const Eigen::VectorXd nodal = interpolate_across_meshes(from, trace, to);
  if (kind == ProjectionKind::none) {
    out.values = nodal;
    out.divergence_residual = -1;
    out.first_residual = -1;
    return out;
  }
  const bool h1 = kind == ProjectionKind::h1_divfree;
  const SpatialOperators div_ops(borrow(to), h1 ? 1.0 : 0.0, n);
  Eigen::SparseMatrix<double> a = div_ops.stokes;
  if (!h1) a += div_ops.mass;
  const Eigen::VectorXd f = projection_rhs(from, trace, to, h1, n);
  const Eigen::VectorXd d = to.dirichlet_values(inflow, t);
  const Eigen::SparseMatrix<double> ct = to.constraint_matrix().transpose();
  const Eigen::VectorXd g = to.dirichlet_matrix() * d;
  const DirectSolver solver(div_ops.condense(a));
  const Eigen::VectorXd x = solver.solve(ct * (f - a * g));
  const Eigen::VectorXd full = to.expand(x, d);

  const Eigen::VectorXd r = ct * (a * full - f);
  std::vector<double> mult;
  for (Eigen::Index i = 0; i < to.n_free(); ++i) {
    if (to.free_to_full()[i] < to.pressure_offset())
      out.first_residual = std::max(out.first_residual, std::abs(r(i)));
    else
      mult.push_back(x(i));
  }
  out.multiplier = Eigen::Map<const Eigen::VectorXd>(mult.data(), Eigen::Index(mult.size()));
  out.values = full;
  out.values.tail(to.n_pressure()) = nodal.tail(to.n_pressure());
  // pressure rows carry only the divergence, whatever nu was used
  out.divergence_residual = pressure_residual(to, div_ops, out.values);
  return out;
}

}  // namespace stdwr
