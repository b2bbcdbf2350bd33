#include "stdwr/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace stdwr {

Equation parse_equation(const std::string& name) {
  if (name == "stokes") return Equation::stokes;
  if (name == "navier_stokes" || name == "nse") return Equation::navier_stokes;
  throw std::invalid_argument("unknown equation '" + name + "'");
}

std::string to_string(Equation e) { return e == Equation::stokes ? "stokes" : "navier_stokes"; }

CellQuadrature::CellQuadrature(const TaylorHoodSpace& space, int n)
    : points_per_direction(n),
      n_q(n * n),
      velocity(tabulate(space.velocity().element(), n)),
      pressure(tabulate(space.pressure().element(), n)) {
  const SpatialMesh& mesh = space.mesh();
  const int nc = mesh.n_active();
  const int nvl = space.velocity().element().n_dofs();
  jxw.resize(Eigen::Index(nc) * n_q);
  points.resize(std::size_t(nc) * n_q);
  grad_x.resize(Eigen::Index(nc) * n_q, nvl);
  grad_y.resize(Eigen::Index(nc) * n_q, nvl);
  for (int c = 0; c < nc; ++c) {
    const CellGeometry geo(mesh.corners(mesh.active_cells()[c]));
    for (int q = 0; q < n_q; ++q) {
      const Eigen::Vector2d& xi = velocity.points[q];
      const Eigen::Matrix2d j = geo.jacobian(xi);
      const double det = j.determinant();
      if (det <= 0) throw std::runtime_error("degenerate or inverted cell");
      const Eigen::Matrix2d jinv = j.inverse();
      const Eigen::Index r = row(c, q);
      jxw(r) = velocity.weights(q) * det;
      points[r] = geo.map(xi);
      const Eigen::MatrixX2d g = velocity.grads[q] * jinv;
      grad_x.row(r) = g.col(0).transpose();
      grad_y.row(r) = g.col(1).transpose();
    }
  }
}

SpatialOperators::SpatialOperators(std::shared_ptr<const TaylorHoodSpace> sp, double viscosity, int n)
    : space(std::move(sp)), quadrature(std::make_shared<CellQuadrature>(*space, n)), nu(viscosity) {
  const CellQuadrature& quad = *quadrature;
  const int nvl = space->velocity().element().n_dofs();
  const int npl = space->pressure().element().n_dofs();
  std::vector<Eigen::Triplet<double>> tm, ts;
  std::vector<int> vx, vy, p;
  Eigen::MatrixXd ml(nvl, nvl), kl(nvl, nvl), bx(npl, nvl), by(npl, nvl);
  for (int c = 0; c < space->mesh().n_active(); ++c) {
    ml.setZero();
    kl.setZero();
    bx.setZero();
    by.setZero();
    for (int q = 0; q < quad.n_q; ++q) {
      const Eigen::Index r = quad.row(c, q);
      const double w = quad.jxw(r);
      const auto phi = quad.velocity.values.row(q);
      const auto psi = quad.pressure.values.row(q);
      const auto gx = quad.grad_x.row(r);
      const auto gy = quad.grad_y.row(r);
      ml.noalias() += w * phi.transpose() * phi;
      kl.noalias() += (w * nu) * (gx.transpose() * gx + gy.transpose() * gy);
      bx.noalias() += w * psi.transpose() * gx;
      by.noalias() += w * psi.transpose() * gy;
    }
    space->cell_full_dofs(c, vx, vy, p);
    for (int i = 0; i < nvl; ++i) {
      for (int j = 0; j < nvl; ++j) {
        tm.emplace_back(vx[i], vx[j], ml(i, j));
        tm.emplace_back(vy[i], vy[j], ml(i, j));
        ts.emplace_back(vx[i], vx[j], kl(i, j));
        ts.emplace_back(vy[i], vy[j], kl(i, j));
      }
      for (int k = 0; k < npl; ++k) {
        ts.emplace_back(vx[i], p[k], -bx(k, i));
        ts.emplace_back(vy[i], p[k], -by(k, i));
        ts.emplace_back(p[k], vx[i], bx(k, i));
        ts.emplace_back(p[k], vy[i], by(k, i));
      }
    }
  }
  const Eigen::Index nf = space->n_full();
  mass.resize(nf, nf);
  mass.setFromTriplets(tm.begin(), tm.end());
  stokes.resize(nf, nf);
  stokes.setFromTriplets(ts.begin(), ts.end());
  mass_r = condense(mass);
  stokes_r = condense(stokes);
}

Eigen::SparseMatrix<double> SpatialOperators::condense(const Eigen::SparseMatrix<double>& full) const {
  const auto& c = space->constraint_matrix();
  Eigen::SparseMatrix<double> ct = c.transpose();
  Eigen::SparseMatrix<double> out = ct * full * c;
  out.makeCompressed();
  return out;
}

void assemble_convection(const TaylorHoodSpace& space, const CellQuadrature& quad, const Eigen::VectorXd& w,
                         Eigen::VectorXd* vector, Eigen::SparseMatrix<double>* matrix) {
  const int nvl = space.velocity().element().n_dofs();
  const Eigen::Index nv = space.n_velocity();
  std::vector<Eigen::Triplet<double>> trip;
  if (vector) *vector = Eigen::VectorXd::Zero(space.n_full());
  std::vector<int> vx, vy, p;
  Eigen::VectorXd wx(nvl), wy(nvl);
  Eigen::MatrixXd xx(nvl, nvl), xy(nvl, nvl), yx(nvl, nvl), yy(nvl, nvl);
  Eigen::VectorXd cx(nvl), cy(nvl);
  for (int c = 0; c < space.mesh().n_active(); ++c) {
    space.cell_full_dofs(c, vx, vy, p);
    for (int i = 0; i < nvl; ++i) {
      wx(i) = w(vx[i]);
      wy(i) = w(vy[i]);
    }
    xx.setZero();
    xy.setZero();
    yx.setZero();
    yy.setZero();
    cx.setZero();
    cy.setZero();
    for (int q = 0; q < quad.n_q; ++q) {
      const Eigen::Index r = quad.row(c, q);
      const double jw = quad.jxw(r);
      const auto phi = quad.velocity.values.row(q);
      const auto gx = quad.grad_x.row(r);
      const auto gy = quad.grad_y.row(r);
      const double ux = phi.dot(wx), uy = phi.dot(wy);
      const double dxux = gx.dot(wx), dyux = gy.dot(wx);
      const double dxuy = gx.dot(wy), dyuy = gy.dot(wy);
      if (vector) {
        cx += (jw * (ux * dxux + uy * dyux)) * phi.transpose();
        cy += (jw * (ux * dxuy + uy * dyuy)) * phi.transpose();
      }
      if (matrix) {
        const Eigen::RowVectorXd adv = ux * gx + uy * gy;
        const Eigen::MatrixXd pp = jw * phi.transpose() * phi;
        const Eigen::MatrixXd pa = jw * phi.transpose() * adv;
        xx.noalias() += dxux * pp + pa;
        xy.noalias() += dyux * pp;
        yx.noalias() += dxuy * pp;
        yy.noalias() += dyuy * pp + pa;
      }
    }
    if (vector) {
      for (int i = 0; i < nvl; ++i) {
        (*vector)(vx[i]) += cx(i);
        (*vector)(vy[i]) += cy(i);
      }
    }
    if (matrix) {
      for (int i = 0; i < nvl; ++i)
        for (int j = 0; j < nvl; ++j) {
          trip.emplace_back(vx[i], vx[j], xx(i, j));
          trip.emplace_back(vx[i], vy[j], xy(i, j));
          trip.emplace_back(vy[i], vx[j], yx(i, j));
          trip.emplace_back(vy[i], vy[j], yy(i, j));
        }
    }
  }
  (void)nv;
  if (matrix) {
    matrix->resize(space.n_full(), space.n_full());
    matrix->setFromTriplets(trip.begin(), trip.end());
  }
}

Eigen::SparseMatrix<double> kronecker_sum(const std::vector<KroneckerTerm>& terms, Eigen::Index n_blocks) {
  if (terms.empty()) throw std::invalid_argument("kronecker_sum: no terms");
  const Eigen::Index n = terms.front().spatial->rows();
  std::size_t estimate = 0;
  for (const auto& t : terms) estimate += std::size_t(t.spatial->nonZeros()) * std::size_t(n_blocks) * 3;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(estimate);
  for (const auto& t : terms) {
    for (Eigen::Index bj = 0; bj < n_blocks; ++bj)
      for (Eigen::Index bi = 0; bi < n_blocks; ++bi) {
        const double c = t.temporal(bi, bj);
        if (c == 0.0) continue;
        for (Eigen::Index col = 0; col < t.spatial->outerSize(); ++col)
          for (Eigen::SparseMatrix<double>::InnerIterator it(*t.spatial, col); it; ++it)
            trip.emplace_back(int(bi * n + it.row()), int(bj * n + it.col()), c * it.value());
      }
  }
  Eigen::SparseMatrix<double> out(n_blocks * n, n_blocks * n);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

SlabForm::SlabForm(Equation eq, SlabSpace slab, std::shared_ptr<const SpatialOperators> ops, InflowData inflow,
                   Eigen::VectorXd initial_trace)
    : eq_(eq), slab_(std::move(slab)), ops_(std::move(ops)), inflow_(inflow), initial_trace_(std::move(initial_trace)) {
  if (ops_->space != slab_.space) throw std::invalid_argument("SlabForm: operators belong to another space");
  if (initial_trace_.size() == 0) initial_trace_ = Eigen::VectorXd::Zero(slab_.space->n_full());
  if (initial_trace_.size() != slab_.space->n_full()) throw std::invalid_argument("SlabForm: trace size mismatch");
  for (const auto& iv : slab_.intervals)
    for (int a = 0; a < slab_.basis->size(); ++a)
      dirichlet_.push_back(slab_.space->dirichlet_values(inflow_, iv.from_reference(slab_.basis->support_points()(a))));
}

Eigen::VectorXd SlabForm::expand(const Eigen::VectorXd& x) const {
  const TaylorHoodSpace& sp = *slab_.space;
  Eigen::VectorXd full(slab_.n_full());
  for (int m = 0; m < slab_.n_intervals(); ++m)
    for (int a = 0; a < slab_.basis->size(); ++a)
      full.segment(slab_.offset(m, a), sp.n_full()) =
          sp.expand(x.segment(slab_.free_offset(m, a), sp.n_free()), dirichlet(m, a));
  return full;
}

Eigen::VectorXd SlabForm::restrict_to_free(const Eigen::VectorXd& full) const {
  const TaylorHoodSpace& sp = *slab_.space;
  Eigen::VectorXd x(slab_.n_free());
  for (int m = 0; m < slab_.n_intervals(); ++m)
    for (int a = 0; a < slab_.basis->size(); ++a)
      x.segment(slab_.free_offset(m, a), sp.n_free()) =
          sp.restrict_to_free(full.segment(slab_.offset(m, a), sp.n_full()));
  return x;
}

Eigen::VectorXd SlabForm::constant_guess(const Eigen::VectorXd& spatial) const {
  Eigen::VectorXd full(slab_.n_full());
  const Eigen::Index n = slab_.space->n_full();
  for (int m = 0; m < slab_.n_intervals(); ++m)
    for (int a = 0; a < slab_.basis->size(); ++a) full.segment(slab_.offset(m, a), n) = spatial;
  return restrict_to_free(full);
}

Eigen::VectorXd SlabForm::condense(const Eigen::VectorXd& full_residual) const {
  const TaylorHoodSpace& sp = *slab_.space;
  const Eigen::SparseMatrix<double> ct = sp.constraint_matrix().transpose();
  Eigen::VectorXd r(slab_.n_free());
  for (int m = 0; m < slab_.n_intervals(); ++m)
    for (int a = 0; a < slab_.basis->size(); ++a)
      r.segment(slab_.free_offset(m, a), sp.n_free()) = ct * full_residual.segment(slab_.offset(m, a), sp.n_full());
  return r;
}

std::vector<Eigen::VectorXd> SlabForm::spatial_at_quadrature(const Eigen::VectorXd& full, int m) const {
  const TemporalBasis& tb = *slab_.basis;
  const Eigen::Index n = slab_.space->n_full();
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index q = 0; q < tb.quadrature().size(); ++q) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int b = 0; b < tb.size(); ++b) u += tb.quadrature_values()(q, b) * full.segment(slab_.offset(m, b), n);
    out.push_back(std::move(u));
  }
  return out;
}

Eigen::VectorXd SlabForm::residual_full(const Eigen::VectorXd& full) const {
  const TemporalBasis& tb = *slab_.basis;
  const SpatialOperators& ops = *ops_;
  const Eigen::Index n = slab_.space->n_full();
  const int nt = tb.size();
  const Eigen::MatrixXd de = tb.derivative() + tb.start_coupling();
  Eigen::VectorXd res = Eigen::VectorXd::Zero(slab_.n_full());
  std::vector<Eigen::VectorXd> mu(nt), su(nt);
  for (int m = 0; m < slab_.n_intervals(); ++m) {
    const double k = slab_.intervals[m].length();
    for (int b = 0; b < nt; ++b) {
      const auto u = full.segment(slab_.offset(m, b), n);
      mu[b] = ops.mass * u;
      su[b] = ops.stokes * u;
    }
    Eigen::VectorXd prev;
    if (m == 0) {
      prev = initial_trace_;
    } else {
      prev = Eigen::VectorXd::Zero(n);
      for (int b = 0; b < nt; ++b) prev += tb.values_at_end()(b) * full.segment(slab_.offset(m - 1, b), n);
    }
    const Eigen::VectorXd mprev = ops.mass * prev;
    for (int a = 0; a < nt; ++a) {
      auto r = res.segment(slab_.offset(m, a), n);
      for (int b = 0; b < nt; ++b) r += de(a, b) * mu[b] + (k * tb.mass()(a, b)) * su[b];
      r -= tb.values_at_start()(a) * mprev;
    }
    if (eq_ == Equation::navier_stokes) {
      const auto uq = spatial_at_quadrature(full, m);
      for (std::size_t q = 0; q < uq.size(); ++q) {
        Eigen::VectorXd c;
        assemble_convection(*slab_.space, *ops.quadrature, uq[q], &c, nullptr);
        const double wq = k * tb.quadrature().weights(Eigen::Index(q));
        for (int a = 0; a < nt; ++a)
          res.segment(slab_.offset(m, a), n) += (wq * tb.quadrature_values()(Eigen::Index(q), a)) * c;
      }
    }
  }
  return res;
}

Eigen::VectorXd SlabForm::residual(const Eigen::VectorXd& x) const { return condense(residual_full(expand(x))); }

Eigen::SparseMatrix<double> SlabForm::jacobian(const Eigen::VectorXd& x) const {
  if (eq_ == Equation::stokes) return jacobian_at(Eigen::VectorXd());
  return jacobian_at(expand(x));
}

Eigen::SparseMatrix<double> SlabForm::jacobian_at(const Eigen::VectorXd& full) const {
  const TemporalBasis& tb = *slab_.basis;
  const int nt = tb.size();
  const int ni = slab_.n_intervals();
  const Eigen::Index nb = Eigen::Index(ni) * nt;
  const Eigen::MatrixXd de = tb.derivative() + tb.start_coupling();
  const Eigen::MatrixXd jump = tb.values_at_start() * tb.values_at_end().transpose();
  Eigen::MatrixXd tmass = Eigen::MatrixXd::Zero(nb, nb), tstokes = Eigen::MatrixXd::Zero(nb, nb);
  for (int m = 0; m < ni; ++m) {
    tmass.block(m * nt, m * nt, nt, nt) = de;
    if (m > 0) tmass.block(m * nt, (m - 1) * nt, nt, nt) = -jump;
    tstokes.block(m * nt, m * nt, nt, nt) = slab_.intervals[m].length() * tb.mass();
  }
  std::vector<KroneckerTerm> terms{{&ops_->mass_r, tmass}, {&ops_->stokes_r, tstokes}};
  std::vector<Eigen::SparseMatrix<double>> conv;
  if (eq_ == Equation::navier_stokes) {
    const Eigen::Index nq = tb.quadrature().size();
    conv.reserve(std::size_t(ni * nq));
    std::vector<Eigen::MatrixXd> coeff;
    for (int m = 0; m < ni; ++m) {
      const auto uq = spatial_at_quadrature(full, m);
      const double k = slab_.intervals[m].length();
      for (Eigen::Index q = 0; q < nq; ++q) {
        Eigen::SparseMatrix<double> nfull;
        assemble_convection(*slab_.space, *ops_->quadrature, uq[q], nullptr, &nfull);
        conv.push_back(ops_->condense(nfull));
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nb, nb);
        const Eigen::VectorXd phi = tb.quadrature_values().row(q).transpose();
        t.block(m * nt, m * nt, nt, nt) = (k * tb.quadrature().weights(q)) * phi * phi.transpose();
        coeff.push_back(t);
      }
    }
    for (std::size_t i = 0; i < conv.size(); ++i) terms.push_back({&conv[i], coeff[i]});
  }
  return kronecker_sum(terms, nb);
}

}  // namespace stdwr
