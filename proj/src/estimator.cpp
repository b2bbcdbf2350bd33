#include "stdwr/estimator.hpp"

#include <cmath>
#include <ostream>

namespace stdwr {

Weights compute_weights(const SpaceTimeVector& z, const std::shared_ptr<const TaylorHoodSpace>& primal_space,
                        const std::shared_ptr<const TemporalBasis>& primal_basis) {
  const SpaceTimeVector ikz = interpolate_time(z, primal_basis);
  const SpaceTimeVector ikz_up = interpolate_time(ikz, z.slab.basis);
  const SpaceTimeVector ihikz = interpolate_space(ikz, primal_space);
  const SpaceTimeVector ihikz_up = embed(ihikz, z.slab.space, z.slab.basis);
  Weights w{SpaceTimeVector(z.slab), SpaceTimeVector(z.slab)};
  w.temporal.values = z.values - ikz_up.values;
  w.spatial.values = ikz_up.values - ihikz_up.values;
  return w;
}

double ErrorIndicators::eta_k() const {
  double s = 0;
  for (const auto& sl : slabs) s += sl.eta_k.sum();
  return s;
}

double ErrorIndicators::eta_h() const {
  double s = 0;
  for (const auto& sl : slabs) s += sl.eta_h.sum();
  return s;
}

double ErrorIndicators::oracle_k() const {
  double s = 0;
  for (const auto& sl : slabs) s += sl.oracle_k;
  return s;
}

double ErrorIndicators::oracle_h() const {
  double s = 0;
  for (const auto& sl : slabs) s += sl.oracle_h;
  return s;
}

Eigen::VectorXd ErrorIndicators::interval_eta_k() const {
  int n = 0;
  for (const auto& sl : slabs) n = std::max(n, sl.first_interval + int(sl.eta_k.cols()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto& sl : slabs)
    for (Eigen::Index m = 0; m < sl.eta_k.cols(); ++m) out(sl.first_interval + m) += sl.eta_k.col(m).sum();
  return out;
}

PartitionOfUnity::PartitionOfUnity(std::shared_ptr<const SpatialMesh> mesh)
    : space(std::move(mesh), 1, [](Boundary) { return false; }) {
  free_index.assign(std::size_t(space.n_dofs()), -1);
  std::vector<int> dof_vertex(std::size_t(space.n_dofs()), -1);
  const SpatialMesh& m = space.mesh();
  static constexpr int corner_of_local[4] = {0, 1, 3, 2};  // local iy*2+ix -> cell corner
  for (int a = 0; a < m.n_active(); ++a) {
    const auto& cell = m.cell(m.active_cells()[a]);
    const int* d = space.cell_dofs(a);
    for (int l = 0; l < 4; ++l) dof_vertex[d[l]] = cell.v[corner_of_local[l]];
  }
  for (int d = 0; d < space.n_dofs(); ++d)
    if (space.kind(d) == ScalarLagrangeSpace::Kind::free) {
      free_index[d] = int(vertex.size());
      vertex.push_back(dof_vertex[d]);
    }
}

namespace {

/// Physical shape gradients of one element at the quadrature points of a cell.
struct CellTable {
  std::vector<Eigen::MatrixX2d> grad;  // per point
};

void physical_gradients(const Tabulation& tab, const std::vector<Eigen::Matrix2d>& jinv, CellTable& out) {
  out.grad.resize(tab.points.size());
  for (std::size_t q = 0; q < tab.points.size(); ++q) out.grad[q].noalias() = tab.grads[q] * jinv[q];
}

/// Velocity, gradient and pressure of one temporal node at a point.
struct Local {
  Eigen::Vector2d v;
  Eigen::Matrix2d g;
  double p;
};

Local field(const Eigen::VectorXd& vx, const Eigen::VectorXd& vy, const Eigen::VectorXd& pc,
            const Eigen::RowVectorXd& vval, const Eigen::MatrixX2d& vgrad, const Eigen::RowVectorXd& pval) {
  Local f;
  f.v = {vval.dot(vx), vval.dot(vy)};
  f.g.row(0) = vx.transpose() * vgrad;
  f.g.row(1) = vy.transpose() * vgrad;
  f.p = pval.dot(pc);
  return f;
}

void gather(const Eigen::Ref<const Eigen::VectorXd>& full, const std::vector<int>& vx, const std::vector<int>& vy,
            const std::vector<int>& p, Eigen::VectorXd& cx, Eigen::VectorXd& cy, Eigen::VectorXd& cp) {
  cx.resize(Eigen::Index(vx.size()));
  cy.resize(Eigen::Index(vy.size()));
  cp.resize(Eigen::Index(p.size()));
  for (std::size_t i = 0; i < vx.size(); ++i) {
    cx(Eigen::Index(i)) = full(vx[i]);
    cy(Eigen::Index(i)) = full(vy[i]);
  }
  for (std::size_t i = 0; i < p.size(); ++i) cp(Eigen::Index(i)) = full(p[i]);
}

}  // namespace

SlabIndicators compute_indicators(Equation eq, double nu, const SpaceTimeVector& u, const Eigen::VectorXd& incoming,
                                  const Weights& wts, int n, int first_interval) {
  const TaylorHoodSpace& ps = *u.slab.space;
  const TaylorHoodSpace& es = *wts.temporal.slab.space;
  const TemporalBasis& pb = *u.slab.basis;
  const TemporalBasis& eb = *wts.temporal.slab.basis;
  const SpatialMesh& mesh = ps.mesh();
  const PartitionOfUnity pu(ps.mesh_ptr());
  const ReferenceQuad q1(1);

  const Tabulation t_pv = tabulate(ps.velocity().element(), n);
  const Tabulation t_pp = tabulate(ps.pressure().element(), n);
  const Tabulation t_ev = tabulate(es.velocity().element(), n);
  const Tabulation t_ep = tabulate(es.pressure().element(), n);
  const Tabulation t_pu = tabulate(q1, n);
  const int nq = int(t_pv.points.size());
  const int np1 = pb.size(), np2 = eb.size();
  const int ni = u.slab.n_intervals();
  const auto& trule = eb.quadrature();
  // temporal tables at the enriched rule's points (which integrate the products exactly)
  Eigen::MatrixXd phi1(trule.size(), np1), dphi1(trule.size(), np1), phi2(trule.size(), np2);
  for (Eigen::Index q = 0; q < trule.size(); ++q) {
    phi1.row(q) = pb.lagrange().values(trule.points(q)).transpose();
    dphi1.row(q) = pb.lagrange().derivatives(trule.points(q)).transpose();
    phi2.row(q) = eb.lagrange().values(trule.points(q)).transpose();
  }
  const Eigen::VectorXd phi2_start = eb.lagrange().values(0.0);

  SlabIndicators out;
  out.first_interval = first_interval;
  out.pu_vertex = pu.vertex;
  out.eta_k = Eigen::MatrixXd::Zero(pu.size(), ni);
  out.eta_h = Eigen::MatrixXd::Zero(pu.size(), ni);

  const bool nse = eq == Equation::navier_stokes;
  std::vector<Eigen::Matrix2d> jinv(nq);
  std::vector<double> jxw(nq);
  CellTable g_pv, g_ev, g_pu;
  std::vector<int> pvx, pvy, pp, evx, evy, ep;
  std::vector<Eigen::VectorXd> ux(np1), uy(np1), up(np1);
  Eigen::VectorXd mx, my, mp;
  std::vector<Eigen::VectorXd> kx(np2), ky(np2), kp(np2), hx(np2), hy(np2), hp(np2);
  std::vector<Local> uf(np1), kf(np2), hf(np2);
  Eigen::Vector4d ek, eh;

  for (int a = 0; a < mesh.n_active(); ++a) {
    const CellGeometry geo(mesh.corners(mesh.active_cells()[a]));
    for (int q = 0; q < nq; ++q) {
      const Eigen::Matrix2d j = geo.jacobian(t_pv.points[q]);
      jinv[q] = j.inverse();
      jxw[q] = t_pv.weights(q) * std::abs(j.determinant());
    }
    physical_gradients(t_pv, jinv, g_pv);
    physical_gradients(t_ev, jinv, g_ev);
    physical_gradients(t_pu, jinv, g_pu);
    ps.cell_full_dofs(a, pvx, pvy, pp);
    es.cell_full_dofs(a, evx, evy, ep);
    const int* pud = pu.space.cell_dofs(a);

    for (int m = 0; m < ni; ++m) {
      const double k = u.slab.intervals[m].length();
      for (int b = 0; b < np1; ++b) gather(u.block(m, b), pvx, pvy, pp, ux[b], uy[b], up[b]);
      for (int c = 0; c < np2; ++c) {
        gather(wts.temporal.block(m, c), evx, evy, ep, kx[c], ky[c], kp[c]);
        gather(wts.spatial.block(m, c), evx, evy, ep, hx[c], hy[c], hp[c]);
      }
      // trace entering the interval
      if (m == 0) {
        gather(incoming, pvx, pvy, pp, mx, my, mp);
      } else {
        mx = Eigen::VectorXd::Zero(Eigen::Index(pvx.size()));
        my = mx;
        mp = Eigen::VectorXd::Zero(Eigen::Index(pp.size()));
        Eigen::VectorXd bx, by, bp;
        for (int b = 0; b < np1; ++b) {
          gather(u.block(m - 1, b), pvx, pvy, pp, bx, by, bp);
          const double e = pb.values_at_end()(b);
          mx += e * bx;
          my += e * by;
          mp += e * bp;
        }
      }
      ek.setZero();
      eh.setZero();
      for (int q = 0; q < nq; ++q) {
        const Eigen::RowVectorXd pvv = t_pv.values.row(q), ppv = t_pp.values.row(q);
        const Eigen::RowVectorXd evv = t_ev.values.row(q), epv = t_ep.values.row(q);
        const Eigen::RowVectorXd chi = t_pu.values.row(q);
        const Eigen::MatrixX2d& gchi = g_pu.grad[q];
        for (int b = 0; b < np1; ++b) uf[b] = field(ux[b], uy[b], up[b], pvv, g_pv.grad[q], ppv);
        for (int c = 0; c < np2; ++c) {
          kf[c] = field(kx[c], ky[c], kp[c], evv, g_ev.grad[q], epv);
          hf[c] = field(hx[c], hy[c], hp[c], evv, g_ev.grad[q], epv);
        }
        for (Eigen::Index tq = 0; tq < trule.size(); ++tq) {
          Local U{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero(), 0.0};
          Eigen::Vector2d dv = Eigen::Vector2d::Zero();
          for (int b = 0; b < np1; ++b) {
            U.v += phi1(tq, b) * uf[b].v;
            U.g += phi1(tq, b) * uf[b].g;
            U.p += phi1(tq, b) * uf[b].p;
            dv += (dphi1(tq, b) / k) * uf[b].v;
          }
          const double divu = U.g.trace();
          const Eigen::Vector2d conv = nse ? Eigen::Vector2d(U.g * U.v) : Eigen::Vector2d::Zero();
          const double wt = -k * trule.weights(tq) * jxw[q];
          for (int which = 0; which < 2; ++which) {
            const std::vector<Local>& wf = which == 0 ? kf : hf;
            Local W{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero(), 0.0};
            for (int c = 0; c < np2; ++c) {
              W.v += phi2(tq, c) * wf[c].v;
              W.g += phi2(tq, c) * wf[c].g;
              W.p += phi2(tq, c) * wf[c].p;
            }
            const double base = (dv + conv).dot(W.v) + nu * (U.g.array() * W.g.array()).sum() - U.p * W.g.trace() +
                                divu * W.p;
            Eigen::Vector4d& e = which == 0 ? ek : eh;
            for (int l = 0; l < 4; ++l) {
              const Eigen::Vector2d gc = gchi.row(l).transpose();
              e(l) += wt * (base * chi(l) - U.p * W.v.dot(gc) + nu * W.v.dot(U.g * gc));
            }
          }
        }
        // jump at the start of the interval
        Eigen::Vector2d vplus = Eigen::Vector2d::Zero();
        for (int b = 0; b < np1; ++b) vplus += pb.values_at_start()(b) * uf[b].v;
        const Eigen::Vector2d jump = vplus - Eigen::Vector2d(pvv.dot(mx), pvv.dot(my));
        for (int which = 0; which < 2; ++which) {
          const std::vector<Local>& wf = which == 0 ? kf : hf;
          Eigen::Vector2d w0 = Eigen::Vector2d::Zero();
          for (int c = 0; c < np2; ++c) w0 += phi2_start(c) * wf[c].v;
          Eigen::Vector4d& e = which == 0 ? ek : eh;
          for (int l = 0; l < 4; ++l) e(l) -= jxw[q] * jump.dot(w0) * chi(l);
        }
      }
      for (int l = 0; l < 4; ++l) {
        const int d = pud[l];
        if (pu.space.kind(d) == ScalarLagrangeSpace::Kind::free) {
          out.eta_k(pu.free_index[d], m) += ek(l);
          out.eta_h(pu.free_index[d], m) += eh(l);
        } else {
          for (const auto& [master, c] : pu.space.constraint(d)) {
            out.eta_k(pu.free_index[master], m) += c * ek(l);
            out.eta_h(pu.free_index[master], m) += c * eh(l);
          }
        }
      }
    }
  }
  return out;
}

void unlocalized_totals(const AdjointSlab& slab, const Weights& w, Equation eq, const InflowData& inflow,
                        SlabIndicators& out) {
  const SlabForm form(eq, slab.u.slab, slab.operators, inflow, slab.incoming);
  const Eigen::VectorXd r = form.residual_full(slab.u.values);
  out.oracle_k = -r.dot(w.temporal.values);
  out.oracle_h = -r.dot(w.spatial.values);
}

std::optional<Effectivity> effectivity(double eta, double j_reference, double j_computed) {
  const double err = j_reference - j_computed;
  if (err == 0.0) return std::nullopt;
  return Effectivity{std::abs(eta / err), eta / err};
}

void write_indicator_csv(std::ostream& os, const ErrorIndicators& ind) {
  os << "slab,interval,vertex,eta_k,eta_h\n";
  os.precision(12);
  for (const auto& s : ind.slabs)
    for (Eigen::Index m = 0; m < s.eta_k.cols(); ++m)
      for (Eigen::Index i = 0; i < s.eta_k.rows(); ++i)
        os << s.slab << "," << s.first_interval + m << "," << s.pu_vertex[std::size_t(i)] << "," << s.eta_k(i, m)
           << "," << s.eta_h(i, m) << "\n";
}

void write_interval_csv(std::ostream& os, const ErrorIndicators& ind, const TemporalTriangulation& tri) {
  os << "interval,t_start,t_end,slab,eta_k,eta_h\n";
  os.precision(12);
  for (const auto& s : ind.slabs)
    for (Eigen::Index m = 0; m < s.eta_k.cols(); ++m) {
      const int g = s.first_interval + int(m);
      os << g << "," << tri.interval(g).t0 << "," << tri.interval(g).t1 << "," << s.slab << ","
         << s.eta_k.col(m).sum() << "," << s.eta_h.col(m).sum() << "\n";
    }
}

}  // namespace stdwr
