#include "stdwr/taylor_hood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stdwr {

TimeProfile parse_time_profile(const std::string& name) {
  if (name == "sine") return TimeProfile::sine;
  if (name == "ramp") return TimeProfile::ramp;
  if (name == "zero") return TimeProfile::zero;
  throw std::invalid_argument("unknown inflow time profile '" + name + "'");
}

std::string to_string(TimeProfile p) {
  switch (p) {
    case TimeProfile::sine: return "sine";
    case TimeProfile::ramp: return "ramp";
    case TimeProfile::zero: return "zero";
  }
  return "?";
}

double InflowData::time_factor(double t) const {
  switch (profile) {
    case TimeProfile::sine: return std::sin(std::numbers::pi * t / 8.0);
    case TimeProfile::ramp: return t / end_time;
    case TimeProfile::zero: return 0.0;
  }
  return 0.0;
}

double InflowData::profile_x(const Eigen::Vector2d& x) const {
  const double y = x.y();
  switch (geometry) {
    case Geometry::cylinder2d3: return 6.0 * y * (0.41 - y) / (0.41 * 0.41);
    case Geometry::backward_step: return 80.0 * (-1.0 + (3.0 - 2.0 * y) * y);
    case Geometry::unit_square: return 4.0 * y * (1.0 - y);
  }
  return 0.0;
}

namespace {
bool velocity_dirichlet(Boundary b) {
  return b == Boundary::inflow || b == Boundary::wall || b == Boundary::circle;
}
bool never(Boundary) { return false; }
}  // namespace

TaylorHoodSpace::TaylorHoodSpace(std::shared_ptr<const SpatialMesh> mesh, int velocity_degree, int pressure_degree)
    : mesh_(std::move(mesh)),
      velocity_(mesh_, velocity_degree, velocity_dirichlet),
      pressure_(mesh_, pressure_degree > 0 ? pressure_degree : velocity_degree - 1, never) {
  if (velocity_degree < 2) throw std::invalid_argument("Taylor-Hood pairs need velocity degree >= 2");
  if (pressure_.degree() >= velocity_degree) throw std::invalid_argument("pressure degree must be below the velocity degree");
  const Eigen::Index nv = n_velocity(), nf = n_full();
  full_to_free_.assign(nf, -1);
  std::vector<int> full_to_dir(nf, -1);
  auto scalar = [&](Eigen::Index i) -> std::pair<const ScalarLagrangeSpace*, int> {
    if (i < nv) return {&velocity_, int(i)};
    if (i < 2 * nv) return {&velocity_, int(i - nv)};
    return {&pressure_, int(i - 2 * nv)};
  };
  for (Eigen::Index i = 0; i < nf; ++i) {
    const auto [sp, d] = scalar(i);
    switch (sp->kind(d)) {
      case ScalarLagrangeSpace::Kind::free:
        full_to_free_[i] = int(free_to_full_.size());
        free_to_full_.push_back(int(i));
        break;
      case ScalarLagrangeSpace::Kind::dirichlet:
        full_to_dir[i] = int(dirichlet_to_full_.size());
        dirichlet_to_full_.push_back(int(i));
        break;
      default: break;
    }
  }
  std::vector<Eigen::Triplet<double>> tc, tg;
  for (Eigen::Index i = 0; i < nf; ++i) {
    const auto [sp, d] = scalar(i);
    const Eigen::Index base = i - d;
    switch (sp->kind(d)) {
      case ScalarLagrangeSpace::Kind::free: tc.emplace_back(int(i), full_to_free_[i], 1.0); break;
      case ScalarLagrangeSpace::Kind::dirichlet: tg.emplace_back(int(i), full_to_dir[i], 1.0); break;
      case ScalarLagrangeSpace::Kind::hanging:
        for (const auto& [master, w] : sp->constraint(d)) {
          const Eigen::Index mf = base + master;
          if (full_to_free_[mf] >= 0)
            tc.emplace_back(int(i), full_to_free_[mf], w);
          else
            tg.emplace_back(int(i), full_to_dir[mf], w);
        }
        break;
    }
  }
  c_.resize(nf, n_free());
  c_.setFromTriplets(tc.begin(), tc.end());
  g_.resize(nf, n_dirichlet());
  g_.setFromTriplets(tg.begin(), tg.end());
}

Eigen::VectorXd TaylorHoodSpace::dirichlet_values(const InflowData& data, double t) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_dirichlet());
  const double factor = data.time_factor(t);
  for (Eigen::Index j = 0; j < n_dirichlet(); ++j) {
    const int i = dirichlet_to_full_[j];
    if (i >= n_velocity()) continue;  // y-component and pressure are homogeneous
    if (velocity_.boundary(i) == Boundary::inflow) d(j) = factor * data.profile_x(velocity_.support_point(i));
  }
  return d;
}

Eigen::VectorXd TaylorHoodSpace::expand(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
  return c_ * x + g_ * d;
}

Eigen::VectorXd TaylorHoodSpace::restrict_to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd x(n_free());
  for (Eigen::Index j = 0; j < n_free(); ++j) x(j) = full(free_to_full_[j]);
  return x;
}

void TaylorHoodSpace::distribute(Eigen::VectorXd& full) const {
  const Eigen::Index nv = n_velocity();
  velocity_.distribute(full.segment(0, nv));
  velocity_.distribute(full.segment(nv, nv));
  pressure_.distribute(full.segment(2 * nv, n_pressure()));
}

void TaylorHoodSpace::set_dirichlet(Eigen::VectorXd& full, const Eigen::VectorXd& d) const {
  for (Eigen::Index j = 0; j < n_dirichlet(); ++j) full(dirichlet_to_full_[j]) = d(j);
}

void TaylorHoodSpace::cell_full_dofs(int active, std::vector<int>& vx, std::vector<int>& vy,
                                     std::vector<int>& p) const {
  const int nvl = velocity_.element().n_dofs(), npl = pressure_.element().n_dofs();
  const int nv = int(n_velocity());
  vx.resize(nvl);
  vy.resize(nvl);
  p.resize(npl);
  const int* dv = velocity_.cell_dofs(active);
  const int* dp = pressure_.cell_dofs(active);
  for (int i = 0; i < nvl; ++i) {
    vx[i] = dv[i];
    vy[i] = nv + dv[i];
  }
  for (int i = 0; i < npl; ++i) p[i] = 2 * nv + dp[i];
}

int SlabSpace::interval_containing(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(intervals.back().t1));
  for (int m = 0; m < n_intervals(); ++m)
    if (t <= intervals[m].t1 + tol && t >= intervals[m].t0 - tol) return m;
  throw std::domain_error("time outside the slab");
}

Eigen::VectorXd SpaceTimeVector::at_interval(int m, double tau) const {
  const Eigen::VectorXd phi = slab.basis->lagrange().values(tau);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(slab.space->n_full());
  for (int b = 0; b < slab.basis->size(); ++b) out += phi(b) * block(m, b);
  return out;
}

Eigen::VectorXd SpaceTimeVector::at(double t) const {
  const int m = slab.interval_containing(t);
  return at_interval(m, std::clamp(slab.intervals[m].to_reference(t), 0.0, 1.0));
}

FieldValue evaluate_in_cell(const TaylorHoodSpace& space, const Eigen::VectorXd& full, int active,
                            const Eigen::Vector2d& xi) {
  const SpatialMesh& mesh = space.mesh();
  const CellGeometry geo(mesh.corners(mesh.active_cells()[active]));
  const Eigen::Matrix2d jinv = geo.jacobian(xi).inverse();
  Eigen::VectorXd val;
  Eigen::MatrixX2d grad;
  space.velocity().element().values(xi, val);
  space.velocity().element().gradients(xi, grad);
  const Eigen::MatrixX2d gphys = grad * jinv;
  const int* dv = space.velocity().cell_dofs(active);
  const Eigen::Index nv = space.n_velocity();
  FieldValue f;
  for (int i = 0; i < val.size(); ++i) {
    const double ux = full(dv[i]), uy = full(nv + dv[i]);
    f.v += Eigen::Vector2d(ux, uy) * val(i);
    f.grad.row(0) += ux * gphys.row(i);
    f.grad.row(1) += uy * gphys.row(i);
  }
  Eigen::VectorXd pv;
  space.pressure().element().values(xi, pv);
  const int* dp = space.pressure().cell_dofs(active);
  for (int i = 0; i < pv.size(); ++i) f.p += pv(i) * full(space.pressure_offset() + dp[i]);
  return f;
}

namespace {
double outside_distance(const Eigen::Vector2d& xi) {
  const double dx = std::max({0.0, -xi.x(), xi.x() - 1.0});
  const double dy = std::max({0.0, -xi.y(), xi.y() - 1.0});
  return dx + dy;
}
}  // namespace

PointLocation locate(const SpatialMesh& mesh, const Eigen::Vector2d& x, double tol) {
  PointLocation best;
  double best_d = std::numeric_limits<double>::max();
  for (int a = 0; a < mesh.n_active(); ++a) {
    const CellGeometry geo(mesh.corners(mesh.active_cells()[a]));
    const Eigen::Vector2d xi = geo.inverse_map(x);
    const double d = outside_distance(xi);
    if (d <= tol) return {a, xi};
    if (d < best_d) {
      best_d = d;
      best = {a, xi};
    }
  }
  if (best_d > 1e-6) return {};
  return best;
}

PointLocation locate_in_hierarchy(const SpatialMesh& source, const SpatialMesh& target, int target_cell,
                                  const Eigen::Vector2d& x) {
  const CellKey key = target.key(target_cell);
  const int id = source.deepest_existing(key);
  const auto& cell = source.cell(id);
  if (cell.active) {
    const CellGeometry geo(source.corners(id));
    return {source.active_index(id), geo.inverse_map(x)};
  }
  PointLocation best;
  double best_d = std::numeric_limits<double>::max();
  for (int d : source.active_descendants(id)) {
    const CellGeometry geo(source.corners(d));
    const Eigen::Vector2d xi = geo.inverse_map(x);
    const double dist = outside_distance(xi);
    if (dist < best_d) {
      best_d = dist;
      best = {source.active_index(d), xi};
      if (dist <= 1e-12) break;
    }
  }
  return best;
}

bool same_active_cells(const SpatialMesh& a, const SpatialMesh& b) {
  if (&a == &b) return true;
  if (a.n_active() != b.n_active()) return false;
  for (int i = 0; i < a.n_active(); ++i)
    if (!(a.key(a.active_cells()[i]) == b.key(b.active_cells()[i]))) return false;
  return true;
}

namespace {

// rows of non-hanging target DoFs, then expand hanging rows through their masters
Eigen::SparseMatrix<double> expand_hanging_rows(const TaylorHoodSpace& to,
                                                const std::vector<Eigen::Triplet<double>>& base, Eigen::Index cols) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> b(to.n_full(), cols);
  b.setFromTriplets(base.begin(), base.end());
  std::vector<Eigen::Triplet<double>> out;
  const Eigen::Index nv = to.n_velocity();
  for (Eigen::Index i = 0; i < to.n_full(); ++i) {
    const ScalarLagrangeSpace& sp = i < 2 * nv ? to.velocity() : to.pressure();
    const Eigen::Index off = i < nv ? 0 : (i < 2 * nv ? nv : 2 * nv);
    const int d = int(i - off);
    if (sp.kind(d) == ScalarLagrangeSpace::Kind::hanging) {
      for (const auto& [master, w] : sp.constraint(d))
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(b, off + master); it; ++it)
          out.emplace_back(int(i), int(it.col()), w * it.value());
    } else {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(b, i); it; ++it)
        out.emplace_back(int(i), int(it.col()), it.value());
    }
  }
  Eigen::SparseMatrix<double> m(to.n_full(), cols);
  m.setFromTriplets(out.begin(), out.end());
  m.prune(1e-15, 1.0);
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> interpolation_matrix(const TaylorHoodSpace& from, const TaylorHoodSpace& to) {
  if (!same_active_cells(from.mesh(), to.mesh())) throw std::invalid_argument("interpolation_matrix: mesh mismatch");
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> seen(to.n_full(), 0);
  const Eigen::Index nvf = from.n_velocity(), nvt = to.n_velocity();
  Eigen::VectorXd val;
  for (int a = 0; a < to.mesh().n_active(); ++a) {
    const int* tv = to.velocity().cell_dofs(a);
    const int* fv = from.velocity().cell_dofs(a);
    for (int loc = 0; loc < to.velocity().element().n_dofs(); ++loc) {
      const int d = tv[loc];
      if (seen[d]) continue;
      seen[d] = 1;
      from.velocity().element().values(to.velocity().element().node(loc), val);
      for (int j = 0; j < val.size(); ++j) {
        if (std::abs(val(j)) < 1e-15) continue;
        trip.emplace_back(d, fv[j], val(j));
        trip.emplace_back(int(nvt + d), int(nvf + fv[j]), val(j));
      }
    }
    const int* tp = to.pressure().cell_dofs(a);
    const int* fp = from.pressure().cell_dofs(a);
    for (int loc = 0; loc < to.pressure().element().n_dofs(); ++loc) {
      const int d = int(to.pressure_offset()) + tp[loc];
      if (seen[d]) continue;
      seen[d] = 1;
      from.pressure().element().values(to.pressure().element().node(loc), val);
      for (int j = 0; j < val.size(); ++j)
        if (std::abs(val(j)) >= 1e-15) trip.emplace_back(d, int(from.pressure_offset()) + fp[j], val(j));
    }
  }
  return expand_hanging_rows(to, trip, from.n_full());
}

Eigen::VectorXd interpolate_across_meshes(const TaylorHoodSpace& from, const Eigen::VectorXd& full,
                                          const TaylorHoodSpace& to) {
  if (same_active_cells(from.mesh(), to.mesh())) return interpolation_matrix(from, to) * full;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(to.n_full());
  std::vector<char> seen(to.n_full(), 0);
  const SpatialMesh& tm = to.mesh();
  const Eigen::Index nvt = to.n_velocity();
  for (int a = 0; a < tm.n_active(); ++a) {
    const int id = tm.active_cells()[a];
    const CellGeometry geo(tm.corners(id));
    const int* tv = to.velocity().cell_dofs(a);
    for (int loc = 0; loc < to.velocity().element().n_dofs(); ++loc) {
      if (seen[tv[loc]]) continue;
      seen[tv[loc]] = 1;
      const Eigen::Vector2d x = geo.map(to.velocity().element().node(loc));
      const auto where = locate_in_hierarchy(from.mesh(), tm, id, x);
      const FieldValue f = evaluate_in_cell(from, full, where.active, where.xi);
      out(tv[loc]) = f.v.x();
      out(nvt + tv[loc]) = f.v.y();
    }
    const int* tp = to.pressure().cell_dofs(a);
    for (int loc = 0; loc < to.pressure().element().n_dofs(); ++loc) {
      const Eigen::Index d = to.pressure_offset() + tp[loc];
      if (seen[d]) continue;
      seen[d] = 1;
      const Eigen::Vector2d x = geo.map(to.pressure().element().node(loc));
      const auto where = locate_in_hierarchy(from.mesh(), tm, id, x);
      out(d) = evaluate_in_cell(from, full, where.active, where.xi).p;
    }
  }
  to.distribute(out);
  return out;
}

SpaceTimeVector interpolate_space(const SpaceTimeVector& v, std::shared_ptr<const TaylorHoodSpace> to) {
  const Eigen::SparseMatrix<double> p = interpolation_matrix(*v.slab.space, *to);
  SlabSpace slab = v.slab;
  slab.space = std::move(to);
  SpaceTimeVector out(slab);
  for (int m = 0; m < slab.n_intervals(); ++m)
    for (int a = 0; a < slab.basis->size(); ++a) out.block(m, a) = p * v.block(m, a);
  return out;
}

SpaceTimeVector interpolate_time(const SpaceTimeVector& v, std::shared_ptr<const TemporalBasis> to) {
  SlabSpace slab = v.slab;
  slab.basis = std::move(to);
  SpaceTimeVector out(slab);
  for (int a = 0; a < slab.basis->size(); ++a) {
    const Eigen::VectorXd phi = v.slab.basis->lagrange().values(slab.basis->support_points()(a));
    for (int m = 0; m < slab.n_intervals(); ++m)
      for (int b = 0; b < v.slab.basis->size(); ++b) out.block(m, a) += phi(b) * v.block(m, b);
  }
  return out;
}

SpaceTimeVector embed(const SpaceTimeVector& v, std::shared_ptr<const TaylorHoodSpace> space,
                      std::shared_ptr<const TemporalBasis> basis) {
  return interpolate_time(interpolate_space(v, std::move(space)), std::move(basis));
}

FieldValue evaluate(const SpaceTimeVector& v, double t, const Eigen::Vector2d& x) {
  const Eigen::VectorXd u = v.at(t);
  const auto where = locate(v.slab.space->mesh(), x);
  if (where.active < 0) throw std::domain_error("point outside the domain");
  return evaluate_in_cell(*v.slab.space, u, where.active, where.xi);
}

}  // namespace stdwr
