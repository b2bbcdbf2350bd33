#include "stdwr/adjoint.hpp"

#include "stdwr/linear_solver.hpp"

#include <ostream>

namespace stdwr {

void solve_adjoint(const PrimalRun& primal, const PrimalSettings& st, const Goal& goal, const AdjointSettings& adj,
                   OperatorCache& cache, const AdjointCallback& callback, std::ostream* log) {
  const TemporalTriangulation& tri = primal.triangulation;
  const auto basis = std::make_shared<const TemporalBasis>(adj.temporal_degree, st.family);
  Eigen::VectorXd zplus;
  std::shared_ptr<const TaylorHoodSpace> zplus_space;
  for (int n = tri.n_slabs() - 1; n >= 0; --n) {
    const SpaceTimeVector& u = primal.solutions[n];
    SlabSpace slab = make_slab_space(tri, n, cache, adj.velocity_degree, adj.pressure_degree, basis);
    const auto ops = cache.operators(slab.space, st.nu, adj.quadrature);
    const TaylorHoodSpace& sp = *slab.space;

    AdjointSlab out;
    out.slab = n;
    out.operators = ops;
    out.u = embed(u, slab.space, basis);
    out.incoming = interpolation_matrix(*u.slab.space, sp) * primal.incoming[n];

    Eigen::VectorXd rhs_full = goal.derivative(out.u);
    if (zplus_space) {
      Eigen::VectorXd zp;
      if (zplus_space == slab.space)
        zp = zplus;
      else if (same_active_cells(zplus_space->mesh(), sp.mesh()))
        zp = interpolation_matrix(*zplus_space, sp) * zplus;
      else
        zp = interpolate_across_meshes(*zplus_space, zplus, sp);
      const Eigen::VectorXd mz = ops->mass * zp;
      const int last = slab.n_intervals() - 1;
      for (int b = 0; b < basis->size(); ++b)
        rhs_full.segment(slab.offset(last, b), sp.n_full()) += basis->values_at_end()(b) * mz;
    }
    const SlabForm form(st.equation, slab, ops, st.inflow, out.incoming);
    const Eigen::VectorXd rhs = form.condense(rhs_full);
    Eigen::VectorXd z;
    if (form.linear()) {
      z = cache.kronecker(ops, basis, true)->solve(slab.intervals, rhs);
    } else {
      const Eigen::SparseMatrix<double> jt = form.jacobian_at(out.u.values).transpose();
      z = DirectSolver(jt).solve(rhs);
    }
    out.z = SpaceTimeVector(slab);
    const Eigen::VectorXd zero_d = Eigen::VectorXd::Zero(sp.n_dirichlet());
    for (int m = 0; m < slab.n_intervals(); ++m)
      for (int a = 0; a < basis->size(); ++a)
        out.z.block(m, a) = sp.expand(z.segment(slab.free_offset(m, a), sp.n_free()), zero_d);
    zplus = out.z.at_interval(0, 0.0);
    zplus_space = slab.space;
    if (log) *log << "adjoint slab " << n << " dofs " << slab.n_full() << "\n";
    callback(out);
  }
}

}  // namespace stdwr
