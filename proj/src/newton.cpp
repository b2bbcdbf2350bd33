#include "stdwr/newton.hpp"

#include "stdwr/linear_solver.hpp"

#include <cmath>
#include <ostream>

namespace stdwr {

NewtonResult newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                          const LinearizationFactory& linearize, Eigen::VectorXd x0, const NewtonConfig& cfg,
                          int slab) {
  NewtonResult res;
  res.x = std::move(x0);
  Eigen::VectorXd r = residual(res.x);
  double rn = r.norm();
  res.initial_residual = rn;
  LinearSolve solve;
  bool reuse = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    bool fresh = false;
    if (!solve || !reuse) {
      solve = linearize(res.x);
      ++res.jacobians;
      fresh = true;
    }
    for (;;) {
      const Eigen::VectorXd delta = solve(-r);
      double step = 1.0;
      int ls = 0;
      bool accepted = false;
      Eigen::VectorXd cand, rc;
      for (; ls < cfg.max_line_search; ++ls, step *= cfg.damping) {
        cand = res.x + step * delta;
        rc = residual(cand);
        if (rc.norm() <= rn) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (rn <= cfg.tolerance) return res;  // already converged, step only adds roundoff
        if (fresh) throw NonconvergenceError("line search failed on slab " + std::to_string(slab), res.steps);
        // stale Jacobian: rebuild and retry the same iteration
        solve = linearize(res.x);
        ++res.jacobians;
        fresh = true;
        continue;
      }
      const double rcn = rc.norm();
      NewtonStep s;
      s.slab = slab;
      s.iteration = it;
      s.residual = rcn;
      s.theta = rn > 0 ? rcn / rn : 0.0;
      s.line_search = ls;
      s.reused = !fresh;
      res.steps.push_back(s);
      res.x = std::move(cand);
      r = std::move(rc);
      rn = rcn;
      reuse = s.theta <= cfg.theta_max;
      break;
    }
    if (rn <= cfg.tolerance) return res;
  }
  throw NonconvergenceError("Newton did not converge on slab " + std::to_string(slab), res.steps);
}

InitialGuess parse_initial_guess(const std::string& name) {
  if (name == "previous_trace" || name == "trace") return InitialGuess::previous_trace;
  if (name == "zero") return InitialGuess::zero;
  if (name == "extrapolation") return InitialGuess::extrapolation;
  throw std::invalid_argument("unknown initial guess: " + name);
}

std::string to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::previous_trace: return "previous_trace";
    case InitialGuess::zero: return "zero";
    case InitialGuess::extrapolation: return "extrapolation";
  }
  return "?";
}

std::size_t PrimalRun::total_dofs() const {
  std::size_t n = 0;
  for (const auto& s : solutions) n += std::size_t(s.slab.n_full());
  return n;
}

SlabSpace make_slab_space(const TemporalTriangulation& tri, int n, OperatorCache& cache, int velocity_degree,
                          int pressure_degree,
                          std::shared_ptr<const TemporalBasis> basis) {
  SlabSpace s;
  s.space = cache.space(tri.mesh(n), velocity_degree, pressure_degree);
  s.basis = std::move(basis);
  s.intervals = tri.slab_intervals(n);
  return s;
}

namespace {

Eigen::VectorXd extrapolated_guess(const SlabForm& form, const SpaceTimeVector& prev) {
  const SlabSpace& slab = form.slab();
  const int last = prev.slab.n_intervals() - 1;
  const Interval& pk = prev.slab.intervals[last];
  const Eigen::VectorXd start = prev.at_interval(last, 0.0);
  const Eigen::VectorXd end = prev.end_trace();
  const Eigen::VectorXd slope = (end - start) / pk.length();
  Eigen::VectorXd full(slab.n_full());
  const Eigen::Index n = slab.space->n_full();
  for (int m = 0; m < slab.n_intervals(); ++m)
    for (int a = 0; a < slab.basis->size(); ++a) {
      const double t = slab.intervals[m].from_reference(slab.basis->support_points()(a));
      full.segment(slab.offset(m, a), n) = end + (t - pk.t1) * slope;
    }
  return form.restrict_to_free(full);
}

}  // namespace

PrimalRun march_slabs(const TemporalTriangulation& tri, const PrimalSettings& st, OperatorCache& cache,
                      std::ostream* log) {
  PrimalRun run;
  run.triangulation = tri;
  run.basis = std::make_shared<const TemporalBasis>(st.temporal_degree, st.family);
  for (int n = 0; n < tri.n_slabs(); ++n) {
    SlabSpace slab = make_slab_space(tri, n, cache, st.velocity_degree, st.pressure_degree, run.basis);
    const auto ops = cache.operators(slab.space, st.nu, st.quadrature);
    Eigen::VectorXd incoming;
    if (n == 0) {
      incoming = Eigen::VectorXd::Zero(slab.space->n_full());
    } else {
      const SpaceTimeVector& prev = run.solutions.back();
      const Eigen::VectorXd trace = prev.end_trace();
      if (prev.slab.space == slab.space) {
        incoming = trace;
      } else if (same_active_cells(prev.slab.space->mesh(), slab.space->mesh())) {
        incoming = interpolation_matrix(*prev.slab.space, *slab.space) * trace;
      } else {
        const double t = slab.intervals.front().t0;
        TransferResult tr = transfer_trace(*prev.slab.space, trace, *slab.space, st.projection, st.inflow, t);
        TransferRecord rec;
        rec.slab = n;
        rec.time = t;
        rec.kind = st.projection;
        rec.identical = false;
        rec.divergence_residual = tr.divergence_residual;
        rec.first_residual = tr.first_residual;
        rec.max_multiplier = tr.multiplier.size() ? tr.multiplier.cwiseAbs().maxCoeff() : 0.0;
        run.transfers.push_back(rec);
        incoming = std::move(tr.values);
      }
    }
    const SlabForm form(st.equation, slab, ops, st.inflow, incoming);
    Eigen::VectorXd x0;
    if (n == 0 || st.guess == InitialGuess::zero)
      x0 = form.constant_guess(Eigen::VectorXd::Zero(slab.space->n_full()));
    else if (st.guess == InitialGuess::extrapolation && run.solutions.back().slab.space == slab.space)
      x0 = extrapolated_guess(form, run.solutions.back());
    else
      x0 = form.constant_guess(incoming);

    LinearizationFactory factory;
    if (form.linear()) {
      auto kron = cache.kronecker(ops, run.basis, false);
      factory = [kron, iv = slab.intervals](const Eigen::VectorXd&) -> LinearSolve {
        return [kron, iv](const Eigen::VectorXd& b) { return kron->solve(iv, b); };
      };
    } else {
      factory = [&form](const Eigen::VectorXd& x) -> LinearSolve {
        auto solver = std::make_shared<const DirectSolver>(form.jacobian(x));
        return [solver](const Eigen::VectorXd& b) { return solver->solve(b); };
      };
    }
    NewtonResult nr = newton_solve([&form](const Eigen::VectorXd& x) { return form.residual(x); }, factory,
                                   std::move(x0), st.newton, n);
    if (log)
      *log << "slab " << n << "/" << tri.n_slabs() << " t=[" << slab.intervals.front().t0 << ","
           << slab.intervals.back().t1 << "] dofs " << slab.n_full() << " newton " << nr.iterations()
           << " |R| " << (nr.steps.empty() ? nr.initial_residual : nr.steps.back().residual) << "\n";
    SpaceTimeVector u(slab);
    u.values = form.expand(nr.x);
    run.solutions.push_back(std::move(u));
    run.incoming.push_back(std::move(incoming));
    run.newton.push_back(std::move(nr));
  }
  return run;
}

void write_newton_csv(std::ostream& os, const PrimalRun& run) {
  os << "slab,iteration,residual,theta,line_search_steps,jacobian_reused\n";
  os.precision(10);
  for (const auto& nr : run.newton)
    for (const auto& s : nr.steps)
      os << s.slab << "," << s.iteration << "," << s.residual << "," << s.theta << "," << s.line_search << ","
         << (s.reused ? 1 : 0) << "\n";
}

}  // namespace stdwr
