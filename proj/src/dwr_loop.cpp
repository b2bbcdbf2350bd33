#include "stdwr/dwr_loop.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

namespace stdwr {

TemporalTriangulation initial_triangulation(const Config& cfg) {
  auto mesh = std::make_shared<SpatialMesh>(SpatialMesh::coarse(cfg.geometry()));
  if (cfg.initial_refinements > 0) mesh->refine_globally(cfg.initial_refinements);
  return TemporalTriangulation::uniform(cfg.end_time(), cfg.intervals, mesh, cfg.max_per_slab);
}

Evaluation evaluate_discretization(const Config& cfg, const TemporalTriangulation& tri, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  Evaluation ev;
  OperatorCache primal_cache(8);
  ev.primal = march_slabs(tri, cfg.primal, primal_cache, log);
  primal_cache.clear();
  const Goal goal = cfg.make_goal();
  LoopRow& row = ev.row;
  for (const auto& u : ev.primal.solutions) {
    row.j += goal.evaluate(u);
    row.spatial_dofs = std::max(row.spatial_dofs, std::size_t(u.slab.space->n_full()));
  }
  row.primal_dofs = ev.primal.total_dofs();
  row.slabs = tri.n_slabs();
  row.intervals = tri.n_intervals();
  for (const auto& nr : ev.primal.newton) row.max_newton = std::max(row.max_newton, nr.iterations());

  if (cfg.estimate && cfg.goal != GoalKind::none) {
    OperatorCache adjoint_cache(2);
    std::vector<SlabIndicators> slabs;
    solve_adjoint(
        ev.primal, cfg.primal, goal, cfg.adjoint, adjoint_cache,
        [&](const AdjointSlab& as) {
          const SpaceTimeVector& u = ev.primal.solutions[as.slab];
          const Weights w = compute_weights(as.z, u.slab.space, u.slab.basis);
          SlabIndicators si = compute_indicators(cfg.primal.equation, cfg.primal.nu, u, ev.primal.incoming[as.slab],
                                                 w, cfg.adjoint.quadrature, tri.slab_begin(as.slab));
          si.slab = as.slab;
          unlocalized_totals(as, w, cfg.primal.equation, cfg.primal.inflow, si);
          row.adjoint_dofs += std::size_t(as.z.slab.n_full());
          slabs.push_back(std::move(si));
        },
        log);
    std::reverse(slabs.begin(), slabs.end());
    ev.indicators.slabs = std::move(slabs);
    row.eta_k = ev.indicators.eta_k();
    row.eta_h = ev.indicators.eta_h();
    row.eta = row.eta_k + row.eta_h;
    row.oracle_k = ev.indicators.oracle_k();
    row.oracle_h = ev.indicators.oracle_h();
  }
  if (cfg.reference) {
    row.error = *cfg.reference - row.j;
    if (cfg.estimate) row.effectivity = effectivity(row.eta, *cfg.reference, row.j);
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ev;
}

void check_force_orientation(const Config& cfg) {
  if (cfg.goal != GoalKind::drag || !cfg.reference) return;
  // pressure falling downstream pushes the obstacle downstream, so its drag carries the sign of the reference
  const Goal goal = cfg.make_goal();
  auto space = std::make_shared<const TaylorHoodSpace>(initial_triangulation(cfg).mesh(0), cfg.primal.velocity_degree);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space->n_full());
  for (Eigen::Index i = 0; i < space->n_pressure(); ++i)
    u(space->pressure_offset() + i) = -space->pressure().support_point(int(i)).x();
  const double d = goal.drag_coefficient(space, u);
  if ((d > 0) != (*cfg.reference > 0))
    throw std::logic_error("drag sign self-check failed: normal orientation disagrees with the reference value");
}

RunReport run_dwr_loop(const Config& cfg, std::ostream* log, const LoopObserver& observer) {
  cfg.validate();
  check_force_orientation(cfg);
  RunReport report;
  report.config = cfg;
  TemporalTriangulation tri = initial_triangulation(cfg);
  for (int loop = 1; loop <= cfg.loops; ++loop) {
    if (log) *log << "== loop " << loop << ": " << tri.n_slabs() << " slabs, " << tri.n_intervals() << " intervals\n";
    Evaluation ev;
    try {
      ev = evaluate_discretization(cfg, tri, log);
    } catch (const NonconvergenceError& e) {
      report.failure = e.what();
      return report;
    }
    ev.row.loop = loop;
    report.rows.push_back(ev.row);
    if (observer) observer(ev);
    if (loop == cfg.loops) break;
    switch (cfg.refinement) {
      case RefinementMode::adaptive:
        if (!cfg.estimate) throw std::invalid_argument("adaptive refinement needs the estimator");
        tri = apply_refinement(tri, mark(ev.indicators, tri, cfg.marking));
        break;
      case RefinementMode::uniform: tri = refine_uniformly(tri, true, true); break;
      case RefinementMode::uniform_space: tri = refine_uniformly(tri, false, true); break;
      case RefinementMode::uniform_time: tri = refine_uniformly(tri, true, false); break;
    }
  }
  return report;
}

std::vector<StudyEntry> run_uniform_study(const Config& cfg, std::ostream* log) {
  cfg.validate();
  check_force_orientation(cfg);
  std::vector<StudyEntry> out;
  for (int s = 0; s < cfg.study_space_levels; ++s)
    for (int t = 0; t < cfg.study_time_levels; ++t) {
      Config c = cfg;
      c.initial_refinements = cfg.initial_refinements + s;
      c.intervals = cfg.intervals << t;
      if (log) *log << "== study space level " << s << ", time level " << t << "\n";
      StudyEntry e;
      e.space_level = s;
      e.time_level = t;
      e.row = evaluate_discretization(c, initial_triangulation(c), log).row;
      out.push_back(e);
    }
  return out;
}

}  // namespace stdwr
