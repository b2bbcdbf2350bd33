// End-to-end acceptance checks. One criterion per invocation: `stdwr_acceptance <n>`.
#include "stdwr/blas_guard.hpp"
#include "stdwr/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>

using namespace stdwr;

namespace {

bool verdict(int n, bool pass, const std::string& what) {
  std::printf("CRITERION %d %s: %s\n", n, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// One level of a uniform grid: `s` extra global refinements, 2^t times the intervals.
LoopRow level(Config cfg, int s, int t, bool estimate = true) {
  cfg.initial_refinements += s;
  cfg.intervals <<= t;
  cfg.estimate = estimate;
  cfg.loops = 1;
  const auto row = evaluate_discretization(cfg, initial_triangulation(cfg)).row;
  std::printf("  level (space %d, time %d): N_h %zu, intervals %d, J %.12g, eta_k %.5e, eta_h %.5e", s, t,
              row.spatial_dofs, row.intervals, row.j, row.eta_k, row.eta_h);
  if (row.effectivity) std::printf(", I_eff %.3f", row.effectivity->absolute);
  std::printf(", %.1f s\n", row.seconds);
  std::fflush(stdout);
  return row;
}

double rel_change(double from, double to) { return std::abs(to - from) / std::abs(from); }

// ---------------------------------------------------------------------------------------------

bool error_identity() {
  Config cfg = preset("stokes-2d3");
  cfg.primal.inflow.profile = TimeProfile::ramp;
  cfg.intervals = 10;
  cfg.loops = 1;
  cfg.primal.quadrature = cfg.adjoint.quadrature = 7;
  cfg.goal_line_points = cfg.goal_cell_points = 7;
  cfg.reference.reset();
  const auto tri = initial_triangulation(cfg);
  const Evaluation ev = evaluate_discretization(cfg, tri);

  PrimalSettings enriched = cfg.primal;
  enriched.velocity_degree = cfg.adjoint.velocity_degree;
  enriched.pressure_degree = cfg.adjoint.pressure_degree;
  enriched.temporal_degree = cfg.adjoint.temporal_degree;
  OperatorCache cache(4);
  const PrimalRun run = march_slabs(tri, enriched, cache, nullptr);
  const Goal goal = cfg.make_goal();
  double j_enriched = 0;
  for (const auto& u : run.solutions) j_enriched += goal.evaluate(u);

  const double j = ev.row.j, eta = ev.row.eta, diff = j_enriched - j;
  const double gap = std::abs(eta - diff), bound = 1e-8 * std::max(1.0, std::abs(j));
  std::printf("  J_kh %.15g, J_enriched %.15g, difference %.10e\n", j, j_enriched, diff);
  std::printf("  eta %.10e (eta_k %.4e, eta_h %.4e), gap %.3e, bound %.1e\n", eta, ev.row.eta_k, ev.row.eta_h, gap,
              bound);
  return verdict(1, gap <= bound, "error identity gap " + fmt("%.3e", gap) + " <= " + fmt("%.1e", bound));
}

bool pu_exactness() {
  bool ok = true;
  double worst = 0;
  for (const auto& name : preset_names()) {
    Config cfg = preset(name);
    cfg.loops = 1;
    const auto ev = evaluate_discretization(cfg, initial_triangulation(cfg));
    const double ek = ev.indicators.eta_k(), eh = ev.indicators.eta_h();
    const double ok_ = ev.indicators.oracle_k(), oh = ev.indicators.oracle_h();
    const double rk = std::abs(ek - ok_) / std::abs(ok_), rh = std::abs(eh - oh) / std::abs(oh);
    std::printf("  %s: sum eta_k %.16e vs %.16e (rel %.2e); sum eta_h %.16e vs %.16e (rel %.2e)\n", name.c_str(), ek,
                ok_, rk, eh, oh, rh);
    worst = std::max({worst, rk, rh});
    ok = ok && rk <= 1e-12 && rh <= 1e-12;
  }
  return verdict(2, ok, "largest relative localization error " + fmt("%.2e", worst) + " <= 1e-12");
}

bool jacobian_fd() {
  auto mesh = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::cylinder2d3));
  const auto tri = TemporalTriangulation::uniform(8.0, 20, mesh, 2);
  OperatorCache cache(4);
  const auto basis = std::make_shared<const TemporalBasis>(1, SupportFamily::gauss_legendre);
  const int n = tri.n_slabs() / 2;
  const SlabSpace slab = make_slab_space(tri, n, cache, 2, -1, basis);
  const auto ops = cache.operators(slab.space, 1e-3, 3);
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random = [&](Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (auto& x : v) x = uni(rng);
    return v;
  };
  const SlabForm form(Equation::navier_stokes, slab, ops, InflowData{}, random(slab.space->n_full()));
  const Eigen::VectorXd x = form.constant_guess(Eigen::VectorXd::Zero(slab.space->n_full())) +
                            random(form.n_unknowns());
  const Eigen::SparseMatrix<double> jac = form.jacobian(x);
  const double eps = 1e-5;
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd d = random(form.n_unknowns());
    d.normalize();
    const Eigen::VectorXd jd = jac * d;
    const Eigen::VectorXd fd = (form.residual(x + eps * d) - form.residual(x - eps * d)) / (2 * eps);
    worst = std::max(worst, (jd - fd).norm() / jd.norm());
  }
  std::printf("  slab %d, %td unknowns, worst relative error %.3e\n", n, form.n_unknowns(), worst);
  return verdict(3, worst <= 1e-6, "Jacobian vs central differences " + fmt("%.3e", worst) + " <= 1e-6");
}

bool newton_behaviour() {
  Config stokes = preset("stokes-2d3");
  stokes.estimate = false;
  stokes.loops = 1;
  const auto ps = evaluate_discretization(stokes, initial_triangulation(stokes)).primal;
  int stokes_max = 0, stokes_min = 1000;
  for (const auto& nr : ps.newton) {
    stokes_max = std::max(stokes_max, nr.iterations());
    stokes_min = std::min(stokes_min, nr.iterations());
  }
  Config nse = preset("nse-2d3");
  nse.estimate = false;
  nse.loops = 1;
  const auto pn = evaluate_discretization(nse, initial_triangulation(nse)).primal;
  int nse_max = 0;
  double worst_res = 0;
  for (const auto& nr : pn.newton) {
    nse_max = std::max(nse_max, nr.iterations());
    worst_res = std::max(worst_res, nr.steps.empty() ? nr.initial_residual : nr.steps.back().residual);
  }
  std::printf("  Stokes iterations per slab in [%d, %d]; NSE max %d, worst final |R| %.3e\n", stokes_min, stokes_max,
              nse_max, worst_res);
  const bool ok = stokes_min == 1 && stokes_max == 1 && nse_max <= 10 && worst_res <= 1e-10;
  return verdict(4, ok, "Stokes 1 iteration, NSE max " + std::to_string(nse_max) + " <= 10 iterations");
}

bool effectivity_trend() {
  const Config cfg = preset("stokes-2d3");
  const double target[3] = {0.61, 0.68, 0.72};
  bool ok = true;
  double prev = -1;
  std::string seq;
  for (int s = 0; s < 3; ++s) {
    const LoopRow r = level(cfg, s, 0);
    const double ie = r.effectivity ? r.effectivity->absolute : -1;
    if (s == 0) ok = ok && ie >= 0.45 && ie <= 0.80;
    ok = ok && std::abs(ie - target[s]) <= 0.15 && ie >= prev;
    prev = ie;
    seq += (s ? " -> " : "") + fmt("%.3f", ie);
  }
  return verdict(5, ok, "I_eff " + seq + " (targets 0.61 -> 0.68 -> 0.72)");
}

bool decoupling() {
  const Config cfg = preset("stokes-2d3");
  const LoopRow s1 = level(cfg, 1, 0), s2 = level(cfg, 2, 0);
  const double ck = rel_change(s1.eta_k, s2.eta_k);
  double ch = 0;
  for (int s = 0; s < 2; ++s) {
    const LoopRow a = level(cfg, s, 0), b = level(cfg, s, 1);
    ch = std::max(ch, rel_change(a.eta_h, b.eta_h));
  }
  std::printf("  eta_k change under spatial refinement %.2f%%, eta_h change under temporal refinement %.3f%%\n",
              100 * ck, 100 * ch);
  return verdict(6, ck <= 0.25 && ch <= 0.05,
                 "eta_k change " + fmt("%.2f%%", 100 * ck) + " <= 25%, eta_h change " + fmt("%.3f%%", 100 * ch) +
                     " <= 5%");
}

bool convergence_factors() {
  const Config cfg = preset("stokes-2d3");
  const LoopRow t0 = level(cfg, 0, 0), t1 = level(cfg, 0, 1), t2 = level(cfg, 0, 2);
  const LoopRow s1 = level(cfg, 1, 0), s2 = level(cfg, 2, 0);
  const double k1 = std::abs(t0.eta_k / t1.eta_k), k2 = std::abs(t1.eta_k / t2.eta_k);
  const double h1 = t0.eta_h / s1.eta_h, h2 = s1.eta_h / s2.eta_h;
  std::printf("  |eta_k| factors %.2f, %.2f; eta_h factors %.2f, %.2f\n", k1, k2, h1, h2);
  const bool ok = k1 >= 4 && k2 >= 4 && h1 >= 2.5 && h1 <= 4.5 && h2 >= 2.5 && h2 <= 4.5;
  return verdict(7, ok,
                 "temporal factors " + fmt("%.2f", k1) + ", " + fmt("%.2f", k2) + " >= 4; spatial factors " +
                     fmt("%.2f", h1) + ", " + fmt("%.2f", h2) + " in [2.5, 4.5]");
}

struct DynamicRun {
  double max_divergence = 0;
  double max_lift = 0;
  std::size_t transfers = 0;
};

DynamicRun adaptive_stokes(ProjectionKind kind) {
  Config cfg = preset("stokes-2d3");
  cfg.loops = 2;
  cfg.primal.projection = kind;
  DynamicRun out;
  const auto report = run_dwr_loop(cfg, nullptr, [&](const Evaluation& ev) {
    if (ev.row.loop != cfg.loops) return;
    for (const auto& t : ev.primal.transfers) out.max_divergence = std::max(out.max_divergence, t.divergence_residual);
    out.transfers = ev.primal.transfers.size();
    for (const auto& p : trajectory(cfg.make_goal(), ev.primal.solutions))
      out.max_lift = std::max(out.max_lift, std::abs(p.lift));
  });
  if (!report.failure.empty()) throw std::runtime_error(report.failure);
  std::printf("  %s: %zu mesh changes, max divergence residual %.3e, max |c_L| %.6f\n", to_string(kind).c_str(),
              out.transfers, out.max_divergence, out.max_lift);
  return out;
}

bool projections() {
  // identical meshes, discretely divergence-free input
  Config cfg = preset("stokes-2d3");
  cfg.primal.inflow.profile = TimeProfile::ramp;
  cfg.estimate = false;
  cfg.intervals = 4;
  const auto ev = evaluate_discretization(cfg, initial_triangulation(cfg));
  const SpaceTimeVector& last = ev.primal.solutions.back();
  const Eigen::VectorXd v = last.end_trace();
  const auto twin = std::make_shared<const TaylorHoodSpace>(
      std::make_shared<const SpatialMesh>(last.slab.space->mesh()), last.slab.space->velocity_degree());
  const Eigen::Index nv2 = 2 * twin->n_velocity();
  double identity_err = 0, same_div = 0;
  for (auto kind : {ProjectionKind::l2_divfree, ProjectionKind::h1_divfree}) {
    const auto tr = transfer_trace(*last.slab.space, v, *twin, kind, cfg.primal.inflow, cfg.end_time());
    identity_err = std::max(identity_err, (tr.values.head(nv2) - v.head(nv2)).cwiseAbs().maxCoeff());
    same_div = std::max(same_div, tr.divergence_residual);
  }
  std::printf("  identical meshes: max |Pi v - v| %.3e (input divergence %.3e)\n", identity_err,
              divergence_residual(*last.slab.space, v));

  const DynamicRun none = adaptive_stokes(ProjectionKind::none);
  const DynamicRun l2 = adaptive_stokes(ProjectionKind::l2_divfree);
  const DynamicRun h1 = adaptive_stokes(ProjectionKind::h1_divfree);
  const double div = std::max({l2.max_divergence, h1.max_divergence, same_div});
  const bool ok = l2.transfers > 0 && identity_err <= 1e-10 && div <= 1e-10 && l2.max_lift <= none.max_lift;
  return verdict(8, ok,
                 "divergence " + fmt("%.2e", div) + " <= 1e-10, identity " + fmt("%.2e", identity_err) +
                     " <= 1e-10, max|c_L| l2 " + fmt("%.5f", l2.max_lift) + " <= none " + fmt("%.5f", none.max_lift));
}

bool adaptive_efficiency() {
  Config adaptive = preset("stokes-2d3");
  adaptive.loops = 3;
  Config uniform = adaptive;
  uniform.refinement = RefinementMode::uniform;
  uniform.estimate = false;
  auto print = [](const char* what, const RunReport& r) {
    for (const auto& row : r.rows)
      std::printf("  %s loop %d: %zu primal DoFs, %d slabs, |error| %.4e\n", what, row.loop, row.primal_dofs,
                  row.slabs, std::abs(*row.error));
    std::fflush(stdout);
  };
  const RunReport ra = run_dwr_loop(adaptive);
  print("adaptive", ra);
  const RunReport ru = run_dwr_loop(uniform);
  print("uniform", ru);
  auto best = [](const RunReport& r) {
    double e = INFINITY;
    for (const auto& row : r.rows) e = std::min(e, std::abs(*row.error));
    return e;
  };
  const double tol = std::max(best(ra), best(ru));
  auto dofs_to_reach = [tol](const RunReport& r) {
    for (const auto& row : r.rows)
      if (std::abs(*row.error) <= tol) return double(row.primal_dofs);
    return double(INFINITY);
  };
  const double da = dofs_to_reach(ra), du = dofs_to_reach(ru);
  std::printf("  common error level %.4e: adaptive %.0f DoFs, uniform %.0f DoFs, ratio %.3f\n", tol, da, du, da / du);
  return verdict(9, da <= 0.7 * du, "adaptive/uniform DoF ratio " + fmt("%.3f", da / du) + " <= 0.7");
}

bool backward_step() {
  const Config cfg = preset("bfs-vorticity");
  const LoopRow a = level(cfg, 0, 0, false), b = level(cfg, 1, 1, false);
  const double ea = rel_change(506.20900857749609, a.j), eb = rel_change(510.27887058685025, b.j);
  std::printf("  deviations %.3f%%, %.3f%%\n", 100 * ea, 100 * eb);
  return verdict(10, ea <= 0.02 && eb <= 0.02 && b.j > a.j,
                 "J_vort " + fmt("%.4f", a.j) + " -> " + fmt("%.4f", b.j) + " within 2% of 506.209 -> 510.279");
}

bool benchmark_sanity() {
  const Config stokes = preset("stokes-2d3");
  const LoopRow s = level(stokes, 1, 1, false);
  const double ds = rel_change(*stokes.reference, s.j);
  const Config nse = preset("nse-2d3");
  const LoopRow n0 = level(nse, 0, 0, false), n1 = level(nse, 1, 1, false);
  const double e0 = std::abs(*n0.error), e1 = std::abs(*n1.error);
  std::printf("  Stokes drag deviation %.2f%%; NSE errors %.4e -> %.4e (reference runs 5.5869e-1 -> 2.9690e-1)\n", 100 * ds, e0,
              e1);
  return verdict(11, ds <= 0.10 && e0 > e1,
                 "Stokes drag " + fmt("%.5f", s.j) + " within 10%, NSE error " + fmt("%.3e", e0) + " > " +
                     fmt("%.3e", e1));
}

}  // namespace

int main(int argc, char** argv) {
  ensure_working_blas(argv);
  const std::map<int, std::function<bool()>> criteria{
      {1, error_identity},      {2, pu_exactness},         {3, jacobian_fd},     {4, newton_behaviour},
      {5, effectivity_trend},   {6, decoupling},           {7, convergence_factors}, {8, projections},
      {9, adaptive_efficiency}, {10, backward_step},       {11, benchmark_sanity}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [n, f] : criteria) which.push_back(n);
  bool all = true;
  for (int n : which) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    try {
      all = it->second() && all;
    } catch (const std::exception& e) {
      all = verdict(n, false, std::string("exception: ") + e.what()) && all;
    }
  }
  return all ? 0 : 1;
}
