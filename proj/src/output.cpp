#include "stdwr/output.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace stdwr {

void write_report_csv(std::ostream& os, const std::vector<LoopRow>& rows) {
  os << "loop,primal_dofs,adjoint_dofs,spatial_dofs,slabs,intervals,eta_k,eta_h,eta,J,error,I_eff,I_eff_signed,"
        "max_newton,oracle_k,oracle_h,seconds\n";
  os.precision(12);
  for (const auto& r : rows) {
    os << r.loop << "," << r.primal_dofs << "," << r.adjoint_dofs << "," << r.spatial_dofs << "," << r.slabs << ","
       << r.intervals << "," << r.eta_k << "," << r.eta_h << "," << r.eta << ",";
    os.precision(17);
    os << r.j << ",";
    os.precision(12);
    if (r.error) os << *r.error;
    os << ",";
    if (r.effectivity) os << r.effectivity->absolute;
    os << ",";
    if (r.effectivity) os << r.effectivity->signed_value;
    os << "," << r.max_newton << "," << r.oracle_k << "," << r.oracle_h << "," << r.seconds << "\n";
  }
}

void write_study_csv(std::ostream& os, const std::vector<StudyEntry>& entries) {
  os << "space_level,time_level,spatial_dofs,intervals,temporal_dofs,eta_k,eta_h,eta,J,error,I_eff\n";
  os.precision(12);
  for (const auto& e : entries) {
    const LoopRow& r = e.row;
    const std::size_t nt = r.spatial_dofs ? r.primal_dofs / r.spatial_dofs : 0;
    os << e.space_level << "," << e.time_level << "," << r.spatial_dofs << "," << r.intervals << "," << nt << ","
       << r.eta_k << "," << r.eta_h << "," << r.eta << "," << r.j << ",";
    if (r.error) os << *r.error;
    os << ",";
    if (r.effectivity) os << r.effectivity->absolute;
    os << "\n";
  }
}

void write_solution_vtk(std::ostream& os, const TaylorHoodSpace& space, const Eigen::VectorXd& full) {
  const SpatialMesh& mesh = space.mesh();
  mesh.write_vtk(os);
  const std::size_t nvert = mesh.vertices().size();
  std::vector<double> vx(nvert, 0.0), vy(nvert, 0.0), p(nvert, 0.0);
  const int sv = space.velocity_degree(), sp = space.pressure_degree();
  static constexpr int cx[4] = {0, 1, 1, 0}, cy[4] = {0, 0, 1, 1};  // corner k of the reference square
  const Eigen::Index nv = space.n_velocity();
  for (int a = 0; a < mesh.n_active(); ++a) {
    const auto& cell = mesh.cell(mesh.active_cells()[a]);
    const int* dv = space.velocity().cell_dofs(a);
    const int* dp = space.pressure().cell_dofs(a);
    for (int k = 0; k < 4; ++k) {
      const int lv = cy[k] * sv * (sv + 1) + cx[k] * sv;
      const int lp = cy[k] * sp * (sp + 1) + cx[k] * sp;
      vx[cell.v[k]] = full(dv[lv]);
      vy[cell.v[k]] = full(nv + dv[lv]);
      p[cell.v[k]] = full(space.pressure_offset() + dp[lp]);
    }
  }
  os << "POINT_DATA " << nvert << "\nVECTORS velocity double\n";
  for (std::size_t i = 0; i < nvert; ++i) os << vx[i] << ' ' << vy[i] << " 0\n";
  os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nvert; ++i) os << p[i] << '\n';
}

namespace {
std::ofstream open(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}
}  // namespace

void write_loop_files(const std::filesystem::path& dir, const Config& cfg, const Evaluation& ev) {
  std::filesystem::create_directories(dir);
  const std::string tag = "loop" + std::to_string(ev.row.loop);
  {
    const Goal goal = cfg.make_goal();
    auto f = open(dir / ("trajectory_" + tag + ".csv"));
    write_trajectory_csv(f, trajectory(goal, ev.primal.solutions));
  }
  {
    auto f = open(dir / ("temporal_mesh_" + tag + ".csv"));
    ev.primal.triangulation.write_csv(f);
  }
  {
    auto f = open(dir / ("newton_" + tag + ".csv"));
    write_newton_csv(f, ev.primal);
  }
  if (!ev.indicators.slabs.empty()) {
    auto f = open(dir / ("indicators_" + tag + ".csv"));
    write_indicator_csv(f, ev.indicators);
    auto g = open(dir / ("interval_indicators_" + tag + ".csv"));
    write_interval_csv(g, ev.indicators, ev.primal.triangulation);
  }
  if (cfg.write_vtk) {
    const auto vdir = dir / ("vtk_" + tag);
    std::filesystem::create_directories(vdir);
    for (std::size_t n = 0; n < ev.primal.solutions.size(); ++n) {
      const auto& u = ev.primal.solutions[n];
      auto f = open(vdir / ("slab_" + std::to_string(n) + ".vtk"));
      write_solution_vtk(f, *u.slab.space, u.end_trace());
    }
  }
}

}  // namespace stdwr
