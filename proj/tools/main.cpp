#include "stdwr/blas_guard.hpp"
#include "stdwr/output.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace stdwr;

namespace {

struct Common {
  std::string preset;
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out = "out";
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--preset", c.preset, "named parameter set")->check(CLI::IsMember(preset_names()));
  app->add_option("--config", c.config_file, "key = value file applied after the preset")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "override a key, e.g. --set loops=2")->take_all();
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--quiet", c.quiet, "no progress log");
}

Config load(const Common& c) {
  Config cfg = c.preset.empty() ? Config{} : preset(c.preset);
  if (!c.config_file.empty()) {
    std::ifstream f(c.config_file);
    cfg = read_config(f, cfg);
  }
  apply_overrides(cfg, c.overrides);
  cfg.validate();
  return cfg;
}

void save_config(const fs::path& dir, const Config& cfg) {
  fs::create_directories(dir);
  std::ofstream f(dir / "config.txt");
  cfg.write(f);
}

int run(const Common& c) {
  const Config cfg = load(c);
  const fs::path dir(c.out);
  save_config(dir, cfg);
  std::ostream* log = c.quiet ? nullptr : &std::cerr;
  std::vector<LoopRow> so_far;
  const RunReport rep = run_dwr_loop(cfg, log, [&](const Evaluation& ev) {
    write_loop_files(dir, cfg, ev);
    so_far.push_back(ev.row);
    std::ofstream f(dir / "report.csv");  // rewritten each loop so a killed run leaves partial results
    write_report_csv(f, so_far);
  });
  {
    std::ofstream f(dir / "report.csv");
    write_report_csv(f, rep.rows);
  }
  write_report_csv(std::cout, rep.rows);
  if (!rep.failure.empty()) {
    std::cerr << "run aborted: " << rep.failure << "\n";
    return 2;
  }
  return 0;
}

int study(const Common& c) {
  const Config cfg = load(c);
  const fs::path dir(c.out);
  save_config(dir, cfg);
  const auto entries = run_uniform_study(cfg, c.quiet ? nullptr : &std::cerr);
  std::ofstream f(dir / "study.csv");
  write_study_csv(f, entries);
  write_study_csv(std::cout, entries);
  return 0;
}

int mesh(const std::string& geometry, int refinements, const std::string& out) {
  SpatialMesh m = SpatialMesh::coarse(parse_geometry(geometry));
  m.refine_globally(refinements);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  m.write_vtk(f);
  const TaylorHoodSpace space(std::make_shared<const SpatialMesh>(m), 2);
  std::cout << "cells " << m.n_active() << ", Q2/Q1 dofs " << space.n_full() << ", area " << m.area() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ensure_working_blas(argv);
  CLI::App app{"space-time finite elements with goal-oriented adaptivity for (Navier-)Stokes"};
  app.require_subcommand(1);
  Common rc, sc;
  auto* run_cmd = app.add_subcommand("run", "DWR loop: solve, estimate, refine");
  add_common(run_cmd, rc);
  auto* study_cmd = app.add_subcommand("study", "uniform grid search over space and time levels");
  add_common(study_cmd, sc);
  std::string geometry = "cylinder2d3", mesh_out = "mesh.vtk";
  int refinements = 0;
  auto* mesh_cmd = app.add_subcommand("mesh", "export a coarse mesh, optionally refined");
  mesh_cmd->add_option("--geometry", geometry)->check(CLI::IsMember({"cylinder2d3", "backward_step", "unit_square"}));
  mesh_cmd->add_option("--refinements", refinements)->check(CLI::NonNegativeNumber);
  mesh_cmd->add_option("--out", mesh_out);
  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(rc);
    if (*study_cmd) return study(sc);
    if (*mesh_cmd) return mesh(geometry, refinements, mesh_out);
  } catch (const NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
