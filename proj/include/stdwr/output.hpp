#pragma once

#include "stdwr/dwr_loop.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace stdwr {

void write_report_csv(std::ostream& os, const std::vector<LoopRow>& rows);
void write_study_csv(std::ostream& os, const std::vector<StudyEntry>& entries);
/// Legacy VTK of a velocity-pressure state: vertex values of v and p, cell refinement level.
void write_solution_vtk(std::ostream& os, const TaylorHoodSpace& space, const Eigen::VectorXd& full);

/// All per-loop files of a run: trajectory, temporal mesh, Newton log, indicators, optional VTK series.
void write_loop_files(const std::filesystem::path& dir, const Config& cfg, const Evaluation& ev);

}  // namespace stdwr
