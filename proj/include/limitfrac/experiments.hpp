#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "limitfrac/config.hpp"
#include "limitfrac/coupling.hpp"
#include "limitfrac/mesh.hpp"
#include "limitfrac/mms.hpp"

namespace limitfrac {

/// Top boundary (0, u_top) and zero vertical displacement at the bottom.
fem::DirichletValues slit_dirichlet(const fem::DofMap& dofs, double u_top);

/// Nodal phi: 0 inside the seed band, 1 elsewhere.
fem::NodalField seed_phase_field(const fem::DofMap& dofs, const SeedSpec& seed, double h_min);

std::shared_ptr<mesh::QuadMesh> build_mesh(const MeshSpec& spec);

/// Mesh, DOFs and solver settings for one configuration.
struct Setup {
  std::shared_ptr<const mesh::QuadMesh> mesh;
  std::shared_ptr<const fem::DofMap> dofs;
  coupling::Problem problem;
  fem::NodalField phi0;
};
Setup make_setup(const RunConfig& cfg);

struct StaticResult {
  fem::NodalField u;
  fem::NodalField phi;
  int newton = 0;
  double max_ellipticity = 0.0;
};

/// Example 2: one mechanics solve on the slit geometry with phi = 1.
StaticResult solve_static_slit(const Setup& setup, const RunConfig& cfg,
                               std::ostream* iteration_log = nullptr);

/// Examples 3 and 4 (and custom phase-field runs).
coupling::Trajectory run_phase_field(const Setup& setup, const RunConfig& cfg,
                                     const coupling::RunHooks& hooks = {});

std::vector<postprocess::EnergyRecord> energies(const std::vector<coupling::StepRecord>& records);

/// Runs the configuration and writes its outputs under `out`:
/// config.txt, run_log.csv, iterations.csv, <quantity>_<step>.csv,
/// fields_<step>.vtk and (Example 1) convergence.csv.
int run_to_directory(const RunConfig& cfg, const std::filesystem::path& out,
                     std::ostream& console);

}  // namespace limitfrac
