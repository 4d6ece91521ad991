#include "limitfrac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "limitfrac/errors.hpp"
#include "limitfrac/postprocess.hpp"

namespace limitfrac {

namespace fs = std::filesystem;
using fem::NodalField;

fem::DirichletValues slit_dirichlet(const fem::DofMap& dofs, double u_top) {
  fem::DirichletValues bc;
  for (int n : dofs.boundary_nodes(fem::BoundaryId::top)) {
    bc.emplace_back(2 * n, 0.0);
    bc.emplace_back(2 * n + 1, u_top);
  }
  for (int n : dofs.boundary_nodes(fem::BoundaryId::bottom)) bc.emplace_back(2 * n + 1, 0.0);
  return bc;
}

NodalField seed_phase_field(const fem::DofMap& dofs, const SeedSpec& seed, double h_min) {
  NodalField phi = NodalField::constant(fem::FieldKind::phasefield, dofs, 1.0);
  if (!seed.enabled) return phi;
  const double hw = seed.half_width.resolve(h_min);
  const double tol = 1e-12;
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const auto p = dofs.node_point(n);
    if (p.x >= seed.x0 - tol && p.x <= seed.x1 + tol && std::abs(p.y - seed.y) <= hw + tol)
      phi.values(n) = 0.0;
  }
  fem::distribute_constraints(dofs, 1, phi.values);
  return phi;
}

std::shared_ptr<mesh::QuadMesh> build_mesh(const MeshSpec& spec) {
  auto m = std::make_shared<mesh::QuadMesh>(mesh::QuadMesh::unit_square());
  m->refine_global(spec.global_levels);
  for (const auto& b : spec.boxes) m->refine_where(mesh::box_marker(b.box), b.levels);
  return m;
}

Setup make_setup(const RunConfig& cfg) {
  cfg.validate();
  Setup s;
  auto mesh = build_mesh(cfg.mesh);
  s.mesh = mesh;
  std::optional<fem::Slit> slit;
  if (cfg.mesh.slit) slit = cfg.mesh.slit_geometry;
  auto dofs = std::make_shared<const fem::DofMap>(mesh, slit);
  s.dofs = dofs;

  auto& p = s.problem;
  p.dofs = dofs;
  p.material = cfg.resolved_material(mesh->h_min());
  p.material.validate();
  p.mechanics = cfg.mechanics;
  p.mechanics.model = cfg.model;
  p.phasefield = cfg.phasefield;
  p.phasefield.model = cfg.model;
  p.coupling.tol = cfg.tol;
  p.coupling.max_stagger = cfg.max_stagger;
  p.coupling.dt = cfg.dt;
  p.coupling.n_steps = cfg.n_steps;
  p.coupling.load = [load = cfg.load](double t) { return load.at(t); };
  p.gamma = cfg.gamma;
  p.dirichlet = [dofs](double u_top) { return slit_dirichlet(*dofs, u_top); };
  s.phi0 = seed_phase_field(*dofs, cfg.seed, mesh->h_min());
  return s;
}

StaticResult solve_static_slit(const Setup& setup, const RunConfig& cfg,
                               std::ostream* iteration_log) {
  const auto& dofs = *setup.dofs;
  const auto& p = setup.problem;
  mechanics::SolveOptions opt;
  opt.warm_start = true;
  opt.log = {iteration_log, 1, 1};
  const auto zero = NodalField::zeros(fem::FieldKind::displacement, dofs);
  const auto res = mechanics::solve_mechanics(dofs, zero, setup.phi0, zero,
                                              p.dirichlet(cfg.load.at(cfg.dt)), p.mechanics,
                                              p.material, opt);
  return {res.u, setup.phi0, res.iterations,
          p.material.beta > 0.0 ? res.max_ellipticity : 0.0};
}

coupling::Trajectory run_phase_field(const Setup& setup, const RunConfig&,
                                     const coupling::RunHooks& hooks) {
  return coupling::run_quasi_static(setup.problem, setup.phi0, hooks);
}

std::vector<postprocess::EnergyRecord> energies(const std::vector<coupling::StepRecord>& records) {
  std::vector<postprocess::EnergyRecord> out;
  for (const auto& r : records)
    out.push_back({r.step, r.time, r.bulk_energy, r.crack_energy, r.total_energy});
  return out;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void write_outputs(const fs::path& out, const Setup& setup, const RunConfig& cfg, int step,
                   const NodalField& u, const NodalField& phi, bool vtk) {
  const auto& p = setup.problem;
  for (auto q : cfg.output.samples) {
    const auto rows = postprocess::line_sample(*setup.dofs, q, cfg.output.sample_from,
                                               cfg.output.sample_to, u, phi, cfg.model,
                                               p.material);
    postprocess::write_samples_csv(
        out / (std::string(postprocess::to_string(q)) + "_" + std::to_string(step) + ".csv"), rows);
  }
  if (vtk)
    postprocess::export_vtk(out / ("fields_" + std::to_string(step) + ".vtk"), *setup.dofs, u,
                            phi, cfg.model, p.material);
}

}  // namespace

int run_to_directory(const RunConfig& cfg, const fs::path& out, std::ostream& console) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  {
    auto os = open_out(out / "config.txt");
    os << serialize_config(cfg);
  }

  if (cfg.experiment == Experiment::ex1) {
    console << "cycle            h    cells     dofs           L2 error     rate\n";
    const auto rows = mms::convergence_study(cfg, cfg.mms_cycles, &console);
    auto os = open_out(out / "convergence.csv");
    mms::write_table_csv(os, rows);
    return 0;
  }

  const Setup setup = make_setup(cfg);
  console << cfg.name << ": " << setup.mesh->n_cells() << " cells, h_min = "
          << setup.mesh->h_min() << ", " << 2 * setup.dofs->n_nodes() << " displacement DOFs\n";

  std::ofstream iter_log;
  std::ostream* log = nullptr;
  if (cfg.output.iteration_log) {
    iter_log = open_out(out / "iterations.csv");
    iter_log.precision(10);
    log = &iter_log;
  }

  if (cfg.experiment == Experiment::ex2) {
    const auto res = solve_static_slit(setup, cfg, log);
    console << "newton iterations: " << res.newton
            << ", max beta*|E^1/2[eps]| = " << res.max_ellipticity << "\n";
    if (res.max_ellipticity >= 1.0) console << "warning: ellipticity bound violated\n";
    write_outputs(out, setup, cfg, 1, res.u, res.phi, cfg.output.vtk);
    return 0;
  }

  coupling::RunHooks hooks;
  hooks.iteration_log = log;
  hooks.progress = &console;
  const int last = cfg.n_steps;
  hooks.on_step = [&](const coupling::SolveState& s, const coupling::StepRecord& r) {
    if (cfg.model == constitutive::Model::nlsl && r.max_ellipticity >= 1.0)
      console << "warning: ellipticity bound reached at step " << r.step << "\n";
    const auto& steps = cfg.output.sample_steps;
    const bool wanted = std::find(steps.begin(), steps.end(), s.n) != steps.end();
    if (wanted || s.n == last)
      write_outputs(out, setup, cfg, s.n, s.u_n, s.phi_n, cfg.output.vtk && s.n == last);
  };
  const auto traj = run_phase_field(setup, cfg, hooks);
  {
    auto os = open_out(out / "run_log.csv");
    coupling::write_run_log(os, traj.records);
  }
  if (const auto k = postprocess::take_off_step(energies(traj.records)))
    console << "crack take-off at step " << *k << "\n";
  return 0;
}

}  // namespace limitfrac
