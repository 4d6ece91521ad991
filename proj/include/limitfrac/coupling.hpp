#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/linear_solver.hpp"
#include "limitfrac/mechanics.hpp"
#include "limitfrac/phasefield.hpp"

namespace limitfrac::coupling {

using constitutive::MaterialParams;
using fem::NodalField;

struct CouplingConfig {
  double tol = 1e-6;      ///< bound on both |A1| and |A2|
  int max_stagger = 500;
  double dt = 1.0;
  int n_steps = 1;
  /// Top displacement as a function of time.
  std::function<double(double)> load = [](double t) { return t; };

  void validate() const;
};

/// Dirichlet data for a given top displacement.
using DirichletBuilder = std::function<fem::DirichletValues(double load)>;

/// Everything a staggered run needs besides the state.
struct Problem {
  std::shared_ptr<const fem::DofMap> dofs;
  MaterialParams material;
  mechanics::MechanicsConfig mechanics;
  phasefield::PhaseFieldConfig phasefield;
  CouplingConfig coupling;
  double gamma = 1e4;
  DirichletBuilder dirichlet;
};

struct SolveState {
  int n = 0;
  double t = 0.0;
  double dt = 1.0;
  NodalField u_n, phi_n;        ///< committed fields at t^n
  NodalField u_iter, phi_iter;  ///< latest staggered iterates
  phasefield::PenaltyState pen;
  int stagger_iters = 0;
  int mech_newton = 0;
  int pf_newton = 0;
  std::vector<std::pair<double, double>> residuals;  ///< (|A1|, |A2|) per iteration
  double max_ellipticity = 0.0;
  double max_phi_increase = 0.0;  ///< max_nodes(phi^n - phi^{n-1})
};

/// Linear solvers reused across iterations (symbolic factorizations cached).
struct Workspace {
  fem::LinearSolver mechanics;
  fem::LinearSolver phasefield;
};

/// u = 0, phi = phi0, n = 0.
SolveState initial_state(const Problem& problem, const NodalField& phi0);

/// Unbroken |A1| and |A2| (L-terms dropped), constrained.
std::pair<double, double> stagger_residuals(const Problem& problem, const SolveState& prev,
                                            const NodalField& u, const NodalField& phi,
                                            const phasefield::PenaltyState& pen,
                                            const fem::DirichletValues& dirichlet);

/// One timestep: alternate mechanics and phase field from the committed state
/// `prev` until both residuals fall below tol. Throws StaggerNonConvergence.
SolveState staggered_step(const SolveState& prev, const Problem& problem,
                          Workspace* workspace = nullptr, std::ostream* iteration_log = nullptr);

struct StepRecord {
  int step = 0;
  double time = 0.0;
  int stagger_iters = 0;
  int mech_newton_total = 0;
  int pf_newton_total = 0;
  double bulk_energy = 0.0;
  double crack_energy = 0.0;
  double total_energy = 0.0;
  double max_ellipticity = 0.0;
  double max_phi_increase = 0.0;
};

StepRecord make_record(const Problem& problem, const SolveState& state);

struct RunHooks {
  std::ostream* iteration_log = nullptr;
  std::ostream* progress = nullptr;
  /// Called after the initial state and after every committed step.
  std::function<void(const SolveState&, const StepRecord&)> on_step;
};

struct Trajectory {
  std::vector<StepRecord> records;  ///< records[0] is the initial state
  SolveState final_state;
};

Trajectory run_quasi_static(const Problem& problem, const NodalField& phi0,
                            const RunHooks& hooks = {});

/// step,time,stagger_iters,mech_newton_total,pf_newton_total,bulk_energy,crack_energy,total_energy
void write_run_log(std::ostream& os, const std::vector<StepRecord>& records);

}  // namespace limitfrac::coupling
