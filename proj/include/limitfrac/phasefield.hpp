#pragma once

#include <Eigen/Core>
#include <vector>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/linear_solver.hpp"
#include "limitfrac/mechanics.hpp"

namespace limitfrac::phasefield {

using constitutive::MaterialParams;
using constitutive::Model;

/// Augmented-Lagrangian multiplier (nodal, non-negative) and its penalty.
struct PenaltyState {
  Eigen::VectorXd omega;
  double gamma = 1e4;

  static PenaltyState zeros(const fem::DofMap& dofs, double gamma);
};

struct PhaseFieldConfig {
  Model model = Model::lefm;  ///< law used for the driving term sigma(u):eps(u)
  double l_phi = 1e-6;
  double newton_tol = 1e-8;
  int max_newton = 50;
  LineSearch line_search{0.5, 0};  ///< full steps unless max_backtracks > 0
  double box_tolerance = 1e-3;

  void validate() const;
};

/// Nodal 0/1 indicator of omega + gamma (phi - phi_prev_step) > 0.
Eigen::VectorXd active_indicator(const PenaltyState& pen, const fem::NodalField& phi,
                                 const fem::NodalField& phi_prev_step);

/// Weak residual of the phase-field subproblem against every test function:
/// (1-kappa)(phi sigma:eps, psi) - Gc/xi (1-phi, psi) + Gc xi (grad phi, grad psi)
/// + (eta (omega + gamma (phi - phi_prev_step)), psi) + L_phi (phi - phi_prev_iter, psi).
/// The penalty term is integrated with nodal (lumped) quadrature, so node i
/// carries m_i eta_i (omega_i + gamma (phi_i - phi_prev_step_i)) with m_i the
/// lumped mass.
Eigen::VectorXd pf_residual(const fem::DofMap& dofs, const fem::NodalField& phi,
                            const fem::NodalField& u_frozen, const fem::NodalField& phi_prev_step,
                            const fem::NodalField& phi_prev_iter, const PenaltyState& pen,
                            const PhaseFieldConfig& cfg, const MaterialParams& m);

/// Jacobian of pf_residual with eta frozen at the current iterate.
fem::SparseMatrix pf_jacobian(const fem::DofMap& dofs, const fem::NodalField& phi,
                              const fem::NodalField& u_frozen,
                              const fem::NodalField& phi_prev_step, const PenaltyState& pen,
                              const PhaseFieldConfig& cfg, const MaterialParams& m);

struct PhaseFieldResult {
  fem::NodalField phi;
  int iterations = 0;
  std::vector<NewtonRecord> history;
  double min_phi = 0.0;
  double max_phi = 0.0;
  bool in_box = true;  ///< phi within [-box_tolerance, 1 + box_tolerance]
};

struct SolveOptions {
  fem::LinearSolver* solver = nullptr;
  IterationLog log;
};

/// Semi-smooth Newton from phi_prev_iter. Throws NonConvergence.
PhaseFieldResult solve_phasefield(const fem::DofMap& dofs, const fem::NodalField& u_frozen,
                                  const fem::NodalField& phi_prev_step,
                                  const fem::NodalField& phi_prev_iter, const PenaltyState& pen,
                                  const PhaseFieldConfig& cfg, const MaterialParams& m,
                                  const SolveOptions& options = {});

/// omega <- max(0, omega + gamma (phi - phi_prev_step)) nodewise.
PenaltyState update_multiplier(const PenaltyState& pen, const fem::NodalField& phi,
                               const fem::NodalField& phi_prev_step);

}  // namespace limitfrac::phasefield
