#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/linear_solver.hpp"

namespace limitfrac {

/// Optional CSV sink for per-iteration Newton records.
struct IterationLog {
  std::ostream* out = nullptr;
  int step = 0;
  int stagger = 0;
};

struct NewtonRecord {
  int iteration = 0;
  double residual = 0.0;   ///< constrained residual norm before the update
  double increment = 0.0;  ///< Euclidean norm of the Newton direction
  double step = 1.0;       ///< accepted line-search factor
};

/// Backtracking policy shared by both subproblems: halve the step until the
/// residual decreases; after max_backtracks take the largest admissible step.
struct LineSearch {
  double factor = 0.5;
  int max_backtracks = 8;
};

}  // namespace limitfrac

namespace limitfrac::mechanics {

using constitutive::MaterialParams;
using constitutive::Model;

struct MechanicsConfig {
  Model model = Model::lefm;
  double l_u = 1e-6;         ///< L-scheme stabilization
  double newton_tol = 1e-8;  ///< bound on |delta u|
  int max_newton = 50;
  LineSearch line_search;
  bool warm_start_linear = true;
  double min_load_fraction = 1.0 / 1024.0;  ///< smallest boundary increment fraction (NLSL)

  void validate() const;
};

using BodyForce = std::function<std::array<double, 2>(fem::Point)>;

/// Weak residual (g(phi) sigma(u), eps(w)) + L_u (u - u_prev_iter, w) - (f, w)
/// over all test functions, hanging-node condensed, no Dirichlet treatment.
Eigen::VectorXd mech_residual(const fem::DofMap& dofs, const fem::NodalField& u,
                              const fem::NodalField& phi_frozen,
                              const fem::NodalField& u_prev_iter, const MechanicsConfig& cfg,
                              const MaterialParams& m, const BodyForce& body_force = {});

/// Jacobian of mech_residual with respect to u.
fem::SparseMatrix mech_jacobian(const fem::DofMap& dofs, const fem::NodalField& u,
                                const fem::NodalField& phi_frozen, const MechanicsConfig& cfg,
                                const MaterialParams& m);

/// Largest beta*|E^{1/2}[eps(u)]| over the 2x2 Gauss points.
double max_ellipticity_ratio(const fem::DofMap& dofs, const fem::NodalField& u,
                             const MaterialParams& m);

struct SolveOptions {
  /// Start Newton from the linear (LEFM) solution when solving NLSL.
  bool warm_start = false;
  BodyForce body_force;
  fem::LinearSolver* solver = nullptr;
  IterationLog log;
};

struct MechanicsResult {
  fem::NodalField u;
  int iterations = 0;
  std::vector<NewtonRecord> history;
  double max_ellipticity = 0.0;
};

/// Newton iteration for the displacement at frozen phase field. The result
/// satisfies `dirichlet` exactly. Throws NonConvergence or LimitExceeded.
MechanicsResult solve_mechanics(const fem::DofMap& dofs, const fem::NodalField& u_start,
                                const fem::NodalField& phi_frozen,
                                const fem::NodalField& u_prev_iter,
                                const fem::DirichletValues& dirichlet, const MechanicsConfig& cfg,
                                const MaterialParams& m, const SolveOptions& options = {});

}  // namespace limitfrac::mechanics
