#pragma once

// Damped Newton loop shared by the mechanics and phase-field subproblems.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "limitfrac/errors.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/linear_solver.hpp"
#include "limitfrac/mechanics.hpp"

namespace limitfrac::detail {

struct NewtonProblem {
  /// Assembles the Jacobian (matrix) and residual (rhs) at x.
  std::function<fem::SparseSystem(const Eigen::VectorXd&, fem::AssemblyFlags)> assemble;
  const fem::DofMap* dofs = nullptr;
  int components = 1;
  fem::DirichletValues homogeneous;  ///< Dirichlet DOFs with zero values
  std::string tag;                   ///< log prefix, "newton" or "pfnewton"
};

struct NewtonOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  std::vector<NewtonRecord> history;
};

inline double constrained_norm(const NewtonProblem& p, Eigen::VectorXd r) {
  fem::constrain_vector(*p.dofs, p.components, p.homogeneous, r);
  return r.norm();
}

/// Residual norm at x, or +inf when x is outside the admissible set.
inline double trial_residual(const NewtonProblem& p, const Eigen::VectorXd& x) {
  try {
    return constrained_norm(p, p.assemble(x, {.matrix = false, .vector = true}).rhs);
  } catch (const LimitExceeded&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline NewtonOutcome newton_solve(const NewtonProblem& p, Eigen::VectorXd x, double tol,
                                  int max_iterations, const LineSearch& ls,
                                  fem::LinearSolver& solver, const IterationLog& log) {
  NewtonOutcome out;
  for (int a = 1; a <= max_iterations; ++a) {
    fem::SparseSystem sys = p.assemble(x, {.matrix = true, .vector = true});
    const double r0 = constrained_norm(p, sys.rhs);
    sys.rhs = -sys.rhs;
    fem::apply_dirichlet(sys, p.homogeneous);
    Eigen::VectorXd dx = solver.solve(sys.matrix, sys.rhs);
    fem::distribute_constraints(*p.dofs, p.components, dx);
    const double inc = dx.norm();

    double omega = 1.0;
    if (inc > tol && r0 > 0.0 && ls.max_backtracks > 0) {
      // Backtrack until the residual decreases. Past max_backtracks, take the
      // largest admissible step seen; inadmissible steps are never taken.
      // max_backtracks == 0 means full steps.
      double best_admissible = 0.0;
      bool accepted = false;
      for (int k = 0; k < 60; ++k) {
        const double rt = trial_residual(p, x + omega * dx);
        if (std::isfinite(rt) && best_admissible == 0.0) best_admissible = omega;
        if (rt < r0) {
          accepted = true;
          break;
        }
        if (k >= ls.max_backtracks && best_admissible > 0.0) break;
        omega *= ls.factor;
      }
      if (!accepted) {
        if (best_admissible == 0.0) throw LimitExceeded(std::numeric_limits<double>::infinity());
        omega = best_admissible;
        if (log.out != nullptr)
          *log.out << "# warning: " << p.tag << " line search exhausted, step " << omega << "\n";
      }
    }
    x += omega * dx;
    out.history.push_back({a, r0, inc, omega});
    if (log.out != nullptr)
      *log.out << p.tag << ',' << log.step << ',' << log.stagger << ',' << a << ',' << r0 << ','
               << inc << '\n';
    out.iterations = a;
    if (inc <= tol || r0 == 0.0) {
      out.x = std::move(x);
      return out;
    }
  }
  std::vector<double> incs;
  for (const auto& h : out.history) incs.push_back(h.increment);
  throw NonConvergence(p.tag + ": no convergence in " + std::to_string(max_iterations) +
                           " iterations",
                       std::move(incs));
}

}  // namespace limitfrac::detail
