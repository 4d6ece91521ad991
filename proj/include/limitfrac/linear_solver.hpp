#pragma once

#include <Eigen/Core>
#include <memory>

#include "limitfrac/fem.hpp"

namespace limitfrac::fem {

struct LinearSolverOptions {
  enum class Method { direct, cg };
  Method method = Method::direct;
  /// Relative residual the direct solve refines towards.
  double residual_target = 1e-12;
  /// Relative residual beyond which the solve is reported as failed.
  double residual_limit = 1e-8;
  int refinement_steps = 3;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 20000;
};

/// Sparse solver for the symmetric systems produced by assembly. The
/// symbolic factorization is reused while the sparsity pattern is unchanged.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverOptions options = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);

  const LinearSolverOptions& options() const { return options_; }
  double last_relative_residual() const { return last_residual_; }

 private:
  struct Impl;
  LinearSolverOptions options_;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
};

/// One-shot solve of an assembled (and Dirichlet-eliminated) system.
Eigen::VectorXd solve_linear(const SparseSystem& system, const LinearSolverOptions& options = {});

}  // namespace limitfrac::fem
