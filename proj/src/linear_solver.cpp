#include "limitfrac/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cstdio>
#include <limits>
#include <sstream>

#ifdef LIMITFRAC_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include "limitfrac/errors.hpp"

namespace limitfrac::fem {

namespace {

#ifdef LIMITFRAC_HAVE_CHOLMOD
using Cholesky = Eigen::CholmodDecomposition<SparseMatrix, Eigen::Lower>;
#else
using Cholesky = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;
#endif

// Cheap fingerprint of a sparsity pattern.
struct Pattern {
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
  std::size_t hash = 0;

  static Pattern of(const SparseMatrix& a) {
    Pattern p;
    p.rows = a.rows();
    p.nnz = a.nonZeros();
    std::size_t h = 1469598103934665603ull;
    const auto mix = [&h](std::size_t v) { h = (h ^ v) * 1099511628211ull; };
    for (Eigen::Index j = 0; j <= a.outerSize(); ++j) mix(static_cast<std::size_t>(a.outerIndexPtr()[j]));
    for (Eigen::Index k = 0; k < a.nonZeros(); ++k) mix(static_cast<std::size_t>(a.innerIndexPtr()[k]));
    p.hash = h;
    return p;
  }
  bool operator==(const Pattern&) const = default;
};

std::string diagnostic(const SparseMatrix& a, double rel) {
  const Eigen::VectorXd d = a.diagonal().cwiseAbs();
  std::ostringstream os;
  os << "relative residual " << rel << ", |diag| range [" << d.minCoeff() << ", " << d.maxCoeff()
     << "]";
  return os.str();
}

}  // namespace

struct LinearSolver::Impl {
  Cholesky cholesky;
  Pattern pattern;
  bool analyzed = false;
#ifdef LIMITFRAC_HAVE_CHOLMOD
  bool simplicial = false;
#endif
};

LinearSolver::LinearSolver(LinearSolverOptions options)
    : options_(options), impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(b.size());
  }

  if (options_.method == LinearSolverOptions::Method::cg) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(options_.cg_tolerance);
    cg.setMaxIterations(options_.cg_max_iterations);
    cg.compute(a);
    if (cg.info() != Eigen::Success) throw SolverError("cg: preconditioner setup failed");
    Eigen::VectorXd x = cg.solve(b);
    last_residual_ = (b - a * x).norm() / bnorm;
    if (cg.info() != Eigen::Success || last_residual_ > options_.residual_limit)
      throw SolverError("cg: no convergence after " + std::to_string(cg.iterations()) +
                        " iterations, " + diagnostic(a, last_residual_));
    return x;
  }

  const Pattern pattern = Pattern::of(a);
  if (!impl_->analyzed || !(pattern == impl_->pattern)) {
    impl_->cholesky.analyzePattern(a);
    impl_->pattern = pattern;
    impl_->analyzed = true;
  }
  impl_->cholesky.factorize(a);
#ifdef LIMITFRAC_HAVE_CHOLMOD
  if (impl_->cholesky.info() != Eigen::Success && !impl_->simplicial) {
    // Supernodal factorization relies on the system BLAS, which can be
    // broken on some CPUs; the simplicial variant does not use it.
    impl_->cholesky.setMode(Eigen::CholmodSimplicialLLt);
    impl_->simplicial = true;
    impl_->cholesky.analyzePattern(a);
    impl_->cholesky.factorize(a);
  }
#endif

  Eigen::VectorXd x;
  if (impl_->cholesky.info() == Eigen::Success) {
    x = impl_->cholesky.solve(b);
    Eigen::VectorXd r = b - a * x;
    for (int k = 0; k < options_.refinement_steps && r.norm() > options_.residual_target * bnorm;
         ++k) {
      x += impl_->cholesky.solve(r);
      r = b - a * x;
    }
    last_residual_ = r.norm() / bnorm;
  } else {
    last_residual_ = std::numeric_limits<double>::infinity();
  }

  if (!(last_residual_ <= options_.residual_limit)) {
    // Not positive definite (or badly conditioned): fall back to LU.
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
      throw SolverError("linear solve: matrix is singular (" + lu.lastErrorMessage() + ")");
    x = lu.solve(b);
    Eigen::VectorXd r = b - a * x;
    for (int k = 0; k < options_.refinement_steps && r.norm() > options_.residual_target * bnorm;
         ++k) {
      x += lu.solve(r);
      r = b - a * x;
    }
    last_residual_ = r.norm() / bnorm;
    if (!(last_residual_ <= options_.residual_limit))
      throw SolverError("linear solve failed: " + diagnostic(a, last_residual_));
  }
  return x;
}

Eigen::VectorXd solve_linear(const SparseSystem& system, const LinearSolverOptions& options) {
  LinearSolver solver(options);
  return solver.solve(system.matrix, system.rhs);
}

}  // namespace limitfrac::fem
