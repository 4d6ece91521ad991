#include "limitfrac/phasefield.hpp"

#include "limitfrac/errors.hpp"
#include "newton.hpp"

namespace limitfrac::phasefield {

using constitutive::SymTensor2;
using fem::CellView;
using fem::DofMap;
using fem::NodalField;

PenaltyState PenaltyState::zeros(const DofMap& dofs, double gamma) {
  return {Eigen::VectorXd::Zero(dofs.n_nodes()), gamma};
}

void PhaseFieldConfig::validate() const {
  if (!(l_phi >= 0.0)) throw ConfigError("phasefield: l_phi must be non-negative");
  if (!(newton_tol > 0.0)) throw ConfigError("phasefield: newton_tol must be positive");
  if (max_newton < 1) throw ConfigError("phasefield: max_newton must be at least 1");
  if (line_search.max_backtracks < 0 || !(line_search.factor > 0.0 && line_search.factor < 1.0))
    throw ConfigError("phasefield: invalid line-search settings");
}

Eigen::VectorXd active_indicator(const PenaltyState& pen, const NodalField& phi,
                                 const NodalField& phi_prev_step) {
  const Eigen::ArrayXd arg =
      pen.omega.array() + pen.gamma * (phi.values - phi_prev_step.values).array();
  return (arg > 0.0).cast<double>().matrix();
}

namespace {

struct Inputs {
  const Eigen::VectorXd& phi;
  const Eigen::VectorXd& u;
  const Eigen::VectorXd& phi_prev_step;
  const Eigen::VectorXd* phi_prev_iter;
  const Eigen::VectorXd& omega;
  const Eigen::VectorXd& eta;
  double gamma;
  const PhaseFieldConfig& cfg;
  const MaterialParams& m;
};

// sigma(u):eps(u) at a reference point of the cell.
double driving(const fem::ShapeEval& sh, double h, const fem::LocalVector<2>& ue, Model model,
               const MaterialParams& m) {
  SymTensor2 eps;
  for (int a = 0; a < 4; ++a) {
    const double dx = sh.grads[a][0] / h;
    const double dy = sh.grads[a][1] / h;
    eps.xx += dx * ue(2 * a);
    eps.yy += dy * ue(2 * a + 1);
    eps.xy += 0.5 * (dy * ue(2 * a) + dx * ue(2 * a + 1));
  }
  return constitutive::ddot(constitutive::stress(model, eps, m), eps);
}

fem::CellKernel<1> kernel(const Inputs& in) {
  return [in](const CellView& cv, fem::LocalMatrix<1>& ke, fem::LocalVector<1>& fe) {
    const auto& rule = fem::gauss(2);
    const auto& m = in.m;
    const fem::LocalVector<2> ue = fem::gather<2>(in.u, cv.nodes);
    const fem::LocalVector<1> pe = fem::gather<1>(in.phi, cv.nodes);
    const fem::LocalVector<1> pn = fem::gather<1>(in.phi_prev_step, cv.nodes);
    const fem::LocalVector<1> we = fem::gather<1>(in.omega, cv.nodes);
    const fem::LocalVector<1> ee = fem::gather<1>(in.eta, cv.nodes);
    fem::LocalVector<1> pi = pe;
    if (in.phi_prev_iter != nullptr) pi = fem::gather<1>(*in.phi_prev_iter, cv.nodes);

    for (int q = 0; q < rule.size(); ++q) {
      const auto& sh = rule.shapes[q];
      const double jw = rule.weights[q] * cv.area();
      Eigen::Vector4d n;
      Eigen::Matrix<double, 2, 4> g;
      for (int a = 0; a < 4; ++a) {
        n(a) = sh.values[a];
        g(0, a) = sh.grads[a][0] / cv.h;
        g(1, a) = sh.grads[a][1] / cv.h;
      }
      const double c = (1.0 - m.kappa) * driving(sh, cv.h, ue, in.cfg.model, m);

      if (cv.flags.matrix) {
        const double mass = c + m.gc / m.xi + in.cfg.l_phi;
        ke.noalias() += jw * (mass * (n * n.transpose()) + m.gc * m.xi * (g.transpose() * g));
      }
      if (cv.flags.vector) {
        const double phi = n.dot(pe);
        const double s = c * phi - m.gc / m.xi * (1.0 - phi) + in.cfg.l_phi * (phi - n.dot(pi));
        fe.noalias() += jw * (s * n + m.gc * m.xi * (g.transpose() * (g * pe)));
      }
    }

    // Penalty term with nodal quadrature, collocated with eta: the gradient of
    // sum_i m_i gamma/2 [omega_i/gamma + phi_i - phi_prev_i]_+^2.
    const double lumped = 0.25 * cv.area();
    for (int a = 0; a < 4; ++a) {
      if (ee(a) == 0.0) continue;
      if (cv.flags.matrix) ke(a, a) += lumped * in.gamma;
      if (cv.flags.vector) fe(a) += lumped * (we(a) + in.gamma * (pe(a) - pn(a)));
    }
  };
}

void check_fields(const DofMap& dofs, const NodalField& phi, const NodalField& u,
                  const PenaltyState& pen) {
  const auto n = dofs.n_nodes();
  if (phi.values.size() != n || u.values.size() != 2 * n || pen.omega.size() != n)
    throw ConfigError("phasefield: field sizes do not match the DOF map");
}

}  // namespace

Eigen::VectorXd pf_residual(const DofMap& dofs, const NodalField& phi, const NodalField& u_frozen,
                            const NodalField& phi_prev_step, const NodalField& phi_prev_iter,
                            const PenaltyState& pen, const PhaseFieldConfig& cfg,
                            const MaterialParams& m) {
  check_fields(dofs, phi, u_frozen, pen);
  const Eigen::VectorXd eta = active_indicator(pen, phi, phi_prev_step);
  const Inputs in{phi.values,  u_frozen.values, phi_prev_step.values, &phi_prev_iter.values,
                  pen.omega,   eta,             pen.gamma,            cfg,
                  m};
  return fem::assemble<1>(dofs, kernel(in), {.matrix = false, .vector = true}).rhs;
}

fem::SparseMatrix pf_jacobian(const DofMap& dofs, const NodalField& phi,
                              const NodalField& u_frozen, const NodalField& phi_prev_step,
                              const PenaltyState& pen, const PhaseFieldConfig& cfg,
                              const MaterialParams& m) {
  check_fields(dofs, phi, u_frozen, pen);
  const Eigen::VectorXd eta = active_indicator(pen, phi, phi_prev_step);
  const Inputs in{phi.values, u_frozen.values, phi_prev_step.values, nullptr, pen.omega, eta,
                  pen.gamma,  cfg,             m};
  return fem::assemble<1>(dofs, kernel(in), {.matrix = true, .vector = false}).matrix;
}

PhaseFieldResult solve_phasefield(const DofMap& dofs, const NodalField& u_frozen,
                                  const NodalField& phi_prev_step, const NodalField& phi_prev_iter,
                                  const PenaltyState& pen, const PhaseFieldConfig& cfg,
                                  const MaterialParams& m, const SolveOptions& options) {
  cfg.validate();
  check_fields(dofs, phi_prev_iter, u_frozen, pen);

  fem::LinearSolver local_solver;
  fem::LinearSolver& solver = options.solver != nullptr ? *options.solver : local_solver;

  detail::NewtonProblem problem;
  problem.dofs = &dofs;
  problem.components = 1;
  problem.tag = "pfnewton";
  problem.assemble = [&](const Eigen::VectorXd& x, fem::AssemblyFlags flags) {
    const NodalField phi{fem::FieldKind::phasefield, x};
    const Eigen::VectorXd eta = active_indicator(pen, phi, phi_prev_step);
    const Inputs in{x,         u_frozen.values, phi_prev_step.values, &phi_prev_iter.values,
                    pen.omega, eta,             pen.gamma,            cfg,
                    m};
    return fem::assemble<1>(dofs, kernel(in), flags);
  };

  Eigen::VectorXd x = phi_prev_iter.values;
  fem::distribute_constraints(dofs, 1, x);
  detail::NewtonOutcome out = detail::newton_solve(problem, std::move(x), cfg.newton_tol,
                                                   cfg.max_newton, cfg.line_search, solver,
                                                   options.log);
  PhaseFieldResult res;
  res.phi = NodalField{fem::FieldKind::phasefield, std::move(out.x)};
  res.iterations = out.iterations;
  res.history = std::move(out.history);
  res.min_phi = res.phi.values.minCoeff();
  res.max_phi = res.phi.values.maxCoeff();
  res.in_box = res.min_phi >= -cfg.box_tolerance && res.max_phi <= 1.0 + cfg.box_tolerance;
  if (!res.in_box && options.log.out != nullptr)
    *options.log.out << "# warning: phase field left [0,1] by more than " << cfg.box_tolerance
                     << " (min " << res.min_phi << ", max " << res.max_phi << ")\n";
  return res;
}

PenaltyState update_multiplier(const PenaltyState& pen, const NodalField& phi,
                               const NodalField& phi_prev_step) {
  PenaltyState out = pen;
  out.omega = (pen.omega.array() + pen.gamma * (phi.values - phi_prev_step.values).array())
                  .max(0.0)
                  .matrix();
  return out;
}

}  // namespace limitfrac::phasefield
