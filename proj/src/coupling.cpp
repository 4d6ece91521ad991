#include "limitfrac/coupling.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "limitfrac/errors.hpp"
#include "limitfrac/postprocess.hpp"

namespace limitfrac::coupling {

void CouplingConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("coupling: tol must be positive");
  if (!(dt > 0.0)) throw ConfigError("coupling: dt must be positive");
  if (max_stagger < 1) throw ConfigError("coupling: max_stagger must be at least 1");
  if (n_steps < 0) throw ConfigError("coupling: n_steps must be non-negative");
  if (!load) throw ConfigError("coupling: no load function");
}

SolveState initial_state(const Problem& problem, const NodalField& phi0) {
  const auto& dofs = *problem.dofs;
  SolveState s;
  s.dt = problem.coupling.dt;
  s.u_n = NodalField::zeros(fem::FieldKind::displacement, dofs);
  s.phi_n = phi0;
  fem::distribute_constraints(dofs, 1, s.phi_n.values);
  s.u_iter = s.u_n;
  s.phi_iter = s.phi_n;
  s.pen = phasefield::PenaltyState::zeros(dofs, problem.gamma);
  return s;
}

std::pair<double, double> stagger_residuals(const Problem& problem, const SolveState& prev,
                                            const NodalField& u, const NodalField& phi,
                                            const phasefield::PenaltyState& pen,
                                            const fem::DirichletValues& dirichlet) {
  const auto& dofs = *problem.dofs;
  mechanics::MechanicsConfig mc = problem.mechanics;
  mc.l_u = 0.0;
  phasefield::PhaseFieldConfig pc = problem.phasefield;
  pc.l_phi = 0.0;

  Eigen::VectorXd a1 = mechanics::mech_residual(dofs, u, phi, u, mc, problem.material);
  fem::DirichletValues zero;
  zero.reserve(dirichlet.size());
  for (const auto& [dof, v] : dirichlet) zero.emplace_back(dof, 0.0);
  fem::constrain_vector(dofs, 2, zero, a1);

  Eigen::VectorXd a2 =
      phasefield::pf_residual(dofs, phi, u, prev.phi_n, phi, pen, pc, problem.material);
  fem::constrain_vector(dofs, 1, {}, a2);
  return {a1.norm(), a2.norm()};
}

SolveState staggered_step(const SolveState& prev, const Problem& problem, Workspace* workspace,
                          std::ostream* iteration_log) {
  const auto& dofs = *problem.dofs;
  const auto& m = problem.material;
  Workspace local;
  Workspace& ws = workspace != nullptr ? *workspace : local;

  SolveState s;
  s.n = prev.n + 1;
  s.dt = problem.coupling.dt;
  s.t = prev.t + s.dt;
  s.u_n = prev.u_n;
  s.phi_n = prev.phi_n;
  s.u_iter = prev.u_n;
  s.phi_iter = prev.phi_n;
  s.pen = phasefield::PenaltyState::zeros(dofs, problem.gamma);

  const fem::DirichletValues bc = problem.dirichlet(problem.coupling.load(s.t));

  for (int i = 1; i <= problem.coupling.max_stagger; ++i) {
    mechanics::SolveOptions mo;
    mo.warm_start = i == 1;
    mo.solver = &ws.mechanics;
    mo.log = {iteration_log, s.n, i};
    auto mech = mechanics::solve_mechanics(dofs, s.u_iter, s.phi_iter, s.u_iter, bc,
                                           problem.mechanics, m, mo);
    s.mech_newton += mech.iterations;
    s.max_ellipticity = std::max(s.max_ellipticity, mech.max_ellipticity);

    phasefield::SolveOptions po;
    po.solver = &ws.phasefield;
    po.log = {iteration_log, s.n, i};
    auto pf = phasefield::solve_phasefield(dofs, mech.u, prev.phi_n, s.phi_iter, s.pen,
                                           problem.phasefield, m, po);
    s.pf_newton += pf.iterations;

    s.pen = phasefield::update_multiplier(s.pen, pf.phi, prev.phi_n);
    s.u_iter = std::move(mech.u);
    s.phi_iter = std::move(pf.phi);
    s.stagger_iters = i;

    const auto r = stagger_residuals(problem, prev, s.u_iter, s.phi_iter, s.pen, bc);
    s.residuals.push_back(r);
    if (iteration_log != nullptr)
      *iteration_log << "stagger," << s.n << ',' << i << ',' << r.first << ',' << r.second
                     << '\n';
    if (r.first <= problem.coupling.tol && r.second <= problem.coupling.tol) {
      s.u_n = s.u_iter;
      s.phi_n = s.phi_iter;
      s.max_phi_increase = (s.phi_n.values - prev.phi_n.values).maxCoeff();
      if (m.beta > 0.0 && problem.mechanics.model == constitutive::Model::nlsl &&
          s.max_ellipticity >= 1.0 && iteration_log != nullptr)
        *iteration_log << "# warning: ellipticity bound reached at step " << s.n << '\n';
      return s;
    }
  }
  std::ostringstream os;
  os << "staggered scheme: no convergence at step " << s.n << " after "
     << problem.coupling.max_stagger << " iterations (last |A1| = " << s.residuals.back().first
     << ", |A2| = " << s.residuals.back().second << ")";
  throw StaggerNonConvergence(os.str(), s.residuals);
}

StepRecord make_record(const Problem& problem, const SolveState& state) {
  const auto& dofs = *problem.dofs;
  StepRecord r;
  r.step = state.n;
  r.time = state.t;
  r.stagger_iters = state.stagger_iters;
  r.mech_newton_total = state.mech_newton;
  r.pf_newton_total = state.pf_newton;
  r.bulk_energy = postprocess::bulk_energy(dofs, state.u_n, state.phi_n, problem.mechanics.model,
                                           problem.material);
  r.crack_energy = postprocess::crack_energy(dofs, state.phi_n, problem.material);
  r.total_energy = r.bulk_energy + r.crack_energy;
  r.max_ellipticity = state.max_ellipticity;
  r.max_phi_increase = state.max_phi_increase;
  return r;
}

Trajectory run_quasi_static(const Problem& problem, const NodalField& phi0, const RunHooks& hooks) {
  problem.coupling.validate();
  problem.mechanics.validate();
  problem.phasefield.validate();
  problem.material.validate();

  Workspace ws;
  Trajectory out;
  SolveState state = initial_state(problem, phi0);
  out.records.push_back(make_record(problem, state));
  if (hooks.on_step) hooks.on_step(state, out.records.back());

  for (int k = 0; k < problem.coupling.n_steps; ++k) {
    state = staggered_step(state, problem, &ws, hooks.iteration_log);
    out.records.push_back(make_record(problem, state));
    const StepRecord& r = out.records.back();
    if (hooks.progress != nullptr) {
      *hooks.progress << "step " << r.step << "  t=" << r.time << "  stagger=" << r.stagger_iters
                      << "  newton=" << r.mech_newton_total << '/' << r.pf_newton_total
                      << "  crack=" << r.crack_energy << "  bulk=" << r.bulk_energy;
      if (r.max_ellipticity > 0.0) *hooks.progress << "  ellipticity=" << r.max_ellipticity;
      *hooks.progress << std::endl;
    }
    if (hooks.on_step) hooks.on_step(state, r);
  }
  out.final_state = std::move(state);
  return out;
}

void write_run_log(std::ostream& os, const std::vector<StepRecord>& records) {
  os << "step,time,stagger_iters,mech_newton_total,pf_newton_total,bulk_energy,crack_energy,"
        "total_energy\n";
  const auto prec = os.precision(17);
  for (const auto& r : records)
    os << r.step << ',' << r.time << ',' << r.stagger_iters << ',' << r.mech_newton_total << ','
       << r.pf_newton_total << ',' << r.bulk_energy << ',' << r.crack_energy << ','
       << r.total_energy << '\n';
  os.precision(prec);
}

}  // namespace limitfrac::coupling
