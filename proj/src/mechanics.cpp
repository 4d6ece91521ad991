#include "limitfrac/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "limitfrac/errors.hpp"
#include "newton.hpp"

namespace limitfrac::mechanics {

using constitutive::SymTensor2;
using fem::CellView;
using fem::DofMap;
using fem::NodalField;

void MechanicsConfig::validate() const {
  if (!(l_u >= 0.0)) throw ConfigError("mechanics: l_u must be non-negative");
  if (!(newton_tol > 0.0)) throw ConfigError("mechanics: newton_tol must be positive");
  if (max_newton < 1) throw ConfigError("mechanics: max_newton must be at least 1");
  if (!(line_search.factor > 0.0 && line_search.factor < 1.0))
    throw ConfigError("mechanics: line-search factor must lie in (0, 1)");
  if (!(min_load_fraction > 0.0 && min_load_fraction <= 1.0))
    throw ConfigError("mechanics: min_load_fraction must lie in (0, 1]");
}

namespace {

using B8 = Eigen::Matrix<double, 3, 8>;

// Strain-displacement matrix at a reference point; rows (xx, yy, 2xy).
B8 strain_matrix(const fem::ShapeEval& sh, double h) {
  B8 b = B8::Zero();
  for (int a = 0; a < 4; ++a) {
    const double dx = sh.grads[a][0] / h;
    const double dy = sh.grads[a][1] / h;
    b(0, 2 * a) = dx;
    b(1, 2 * a + 1) = dy;
    b(2, 2 * a) = dy;
    b(2, 2 * a + 1) = dx;
  }
  return b;
}

SymTensor2 strain_of(const B8& b, const fem::LocalVector<2>& ue) {
  const Eigen::Vector3d v = b * ue;
  return {v(0), v(1), 0.5 * v(2)};
}

double interp(const fem::ShapeEval& sh, const fem::LocalVector<1>& pe) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a) s += sh.values[a] * pe(a);
  return s;
}

struct Inputs {
  const DofMap& dofs;
  const Eigen::VectorXd& u;
  const Eigen::VectorXd& phi;
  const Eigen::VectorXd* u_prev;
  Model model;
  double l_u;
  const MaterialParams& m;
  const BodyForce* force;
};

fem::CellKernel<2> kernel(const Inputs& in) {
  return [in](const CellView& cv, fem::LocalMatrix<2>& ke, fem::LocalVector<2>& fe) {
    const auto& rule = fem::gauss(2);
    const fem::LocalVector<2> ue = fem::gather<2>(in.u, cv.nodes);
    const fem::LocalVector<1> pe = fem::gather<1>(in.phi, cv.nodes);
    fem::LocalVector<2> du = fem::LocalVector<2>::Zero();
    if (in.u_prev != nullptr && in.l_u != 0.0) du = ue - fem::gather<2>(*in.u_prev, cv.nodes);

    for (int q = 0; q < rule.size(); ++q) {
      const auto& sh = rule.shapes[q];
      const double jw = rule.weights[q] * cv.area();
      const B8 b = strain_matrix(sh, cv.h);
      const double g = constitutive::degradation(interp(sh, pe), in.m.kappa);
      const SymTensor2 eps = strain_of(b, ue);

      Eigen::Matrix<double, 2, 8> n = Eigen::Matrix<double, 2, 8>::Zero();
      for (int a = 0; a < 4; ++a) n(0, 2 * a) = n(1, 2 * a + 1) = sh.values[a];

      if (cv.flags.matrix) {
        const auto st = constitutive::stress_and_tangent(in.model, eps, in.m);
        ke.noalias() += jw * g * (b.transpose() * st.tangent * b);
        ke.noalias() += jw * in.l_u * (n.transpose() * n);
        if (cv.flags.vector) {
          const Eigen::Vector3d s(st.stress.xx, st.stress.yy, st.stress.xy);
          fe.noalias() += jw * g * (b.transpose() * s);
        }
      } else if (cv.flags.vector) {
        const SymTensor2 sig = constitutive::stress(in.model, eps, in.m);
        const Eigen::Vector3d s(sig.xx, sig.yy, sig.xy);
        fe.noalias() += jw * g * (b.transpose() * s);
      }
      if (cv.flags.vector && in.l_u != 0.0) fe.noalias() += jw * in.l_u * (n.transpose() * (n * du));
    }

    if (cv.flags.vector && in.force != nullptr && *in.force) {
      const auto& r3 = fem::gauss(3);
      for (int q = 0; q < r3.size(); ++q) {
        const auto f = (*in.force)(cv.map(r3.points[q][0], r3.points[q][1]));
        const double jw = r3.weights[q] * cv.area();
        for (int a = 0; a < 4; ++a) {
          fe(2 * a) -= jw * f[0] * r3.shapes[q].values[a];
          fe(2 * a + 1) -= jw * f[1] * r3.shapes[q].values[a];
        }
      }
    }
  };
}

void check_fields(const DofMap& dofs, const NodalField& u, const NodalField& phi) {
  if (u.values.size() != 2 * dofs.n_nodes() || phi.values.size() != dofs.n_nodes())
    throw ConfigError("mechanics: field sizes do not match the DOF map");
}

}  // namespace

Eigen::VectorXd mech_residual(const DofMap& dofs, const NodalField& u, const NodalField& phi_frozen,
                              const NodalField& u_prev_iter, const MechanicsConfig& cfg,
                              const MaterialParams& m, const BodyForce& body_force) {
  check_fields(dofs, u, phi_frozen);
  const Inputs in{dofs, u.values, phi_frozen.values, &u_prev_iter.values, cfg.model, cfg.l_u, m,
                  &body_force};
  return fem::assemble<2>(dofs, kernel(in), {.matrix = false, .vector = true}).rhs;
}

fem::SparseMatrix mech_jacobian(const DofMap& dofs, const NodalField& u,
                                const NodalField& phi_frozen, const MechanicsConfig& cfg,
                                const MaterialParams& m) {
  check_fields(dofs, u, phi_frozen);
  const Inputs in{dofs, u.values, phi_frozen.values, nullptr, cfg.model, cfg.l_u, m, nullptr};
  return fem::assemble<2>(dofs, kernel(in), {.matrix = true, .vector = false}).matrix;
}

double max_ellipticity_ratio(const DofMap& dofs, const NodalField& u, const MaterialParams& m) {
  const auto& rule = fem::gauss(2);
  double worst = 0.0;
  for (int c = 0; c < dofs.n_cells(); ++c) {
    const auto& nodes = dofs.cell_nodes(c);
    const double h = dofs.mesh().cells()[c].size();
    const fem::LocalVector<2> ue = fem::gather<2>(u.values, nodes);
    for (int q = 0; q < rule.size(); ++q)
      worst = std::max(worst, constitutive::ellipticity_ratio(
                                  strain_of(strain_matrix(rule.shapes[q], h), ue), m));
  }
  return worst;
}

MechanicsResult solve_mechanics(const DofMap& dofs, const NodalField& u_start,
                                const NodalField& phi_frozen, const NodalField& u_prev_iter,
                                const fem::DirichletValues& dirichlet, const MechanicsConfig& cfg,
                                const MaterialParams& m, const SolveOptions& options) {
  cfg.validate();
  check_fields(dofs, u_start, phi_frozen);

  fem::LinearSolver local_solver;
  fem::LinearSolver& solver = options.solver != nullptr ? *options.solver : local_solver;

  detail::NewtonProblem problem;
  problem.dofs = &dofs;
  problem.components = 2;
  problem.tag = "newton";
  problem.homogeneous.reserve(dirichlet.size());
  for (const auto& [dof, value] : dirichlet) problem.homogeneous.emplace_back(dof, 0.0);

  const BodyForce& force = options.body_force;
  auto make_assembler = [&](Model model) {
    return [&, model](const Eigen::VectorXd& x, fem::AssemblyFlags flags) {
      const Inputs in{dofs, x, phi_frozen.values, &u_prev_iter.values, model, cfg.l_u, m, &force};
      return fem::assemble<2>(dofs, kernel(in), flags);
    };
  };

  Eigen::VectorXd x = u_start.values;
  fem::distribute_constraints(dofs, 2, x);

  const bool limited = cfg.model == Model::nlsl && m.beta > 0.0;
  if (!limited) {
    fem::set_dirichlet(dirichlet, x);
    fem::distribute_constraints(dofs, 2, x);
    problem.assemble = make_assembler(cfg.model);
    detail::NewtonOutcome out = detail::newton_solve(problem, std::move(x), cfg.newton_tol,
                                                     cfg.max_newton, cfg.line_search, solver,
                                                     options.log);
    MechanicsResult res;
    res.u = NodalField{fem::FieldKind::displacement, std::move(out.x)};
    res.iterations = out.iterations;
    res.history = std::move(out.history);
    res.max_ellipticity = m.beta > 0.0 ? max_ellipticity_ratio(dofs, res.u, m) : 0.0;
    return res;
  }

  // Strain-limiting: the start must stay inside the admissible set. Newton
  // starts from the first admissible of (linear solve, linear lift of the
  // boundary increment, direct lift); the boundary increment is halved
  // whenever no admissible path is found.
  problem.assemble = make_assembler(Model::nlsl);
  static const BodyForce no_force;
  const auto linear_step = [&](const Eigen::VectorXd& from, const BodyForce* f,
                               const fem::DirichletValues& increment) {
    const Inputs in{dofs, from, phi_frozen.values, &u_prev_iter.values, Model::lefm, cfg.l_u, m, f};
    fem::SparseSystem sys = fem::assemble<2>(dofs, kernel(in), {.matrix = true, .vector = true});
    if (f == &no_force) sys.rhs.setZero();
    sys.rhs = -sys.rhs;
    fem::apply_dirichlet(sys, increment);
    Eigen::VectorXd dx = solver.solve(sys.matrix, sys.rhs);
    fem::distribute_constraints(dofs, 2, dx);
    return Eigen::VectorXd(from + dx);
  };

  int extra = 0;
  std::vector<NewtonRecord> history;
  double done = 0.0;
  double step = 1.0;
  bool first = true;
  while (done < 1.0) {
    const double t = std::min(1.0, done + step);
    fem::DirichletValues increment;
    increment.reserve(dirichlet.size());
    for (const auto& [dof, value] : dirichlet) {
      const double from = x(dof);
      const double start = u_start.values(dof);
      increment.emplace_back(dof, start + t * (value - start) - from);
    }

    std::vector<Eigen::VectorXd> candidates;
    if (first && options.warm_start && cfg.warm_start_linear)
      candidates.push_back(linear_step(x, &force, increment));
    candidates.push_back(linear_step(x, &no_force, increment));
    Eigen::VectorXd direct = x;
    for (const auto& [dof, inc] : increment) direct(dof) += inc;
    fem::distribute_constraints(dofs, 2, direct);
    candidates.push_back(std::move(direct));
    extra += static_cast<int>(candidates.size()) - 1;

    const Eigen::VectorXd* start = nullptr;
    for (const auto& c : candidates)
      if (std::isfinite(detail::trial_residual(problem, c))) {
        start = &c;
        break;
      }

    bool ok = false;
    if (start != nullptr) {
      try {
        detail::NewtonOutcome out = detail::newton_solve(problem, *start, cfg.newton_tol,
                                                         cfg.max_newton, cfg.line_search, solver,
                                                         options.log);
        x = std::move(out.x);
        extra += out.iterations;
        history.insert(history.end(), out.history.begin(), out.history.end());
        ok = true;
      } catch (const LimitExceeded&) {
        if (step <= cfg.min_load_fraction) throw;
      } catch (const NonConvergence&) {
        if (step <= cfg.min_load_fraction) throw;
      }
    } else if (step <= cfg.min_load_fraction) {
      throw LimitExceeded(std::numeric_limits<double>::infinity());
    }
    first = false;
    if (ok) {
      done = t;
      step = std::min(2.0 * step, 1.0);
    } else {
      step *= 0.5;
      if (options.log.out != nullptr)
        *options.log.out << "# newton: boundary increment reduced to " << step << "\n";
    }
  }

  MechanicsResult res;
  res.u = NodalField{fem::FieldKind::displacement, std::move(x)};
  res.iterations = extra;
  res.history = std::move(history);
  res.max_ellipticity = max_ellipticity_ratio(dofs, res.u, m);
  return res;
}

}  // namespace limitfrac::mechanics
