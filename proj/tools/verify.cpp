#include "verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/experiments.hpp"
#include "limitfrac/mechanics.hpp"
#include "limitfrac/mesh.hpp"
#include "limitfrac/phasefield.hpp"

namespace limitfrac::tools {

namespace {

using constitutive::MaterialParams;
using constitutive::Model;
using constitutive::SymTensor2;
using fem::NodalField;

std::shared_ptr<mesh::QuadMesh> hanging_mesh() {
  auto m = std::make_shared<mesh::QuadMesh>(mesh::QuadMesh::unit_square());
  m->refine_global(2);
  m->refine_where(mesh::box_marker({0.0, 0.0, 0.3, 0.3}), 2);
  return m;
}

bool check(std::ostream& os, const std::string& name, double value, double bound) {
  const bool ok = value <= bound;
  os << (ok ? "ok    " : "FAIL  ") << name << "  (" << value << " <= " << bound << ")\n";
  return ok;
}

double constitutive_round_trip(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MaterialParams m;
  m.lambda = 1.3;
  m.mu = 0.7;
  m.alpha = 0.5;
  m.beta = 0.8;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    SymTensor2 eps{u(rng), u(rng), u(rng)};
    const double s = constitutive::half_norm_strain(eps, m);
    eps *= 0.9 * u(rng) / (m.beta * s);  // admissible by construction
    const SymTensor2 back = constitutive::strain_nl(constitutive::stress_sl(eps, m), m);
    worst = std::max(worst, (back - eps).frobenius() / std::max(eps.frobenius(), 1e-300));
  }
  return worst;
}

double patch_test() {
  auto mesh = hanging_mesh();
  const fem::DofMap dofs(mesh);
  MaterialParams m;
  const auto exact = [](fem::Point p) -> std::array<double, 2> {
    return {0.01 * p.x + 0.02 * p.y + 0.003, -0.015 * p.x + 0.005 * p.y};
  };
  fem::DirichletValues bc = mms::boundary_values(dofs, exact);
  mechanics::MechanicsConfig cfg;
  cfg.l_u = 0.0;
  const auto zero = NodalField::zeros(fem::FieldKind::displacement, dofs);
  const auto ones = NodalField::constant(fem::FieldKind::phasefield, dofs, 1.0);
  const auto res = mechanics::solve_mechanics(dofs, zero, ones, zero, bc, cfg, m);
  const auto ref = fem::interpolate(dofs, fem::FieldKind::displacement, exact);
  return (res.u.values - ref.values).lpNorm<Eigen::Infinity>();
}

double partition_of_unity(std::mt19937_64& rng) {
  auto mesh = hanging_mesh();
  const fem::DofMap dofs(mesh);
  const auto c = NodalField::constant(fem::FieldKind::phasefield, dofs, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k)
    worst = std::max(worst, std::abs(fem::evaluate_scalar(dofs, c.values, {u(rng), u(rng)}) - 1.0));
  return worst;
}

// Worst relative error of J v against central differences of the residual.
// Hanging-node rows are excluded: assembly turns them into identity rows.
double fd_gap(const fem::DofMap& dofs, int components,
              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
              const fem::SparseMatrix& jac, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
              double h) {
  Eigen::VectorXd fd = (residual(x + h * v) - residual(x - h * v)) / (2.0 * h);
  Eigen::VectorXd jv = jac * v;
  fem::constrain_vector(dofs, components, {}, fd);
  fem::constrain_vector(dofs, components, {}, jv);
  return (fd - jv).norm() / std::max(jv.norm(), 1e-300);
}

double mechanics_tangent(std::mt19937_64& rng) {
  auto mesh = hanging_mesh();
  const fem::DofMap dofs(mesh);
  MaterialParams m;
  m.alpha = 0.5;
  m.beta = 2.0;
  m.kappa = 1e-3;
  mechanics::MechanicsConfig cfg;
  cfg.model = Model::nlsl;
  cfg.l_u = 1e-3;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NodalField x = NodalField::zeros(fem::FieldKind::displacement, dofs);
  NodalField phi = NodalField::zeros(fem::FieldKind::phasefield, dofs);
  for (auto& v : x.values) v = 0.002 * u(rng);
  for (auto& v : phi.values) v = 0.5 + 0.5 * u(rng);
  fem::distribute_constraints(dofs, 2, x.values);
  fem::distribute_constraints(dofs, 1, phi.values);
  Eigen::VectorXd dir = Eigen::VectorXd::NullaryExpr(x.values.size(), [&] { return u(rng); });
  fem::distribute_constraints(dofs, 2, dir);
  const auto prev = x;
  const auto r = [&](const Eigen::VectorXd& y) {
    return mechanics::mech_residual(dofs, {fem::FieldKind::displacement, y}, phi, prev, cfg, m);
  };
  return fd_gap(dofs, 2, r, mechanics::mech_jacobian(dofs, x, phi, cfg, m), x.values, dir, 1e-6);
}

double phasefield_tangent(std::mt19937_64& rng) {
  auto mesh = hanging_mesh();
  const fem::DofMap dofs(mesh);
  MaterialParams m;
  m.alpha = 1.0;
  m.beta = 1.0;
  m.xi = 0.1;
  m.kappa = 1e-3;
  phasefield::PhaseFieldConfig cfg;
  cfg.model = Model::nlsl;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NodalField disp = NodalField::zeros(fem::FieldKind::displacement, dofs);
  NodalField phi = NodalField::zeros(fem::FieldKind::phasefield, dofs);
  for (auto& v : disp.values) v = 0.002 * u(rng);
  for (auto& v : phi.values) v = 0.5 + 0.4 * u(rng);
  fem::distribute_constraints(dofs, 2, disp.values);
  fem::distribute_constraints(dofs, 1, phi.values);
  NodalField prev = phi;
  prev.values.array() += 0.05;  // keep the penalty away from its switching surface
  auto pen = phasefield::PenaltyState::zeros(dofs, 10.0);
  Eigen::VectorXd dir = Eigen::VectorXd::NullaryExpr(phi.values.size(), [&] { return u(rng); });
  fem::distribute_constraints(dofs, 1, dir);
  const auto r = [&](const Eigen::VectorXd& y) {
    return phasefield::pf_residual(dofs, {fem::FieldKind::phasefield, y}, disp, prev, phi, pen,
                                   cfg, m);
  };
  return fd_gap(dofs, 1, r, phasefield::pf_jacobian(dofs, phi, disp, prev, pen, cfg, m), phi.values, dir,
                1e-6);
}

}  // namespace

bool verify(std::ostream& os) {
  std::mt19937_64 rng(20240601);
  bool ok = true;
  const auto mesh = hanging_mesh();
  ok &= check(os, "mesh 2:1 balance", mesh->is_balanced() ? 0.0 : 1.0, 0.0);
  ok &= check(os, "partition of unity", partition_of_unity(rng), 1e-12);
  ok &= check(os, "linear patch test on hanging-node mesh", patch_test(), 1e-10);
  ok &= check(os, "stress_sl / strain_nl inverse pair", constitutive_round_trip(rng), 1e-10);
  ok &= check(os, "mechanics tangent vs finite differences", mechanics_tangent(rng), 1e-5);
  ok &= check(os, "phase-field tangent vs finite differences", phasefield_tangent(rng), 1e-6);
  os << (ok ? "all checks passed\n" : "some checks failed\n");
  return ok;
}

}  // namespace limitfrac::tools
