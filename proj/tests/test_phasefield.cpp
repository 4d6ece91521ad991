#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "limitfrac/errors.hpp"
#include "limitfrac/phasefield.hpp"

using namespace limitfrac;
using namespace limitfrac::phasefield;
using constitutive::SymTensor2;
using fem::FieldKind;
using fem::NodalField;

namespace {

MaterialParams material(double beta = 0.0) {
  MaterialParams m;
  m.lambda = 1.5;
  m.mu = 1.0;
  m.alpha = 1.0;
  m.beta = beta;
  m.gc = 0.8;
  m.xi = 0.05;
  m.kappa = 1e-2;
  return m;
}

NodalField uniform_strain(const fem::DofMap& dofs, const SymTensor2& e) {
  return fem::interpolate(dofs, FieldKind::displacement, [&](fem::Point p) {
    return std::array<double, 2>{e.xx * p.x + e.xy * p.y, e.xy * p.x + e.yy * p.y};
  });
}

/// Stress power sigma(eps):eps of the chosen law.
double driving(Model model, const SymTensor2& e, const MaterialParams& m) {
  return constitutive::ddot(constitutive::stress(model, e, m), e);
}

}  // namespace

TEST_CASE("intact state has zero residual") {
  const fem::DofMap dofs(test::hanging_mesh());
  const MaterialParams m = material();
  const auto zero = NodalField::zeros(FieldKind::displacement, dofs);
  const auto ones = NodalField::constant(FieldKind::phasefield, dofs, 1.0);
  const auto pen = PenaltyState::zeros(dofs, 1e4);
  PhaseFieldConfig cfg;
  const Eigen::VectorXd r = pf_residual(dofs, ones, zero, ones, ones, pen, cfg, m);
  CHECK(r.lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK(active_indicator(pen, ones, ones).sum() == 0.0);
}

TEST_CASE("multiplier update") {
  const fem::DofMap dofs(test::uniform_mesh(1));
  PenaltyState pen = PenaltyState::zeros(dofs, 10.0);
  pen.omega << 0.0, 1.0, 2.0, 0.5, 0.0, 0.0, 3.0, 0.0, 0.1;
  NodalField phi = NodalField::constant(FieldKind::phasefield, dofs, 0.5);
  NodalField prev = phi;
  prev.values << 0.4, 0.7, 0.5, 0.6, 0.5, 0.2, 0.9, 0.5, 0.52;
  const PenaltyState next = update_multiplier(pen, phi, prev);
  CHECK(next.gamma == 10.0);
  for (int i = 0; i < 9; ++i) {
    const double expected = std::max(0.0, pen.omega(i) + 10.0 * (0.5 - prev.values(i)));
    CHECK(next.omega(i) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(next.omega(i) >= 0.0);
  }
  const Eigen::VectorXd eta = active_indicator(pen, phi, prev);
  for (int i = 0; i < 9; ++i)
    CHECK(eta(i) == (pen.omega(i) + 10.0 * (0.5 - prev.values(i)) > 0.0 ? 1.0 : 0.0));
}

TEST_CASE("uniform driving force gives the closed-form phase field") {
  const SymTensor2 e{0.02, -0.01, 0.015};
  for (Model model : {Model::lefm, Model::nlsl}) {
    const MaterialParams m = material(model == Model::nlsl ? 10.0 : 0.0);
    const double c = driving(model, e, m);
    const double expected = m.gc / (m.xi * (1.0 - m.kappa) * c + m.gc);
    for (auto mesh : {test::uniform_mesh(3), test::hanging_mesh()}) {
      const fem::DofMap dofs(mesh);
      const auto u = uniform_strain(dofs, e);
      const auto ones = NodalField::constant(FieldKind::phasefield, dofs, 1.0);
      const auto pen = PenaltyState::zeros(dofs, 1e4);
      PhaseFieldConfig cfg;
      cfg.model = model;
      cfg.l_phi = 0.0;
      const auto res = solve_phasefield(dofs, u, ones, ones, pen, cfg, m);
      CHECK(expected < 1.0);
      CHECK((res.phi.values.array() - expected).abs().maxCoeff() < 1e-10);
      CHECK(res.in_box);
      CHECK(res.min_phi == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("penalty holds phi at its previous value") {
  const SymTensor2 e{0.05, 0.0, 0.0};
  const MaterialParams m = material();
  const fem::DofMap dofs(test::uniform_mesh(3));
  const auto u = uniform_strain(dofs, e);
  const double free_value = m.gc / (m.xi * (1.0 - m.kappa) * driving(Model::lefm, e, m) + m.gc);
  const auto prev = NodalField::constant(FieldKind::phasefield, dofs, 0.5 * free_value);
  const double gamma = 1e6;
  const auto pen = PenaltyState::zeros(dofs, gamma);
  PhaseFieldConfig cfg;
  cfg.l_phi = 0.0;
  const auto res = solve_phasefield(dofs, u, prev, prev, pen, cfg, m);
  // Pointwise balance with the lumped penalty:
  // (1-kappa) phi C - Gc/xi (1 - phi) + gamma (phi - prev) = 0.
  const double c = driving(Model::lefm, e, m);
  const double a = (1.0 - m.kappa) * c + m.gc / m.xi + gamma;
  const double expected = (m.gc / m.xi + gamma * prev.values(0)) / a;
  CHECK(expected > prev.values(0));
  CHECK((res.phi.values.array() - expected).abs().maxCoeff() < 1e-10);
}

TEST_CASE("Jacobian structure") {
  const fem::DofMap dofs(test::uniform_mesh(2));
  const auto zero = NodalField::zeros(FieldKind::displacement, dofs);
  const auto ones = NodalField::constant(FieldKind::phasefield, dofs, 1.0);
  const auto pen = PenaltyState::zeros(dofs, 1e4);
  PhaseFieldConfig cfg;
  cfg.l_phi = 0.0;

  MaterialParams a = material();
  MaterialParams b = a;
  b.kappa = 0.5;
  const Eigen::MatrixXd ja(pf_jacobian(dofs, ones, zero, ones, pen, cfg, a));
  const Eigen::MatrixXd jb(pf_jacobian(dofs, ones, zero, ones, pen, cfg, b));
  CHECK((ja - jb).norm() == 0.0);
  CHECK((ja - ja.transpose()).norm() <= 1e-13 * ja.norm());
  // Mass part sums to Gc/xi times the area; the Laplacian part sums to zero.
  CHECK(ja.sum() == doctest::Approx(a.gc / a.xi).epsilon(1e-12));

  // Every node active: the lumped penalty adds gamma times the area.
  NodalField lower = ones;
  lower.values.array() -= 0.1;
  const Eigen::MatrixXd jp(pf_jacobian(dofs, ones, zero, lower, pen, cfg, a));
  CHECK((jp - ja).sum() == doctest::Approx(pen.gamma).epsilon(1e-12));
  CHECK(((jp - ja) - Eigen::MatrixXd((jp - ja).diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("lumped penalty term") {
  const fem::DofMap dofs(test::uniform_mesh(2));
  const MaterialParams m = material();
  const auto u = uniform_strain(dofs, {0.01, 0.0, 0.0});
  const auto phi = NodalField::constant(FieldKind::phasefield, dofs, 0.6);
  const auto prev = NodalField::constant(FieldKind::phasefield, dofs, 0.5);
  PhaseFieldConfig cfg;
  PenaltyState p1 = PenaltyState::zeros(dofs, 100.0);
  PenaltyState p2 = PenaltyState::zeros(dofs, 300.0);
  const Eigen::VectorXd diff = pf_residual(dofs, phi, u, prev, phi, p2, cfg, m) -
                               pf_residual(dofs, phi, u, prev, phi, p1, cfg, m);
  const double h = 0.25;
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const fem::Point p = dofs.node_point(n);
    const int on_edges = (p.x == 0.0 || p.x == 1.0) + (p.y == 0.0 || p.y == 1.0);
    const double lumped = h * h / (1 << on_edges);
    CHECK(diff(n) == doctest::Approx(lumped * 200.0 * 0.1).epsilon(1e-12));
  }
}

TEST_CASE("Jacobian matches central differences away from the switch") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Model model : {Model::lefm, Model::nlsl}) {
    const fem::DofMap dofs(test::hanging_mesh());
    MaterialParams m = material(model == Model::nlsl ? 1.0 : 0.0);
    m.xi = 0.1;
    m.kappa = 1e-3;
    PhaseFieldConfig cfg;
    cfg.model = model;
    cfg.l_phi = 1e-3;
    NodalField disp = NodalField::zeros(FieldKind::displacement, dofs);
    NodalField phi = NodalField::zeros(FieldKind::phasefield, dofs);
    for (auto& v : disp.values) v = 0.002 * u(rng);
    for (auto& v : phi.values) v = 0.5 + 0.4 * u(rng);
    fem::distribute_constraints(dofs, 2, disp.values);
    fem::distribute_constraints(dofs, 1, phi.values);
    // Half the nodes active, every node at least 0.05 from the switch.
    NodalField prev = phi;
    for (int n = 0; n < dofs.n_nodes(); ++n) prev.values(n) += n % 2 ? 0.05 : -0.05;
    const auto pen = PenaltyState::zeros(dofs, 10.0);
    Eigen::VectorXd dir = Eigen::VectorXd::NullaryExpr(phi.values.size(), [&] { return u(rng); });
    fem::distribute_constraints(dofs, 1, dir);
    const auto r = [&](const Eigen::VectorXd& y) {
      return pf_residual(dofs, {FieldKind::phasefield, y}, disp, prev, phi, pen, cfg, m);
    };
    const double h = 1e-6;
    Eigen::VectorXd fd = (r(phi.values + h * dir) - r(phi.values - h * dir)) / (2.0 * h);
    Eigen::VectorXd jv = pf_jacobian(dofs, phi, disp, prev, pen, cfg, m) * dir;
    fem::constrain_vector(dofs, 1, {}, fd);
    fem::constrain_vector(dofs, 1, {}, jv);
    CHECK((fd - jv).norm() <= 1e-8 * jv.norm());
  }
}

TEST_CASE("config validation") {
  PhaseFieldConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.line_search.max_backtracks == 0);
  cfg.l_phi = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
