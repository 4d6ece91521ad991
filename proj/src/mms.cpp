#include "limitfrac/mms.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "limitfrac/mechanics.hpp"
#include "limitfrac/mesh.hpp"

namespace limitfrac::mms {

using constitutive::Model;
using constitutive::SymTensor2;

std::array<double, 2> exact_displacement(fem::Point p) {
  return {std::sin(p.x) * std::sin(p.y), std::cos(p.x) * std::cos(p.y)};
}

SymTensor2 exact_strain(fem::Point p) {
  // u1,x = cos x sin y, u1,y = sin x cos y, u2,x = -sin x cos y, u2,y = -cos x sin y
  const double u1x = std::cos(p.x) * std::sin(p.y);
  const double u1y = std::sin(p.x) * std::cos(p.y);
  const double u2x = -std::sin(p.x) * std::cos(p.y);
  const double u2y = -std::cos(p.x) * std::sin(p.y);
  return {u1x, u2y, 0.5 * (u1y + u2x)};
}

std::array<double, 2> forcing(fem::Point p, const constitutive::MaterialParams& m, Model model,
                              double fd_step) {
  if (model == Model::lefm) {
    // -div sigma = -mu lap(u) - (lambda + mu) grad(div u)
    const double sx = std::sin(p.x), cx = std::cos(p.x);
    const double sy = std::sin(p.y), cy = std::cos(p.y);
    const double lap1 = -2.0 * sx * sy;
    const double lap2 = -2.0 * cx * cy;
    const double graddiv1 = -sx * sy + sx * sy;  // d/dx (cos x sin y - cos x sin y)
    const double graddiv2 = cx * cy - cx * cy;
    return {-m.mu * lap1 - (m.lambda + m.mu) * graddiv1,
            -m.mu * lap2 - (m.lambda + m.mu) * graddiv2};
  }
  const double h = fd_step;
  const auto s = [&](double x, double y) {
    return constitutive::stress(Model::nlsl, exact_strain({x, y}), m);
  };
  const SymTensor2 xp = s(p.x + h, p.y), xm = s(p.x - h, p.y);
  const SymTensor2 yp = s(p.x, p.y + h), ym = s(p.x, p.y - h);
  const double div1 = (xp.xx - xm.xx + yp.xy - ym.xy) / (2.0 * h);
  const double div2 = (xp.xy - xm.xy + yp.yy - ym.yy) / (2.0 * h);
  return {-div1, -div2};
}

fem::DirichletValues boundary_values(const fem::DofMap& dofs, const fem::VectorFunction& g) {
  std::set<int> nodes;
  for (auto id : {fem::BoundaryId::bottom, fem::BoundaryId::right, fem::BoundaryId::top,
                  fem::BoundaryId::left})
    for (int n : dofs.boundary_nodes(id)) nodes.insert(n);
  fem::DirichletValues out;
  for (int n : nodes) {
    const auto v = g(dofs.node_point(n));
    out.emplace_back(2 * n, v[0]);
    out.emplace_back(2 * n + 1, v[1]);
  }
  return out;
}

double dof_rate(double e_prev, double e, int n_prev, int n) {
  return 2.0 * std::log(e_prev / e) / std::log(static_cast<double>(n) / n_prev);
}

std::vector<CycleResult> convergence_study(const RunConfig& cfg, int cycles,
                                           std::ostream* progress) {
  const auto m = cfg.resolved_material(1.0);
  mechanics::MechanicsConfig mc = cfg.mechanics;
  mc.model = cfg.model;
  const double fd = cfg.mms_fd_step;
  const Model model = cfg.model;

  std::vector<CycleResult> rows;
  for (int c = 1; c <= cycles; ++c) {
    const int level = cfg.mms_first_level + c - 1;
    auto mesh = std::make_shared<mesh::QuadMesh>(mesh::QuadMesh::unit_square());
    mesh->refine_global(level);
    const fem::DofMap dofs(mesh);

    mechanics::SolveOptions opt;
    opt.warm_start = true;
    opt.body_force = [&](fem::Point p) { return forcing(p, m, model, fd); };
    const auto bc = boundary_values(dofs, exact_displacement);
    const auto zero = fem::NodalField::zeros(fem::FieldKind::displacement, dofs);
    const auto ones = fem::NodalField::constant(fem::FieldKind::phasefield, dofs, 1.0);
    const auto res = mechanics::solve_mechanics(dofs, zero, ones, zero, bc, mc, m, opt);

    CycleResult r;
    r.cycle = c;
    r.level = level;
    r.h = mesh->h_min();
    r.cells = mesh->n_cells();
    r.dofs = 2 * dofs.n_nodes();
    r.error = fem::l2_error(dofs, res.u, fem::VectorFunction(exact_displacement));
    r.newton = res.iterations;
    if (!rows.empty()) r.rate = dof_rate(rows.back().error, r.error, rows.back().dofs, r.dofs);
    rows.push_back(r);
    if (progress != nullptr) {
      print_table(*progress, {r});
      progress->flush();
    }
  }
  return rows;
}

void print_table(std::ostream& os, const std::vector<CycleResult>& rows) {
  char buf[160];
  for (const auto& r : rows) {
    if (r.rate)
      std::snprintf(buf, sizeof buf, "%5d %12.7f %8d %8d %18.12f %8.4f\n", r.cycle, r.h, r.cells,
                    r.dofs, r.error, *r.rate);
    else
      std::snprintf(buf, sizeof buf, "%5d %12.7f %8d %8d %18.12f %8s\n", r.cycle, r.h, r.cells,
                    r.dofs, r.error, "-");
    os << buf;
  }
}

void write_table_csv(std::ostream& os, const std::vector<CycleResult>& rows) {
  os << "cycle,h,cells,dofs,l2_error,rate,newton\n";
  const auto prec = os.precision(17);
  for (const auto& r : rows) {
    os << r.cycle << ',' << r.h << ',' << r.cells << ',' << r.dofs << ',' << r.error << ',';
    if (r.rate) os << *r.rate;
    os << ',' << r.newton << '\n';
  }
  os.precision(prec);
}

}  // namespace limitfrac::mms
