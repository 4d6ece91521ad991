#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "limitfrac/config.hpp"
#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"

namespace limitfrac::mms {

/// u = (sin x sin y, cos x cos y).
std::array<double, 2> exact_displacement(fem::Point p);
constitutive::SymTensor2 exact_strain(fem::Point p);

/// f = -div sigma(u_exact). Closed form for LEFM; for the strain-limiting law
/// the divergence of the closed-form stress is taken by central differences.
std::array<double, 2> forcing(fem::Point p, const constitutive::MaterialParams& m,
                              constitutive::Model model, double fd_step = 1e-6);

/// Dirichlet data equal to `g` at every boundary node.
fem::DirichletValues boundary_values(const fem::DofMap& dofs, const fem::VectorFunction& g);

struct CycleResult {
  int cycle = 0;
  int level = 0;
  double h = 0.0;
  int cells = 0;
  int dofs = 0;  ///< vector DOFs
  double error = 0.0;
  std::optional<double> rate;  ///< 2 ln(e_prev/e) / ln(N/N_prev)
  int newton = 0;
};

/// Convergence rate with respect to the DOF count N (d = 2).
double dof_rate(double e_prev, double e, int n_prev, int n);

std::vector<CycleResult> convergence_study(const RunConfig& cfg, int cycles,
                                           std::ostream* progress = nullptr);

void print_table(std::ostream& os, const std::vector<CycleResult>& rows);
void write_table_csv(std::ostream& os, const std::vector<CycleResult>& rows);

}  // namespace limitfrac::mms
