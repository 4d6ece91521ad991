#pragma once

#include <memory>
#include <random>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/mesh.hpp"

namespace limitfrac::test {

inline std::shared_ptr<mesh::QuadMesh> uniform_mesh(int levels) {
  auto m = std::make_shared<mesh::QuadMesh>(mesh::QuadMesh::unit_square());
  m->refine_global(levels);
  return m;
}

/// Uniform 4x4 mesh with a two-level refined corner: hanging nodes on two
/// refinement interfaces.
inline std::shared_ptr<mesh::QuadMesh> hanging_mesh() {
  auto m = uniform_mesh(2);
  m->refine_where(mesh::box_marker({0.0, 0.0, 0.3, 0.3}), 2);
  return m;
}

inline constitutive::SymTensor2 random_tensor(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

/// Random strain with beta*|E^1/2[eps]| uniform in (0, max_ratio).
inline constitutive::SymTensor2 random_admissible(std::mt19937_64& rng,
                                                  const constitutive::MaterialParams& m,
                                                  double max_ratio = 0.95) {
  std::uniform_real_distribution<double> u(0.01, max_ratio);
  constitutive::SymTensor2 eps = random_tensor(rng);
  const double s = constitutive::half_norm_strain(eps, m);
  return eps * (u(rng) / (m.beta * s));
}

inline double rel_diff(const constitutive::SymTensor2& a, const constitutive::SymTensor2& b) {
  return (a - b).frobenius() / std::max(b.frobenius(), 1e-300);
}

/// Zeroes hanging-node and Dirichlet rows of `v` and returns it.
inline Eigen::VectorXd constrained(const fem::DofMap& dofs, int components,
                                   const fem::DirichletValues& bc, Eigen::VectorXd v) {
  fem::constrain_vector(dofs, components, bc, v);
  return v;
}

}  // namespace limitfrac::test
