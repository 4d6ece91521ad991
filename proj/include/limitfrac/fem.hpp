#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "limitfrac/mesh.hpp"

namespace limitfrac::fem {

using mesh::Point;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Bilinear basis on the reference square [0,1]^2, nodes counter-clockwise
/// from (0,0). Gradients are with respect to the reference coordinates.
struct ShapeEval {
  std::array<double, 4> values{};
  std::array<std::array<double, 2>, 4> grads{};
};
ShapeEval shape_eval(double s, double t);

/// Tensor Gauss rule on [0,1]^2 with shape data tabulated at its points.
/// Weights sum to 1.
struct QuadratureRule {
  int order = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  std::vector<ShapeEval> shapes;

  int size() const { return static_cast<int>(points.size()); }
};
/// n points per direction, n in {1, 2, 3}.
const QuadratureRule& gauss(int n);

enum class BoundaryId { bottom = 0, right = 1, top = 2, left = 3 };

/// Geometric crack along y = `y` from the tip at x_tip to x_end. Vertices on
/// (x_tip, x_end] are duplicated so the faces move independently.
struct Slit {
  double x_tip = 0.5;
  double x_end = 1.0;
  double y = 0.5;
};

/// Node numbering for Q1 fields on a QuadMesh. Scalar fields use one DOF per
/// node; vector fields interleave components (2 n, 2 n + 1).
class DofMap {
 public:
  explicit DofMap(std::shared_ptr<const mesh::QuadMesh> mesh, std::optional<Slit> slit = {});

  const mesh::QuadMesh& mesh() const { return *mesh_; }
  int n_nodes() const { return static_cast<int>(points_.size()); }
  int n_cells() const { return static_cast<int>(cell_nodes_.size()); }
  const std::array<int, 4>& cell_nodes(int cell) const { return cell_nodes_[cell]; }
  Point node_point(int node) const { return points_[node]; }
  std::span<const Point> node_points() const { return points_; }

  bool is_constrained(int node) const { return constrained_[node]; }
  /// (master node, weight) pairs; an unconstrained node is its own master.
  std::span<const std::pair<int, double>> masters(int node) const;
  const std::vector<int>& constrained_nodes() const { return constrained_list_; }

  const std::vector<int>& boundary_nodes(BoundaryId id) const {
    return boundary_[static_cast<int>(id)];
  }
  const std::optional<Slit>& slit() const { return slit_; }
  /// Number of nodes that exist only because of the slit.
  int n_slit_duplicates() const { return n_nodes() - mesh_->n_vertices(); }

 private:
  std::shared_ptr<const mesh::QuadMesh> mesh_;
  std::optional<Slit> slit_;
  std::vector<std::array<int, 4>> cell_nodes_;
  std::vector<Point> points_;
  std::vector<char> constrained_;
  std::vector<int> constrained_list_;
  std::vector<int> master_ptr_;
  std::vector<std::pair<int, double>> master_entries_;
  std::array<std::vector<int>, 4> boundary_;
};

enum class FieldKind { displacement, phasefield };

/// DOF coefficients of a Q1 field: interleaved 2-vectors for displacement,
/// scalars for the phase field.
struct NodalField {
  FieldKind kind = FieldKind::phasefield;
  Eigen::VectorXd values;

  int components() const { return kind == FieldKind::displacement ? 2 : 1; }
  static NodalField zeros(FieldKind kind, const DofMap& dofs);
  static NodalField constant(FieldKind kind, const DofMap& dofs, double value);
};

inline int components(FieldKind kind) { return kind == FieldKind::displacement ? 2 : 1; }

/// What an assembly pass needs from the kernel.
struct AssemblyFlags {
  bool matrix = true;
  bool vector = true;
};

struct CellView {
  int index = 0;
  const mesh::Cell* cell = nullptr;
  std::array<int, 4> nodes{};
  double h = 0.0;
  AssemblyFlags flags;

  double area() const { return h * h; }
  /// Physical coordinates of a reference point.
  Point map(double s, double t) const {
    return {cell->box.x0 + s * h, cell->box.y0 + t * h};
  }
};

template <int C>
using LocalMatrix = Eigen::Matrix<double, 4 * C, 4 * C>;
template <int C>
using LocalVector = Eigen::Matrix<double, 4 * C, 1>;

/// Per-cell integrand: fills the local matrix and/or vector (both are zeroed
/// before the call). Local DOF order: node-major, component-minor.
template <int C>
using CellKernel = std::function<void(const CellView&, LocalMatrix<C>&, LocalVector<C>&)>;

struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd solution;
};

/// Sum of local contributions with hanging-node constraints folded in.
/// Constrained rows/columns become identity rows with zero right-hand side.
/// Deterministic: cells are reduced in mesh order regardless of threads.
template <int C>
SparseSystem assemble(const DofMap& dofs, const CellKernel<C>& kernel, AssemblyFlags flags = {});

/// Dirichlet data as (dof, value) pairs.
using DirichletValues = std::vector<std::pair<int, double>>;

/// Row/column elimination with right-hand-side lift.
void apply_dirichlet(SparseSystem& system, const DirichletValues& values);

/// Zeroes the entries of `v` at Dirichlet DOFs and hanging-node DOFs.
void constrain_vector(const DofMap& dofs, int components, const DirichletValues& dirichlet,
                      Eigen::VectorXd& v);

/// Sets hanging-node DOFs to the interpolant of their masters.
void distribute_constraints(const DofMap& dofs, int components, Eigen::VectorXd& v);

/// Writes Dirichlet values into `v`.
void set_dirichlet(const DirichletValues& dirichlet, Eigen::VectorXd& v);

/// Gathers the 4*C cell coefficients of a global vector.
template <int C>
LocalVector<C> gather(const Eigen::VectorXd& v, const std::array<int, 4>& nodes) {
  LocalVector<C> out;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < C; ++c) out(C * a + c) = v(C * nodes[a] + c);
  return out;
}

double evaluate_scalar(const DofMap& dofs, const Eigen::VectorXd& values, Point p);
std::array<double, 2> evaluate_vector(const DofMap& dofs, const Eigen::VectorXd& values, Point p);

/// Nodal interpolant of an analytic field.
NodalField interpolate(const DofMap& dofs, FieldKind kind,
                       const std::function<std::array<double, 2>(Point)>& f);

using VectorFunction = std::function<std::array<double, 2>(Point)>;
using ScalarFunction = std::function<double(Point)>;

/// L2 norm of (field - exact) with 3x3 Gauss per cell.
double l2_error(const DofMap& dofs, const NodalField& field, const VectorFunction& exact);
double l2_error(const DofMap& dofs, const NodalField& field, const ScalarFunction& exact);

/// Worker count for per-cell kernel evaluation (LIMITFRAC_THREADS, default 1).
int assembly_threads();

}  // namespace limitfrac::fem
