#include "limitfrac/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "limitfrac/errors.hpp"

namespace limitfrac::fem {

ShapeEval shape_eval(double s, double t) {
  ShapeEval e;
  e.values = {(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t};
  e.grads = {{{-(1.0 - t), -(1.0 - s)}, {1.0 - t, -s}, {t, s}, {-t, 1.0 - s}}};
  return e;
}

namespace {

QuadratureRule make_gauss(int n) {
  std::vector<double> x;
  std::vector<double> w;
  switch (n) {
    case 1:
      x = {0.5};
      w = {1.0};
      break;
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      x = {0.5 - d, 0.5 + d};
      w = {0.5, 0.5};
      break;
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      x = {0.5 - d, 0.5, 0.5 + d};
      w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default:
      throw ConfigError("gauss: unsupported order " + std::to_string(n));
  }
  QuadratureRule rule;
  rule.order = n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rule.points.push_back({x[i], x[j]});
      rule.weights.push_back(w[i] * w[j]);
      rule.shapes.push_back(shape_eval(x[i], x[j]));
    }
  }
  return rule;
}

bool on_line(double a, double b, double scale) { return std::abs(a - b) <= 1e-10 * scale; }

}  // namespace

const QuadratureRule& gauss(int n) {
  static const std::array<QuadratureRule, 3> rules = {make_gauss(1), make_gauss(2), make_gauss(3)};
  if (n < 1 || n > 3) throw ConfigError("gauss: unsupported order " + std::to_string(n));
  return rules[n - 1];
}

DofMap::DofMap(std::shared_ptr<const mesh::QuadMesh> mesh, std::optional<Slit> slit)
    : mesh_(std::move(mesh)), slit_(slit) {
  const mesh::QuadMesh& m = *mesh_;
  const auto verts = m.vertices();
  const double scale = std::max(m.domain().width(), m.domain().height());
  points_.assign(verts.begin(), verts.end());

  // Upper-face copies of slit vertices.
  std::vector<int> upper(verts.size(), -1);
  if (slit_) {
    bool tip_found = false;
    for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
      const Point p = verts[v];
      if (!on_line(p.y, slit_->y, scale)) continue;
      if (on_line(p.x, slit_->x_tip, scale)) tip_found = true;
      if (p.x > slit_->x_tip + 1e-10 * scale && p.x <= slit_->x_end + 1e-10 * scale) {
        if (m.constraints().contains(v))
          throw ConfigError("DofMap: slit passes through a hanging vertex");
        upper[v] = static_cast<int>(points_.size());
        points_.push_back(p);
      }
    }
    if (!tip_found) throw ConfigError("DofMap: slit tip is not a mesh vertex");
  }

  cell_nodes_.reserve(m.n_cells());
  for (const mesh::Cell& c : m.cells()) {
    std::array<int, 4> nodes = c.vertices;
    if (slit_ && c.centroid().y > slit_->y)
      for (int& n : nodes)
        if (upper[n] >= 0) n = upper[n];
    cell_nodes_.push_back(nodes);
  }

  const int n = n_nodes();
  constrained_.assign(n, 0);
  master_ptr_.assign(n + 1, 0);
  std::vector<std::vector<std::pair<int, double>>> masters(n);
  for (int v = 0; v < n; ++v) masters[v] = {{v, 1.0}};
  for (const auto& [v, hc] : m.constraints()) {
    const bool above = slit_ && verts[v].y > slit_->y;
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < 2; ++k) {
      int p = hc.parents[k];
      if (above && upper[p] >= 0) p = upper[p];
      row.emplace_back(p, hc.weights[k]);
    }
    masters[v] = row;
    constrained_[v] = 1;
    constrained_list_.push_back(v);
  }
  for (int v = 0; v < n; ++v) {
    master_ptr_[v + 1] = master_ptr_[v] + static_cast<int>(masters[v].size());
    master_entries_.insert(master_entries_.end(), masters[v].begin(), masters[v].end());
  }

  const mesh::Box& d = m.domain();
  for (int v = 0; v < n; ++v) {
    const Point p = points_[v];
    if (on_line(p.y, d.y0, scale)) boundary_[static_cast<int>(BoundaryId::bottom)].push_back(v);
    if (on_line(p.x, d.x1, scale)) boundary_[static_cast<int>(BoundaryId::right)].push_back(v);
    if (on_line(p.y, d.y1, scale)) boundary_[static_cast<int>(BoundaryId::top)].push_back(v);
    if (on_line(p.x, d.x0, scale)) boundary_[static_cast<int>(BoundaryId::left)].push_back(v);
  }
}

std::span<const std::pair<int, double>> DofMap::masters(int node) const {
  return {master_entries_.data() + master_ptr_[node],
          static_cast<std::size_t>(master_ptr_[node + 1] - master_ptr_[node])};
}

NodalField NodalField::zeros(FieldKind kind, const DofMap& dofs) {
  return constant(kind, dofs, 0.0);
}

NodalField NodalField::constant(FieldKind kind, const DofMap& dofs, double value) {
  NodalField f;
  f.kind = kind;
  f.values = Eigen::VectorXd::Constant(fem::components(kind) * dofs.n_nodes(), value);
  return f;
}

int assembly_threads() {
  static const int threads = [] {
    const char* env = std::getenv("LIMITFRAC_THREADS");
    if (env == nullptr) return 1;
    const int t = std::atoi(env);
    return t > 0 ? t : 1;
  }();
  return threads;
}

template <int C>
SparseSystem assemble(const DofMap& dofs, const CellKernel<C>& kernel, AssemblyFlags flags) {
  constexpr int N = 4 * C;
  const int n = C * dofs.n_nodes();
  const auto cells = dofs.mesh().cells();

  SparseSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  if (flags.matrix) triplets.reserve(static_cast<std::size_t>(dofs.n_cells()) * N * N + n);

  auto make_view = [&](int c) {
    CellView view;
    view.index = c;
    view.cell = &cells[c];
    view.nodes = dofs.cell_nodes(c);
    view.h = cells[c].size();
    view.flags = flags;
    return view;
  };

  auto check = [&](int c, const LocalMatrix<C>& k, const LocalVector<C>& f) {
    const bool ok = (!flags.matrix || k.allFinite()) && (!flags.vector || f.allFinite());
    if (!ok) throw AssemblyError("assemble: non-finite local contribution in cell " +
                                     std::to_string(c),
                                 c);
  };

  auto scatter = [&](const CellView& view, const LocalMatrix<C>& k, const LocalVector<C>& f) {
    std::array<std::span<const std::pair<int, double>>, 4> m;
    for (int a = 0; a < 4; ++a) m[a] = dofs.masters(view.nodes[a]);
    for (int a = 0; a < 4; ++a) {
      for (int ca = 0; ca < C; ++ca) {
        const int p = C * a + ca;
        for (const auto& [ma, wa] : m[a]) {
          const int gp = C * ma + ca;
          if (flags.vector) sys.rhs(gp) += wa * f(p);
          if (!flags.matrix) continue;
          for (int b = 0; b < 4; ++b)
            for (int cb = 0; cb < C; ++cb) {
              const int q = C * b + cb;
              for (const auto& [mb, wb] : m[b])
                triplets.emplace_back(gp, C * mb + cb, wa * wb * k(p, q));
            }
        }
      }
    }
  };

  const int threads = std::min(assembly_threads(), std::max(1, dofs.n_cells() / 64));
  if (threads <= 1) {
    LocalMatrix<C> k;
    LocalVector<C> f;
    for (int c = 0; c < dofs.n_cells(); ++c) {
      const CellView view = make_view(c);
      k.setZero();
      f.setZero();
      kernel(view, k, f);
      check(c, k, f);
      scatter(view, k, f);
    }
  } else {
    // Kernels run concurrently on a block of cells; the reduction stays in
    // cell order so the result does not depend on the thread count.
    constexpr int kBlock = 4096;
    std::vector<LocalMatrix<C>> ks(kBlock);
    std::vector<LocalVector<C>> fs(kBlock);
    for (int begin = 0; begin < dofs.n_cells(); begin += kBlock) {
      const int end = std::min(dofs.n_cells(), begin + kBlock);
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (int c = begin + t; c < end; c += threads) {
              ks[c - begin].setZero();
              fs[c - begin].setZero();
              kernel(make_view(c), ks[c - begin], fs[c - begin]);
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (int c = begin; c < end; ++c) {
        check(c, ks[c - begin], fs[c - begin]);
        scatter(make_view(c), ks[c - begin], fs[c - begin]);
      }
    }
  }

  if (flags.matrix) {
    for (int node : dofs.constrained_nodes())
      for (int c = 0; c < C; ++c) triplets.emplace_back(C * node + c, C * node + c, 1.0);
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  }
  for (int node : dofs.constrained_nodes())
    for (int c = 0; c < C; ++c) sys.rhs(C * node + c) = 0.0;
  return sys;
}

template SparseSystem assemble<1>(const DofMap&, const CellKernel<1>&, AssemblyFlags);
template SparseSystem assemble<2>(const DofMap&, const CellKernel<2>&, AssemblyFlags);

void apply_dirichlet(SparseSystem& system, const DirichletValues& values) {
  const Eigen::Index n = system.matrix.rows();
  std::vector<char> fixed(n, 0);
  std::vector<double> g(n, 0.0);
  for (const auto& [dof, value] : values) {
    fixed[dof] = 1;
    g[dof] = value;
  }
  for (Eigen::Index j = 0; j < system.matrix.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(system.matrix, j); it; ++it) {
      const Eigen::Index i = it.row();
      if (fixed[j] && !fixed[i]) system.rhs(i) -= it.value() * g[j];
      if (fixed[i] || fixed[j]) it.valueRef() = (i == j) ? 1.0 : 0.0;
    }
  }
  for (const auto& [dof, value] : values) system.rhs(dof) = value;
}

void constrain_vector(const DofMap& dofs, int components, const DirichletValues& dirichlet,
                      Eigen::VectorXd& v) {
  for (const auto& [dof, value] : dirichlet) v(dof) = 0.0;
  for (int node : dofs.constrained_nodes())
    for (int c = 0; c < components; ++c) v(components * node + c) = 0.0;
}

void distribute_constraints(const DofMap& dofs, int components, Eigen::VectorXd& v) {
  for (int node : dofs.constrained_nodes()) {
    for (int c = 0; c < components; ++c) {
      double value = 0.0;
      for (const auto& [m, w] : dofs.masters(node)) value += w * v(components * m + c);
      v(components * node + c) = value;
    }
  }
}

void set_dirichlet(const DirichletValues& dirichlet, Eigen::VectorXd& v) {
  for (const auto& [dof, value] : dirichlet) v(dof) = value;
}

namespace {

template <int C>
std::array<double, C> evaluate(const DofMap& dofs, const Eigen::VectorXd& values, Point p) {
  const int c = dofs.mesh().locate(p);
  if (c < 0) throw Error("evaluate: point outside the domain");
  const mesh::Cell& cell = dofs.mesh().cells()[c];
  const double s = std::clamp((p.x - cell.box.x0) / cell.size(), 0.0, 1.0);
  const double t = std::clamp((p.y - cell.box.y0) / cell.size(), 0.0, 1.0);
  const ShapeEval e = shape_eval(s, t);
  const auto& nodes = dofs.cell_nodes(c);
  std::array<double, C> out{};
  for (int a = 0; a < 4; ++a)
    for (int k = 0; k < C; ++k) out[k] += e.values[a] * values(C * nodes[a] + k);
  return out;
}

}  // namespace

double evaluate_scalar(const DofMap& dofs, const Eigen::VectorXd& values, Point p) {
  return evaluate<1>(dofs, values, p)[0];
}

std::array<double, 2> evaluate_vector(const DofMap& dofs, const Eigen::VectorXd& values,
                                      Point p) {
  return evaluate<2>(dofs, values, p);
}

NodalField interpolate(const DofMap& dofs, FieldKind kind,
                       const std::function<std::array<double, 2>(Point)>& f) {
  NodalField out = NodalField::zeros(kind, dofs);
  const int nc = out.components();
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const auto v = f(dofs.node_point(n));
    for (int c = 0; c < nc; ++c) out.values(nc * n + c) = v[c];
  }
  distribute_constraints(dofs, nc, out.values);
  return out;
}

namespace {

template <int C, typename Exact>
double l2_error_impl(const DofMap& dofs, const NodalField& field, const Exact& exact) {
  const QuadratureRule& q = gauss(3);
  const auto cells = dofs.mesh().cells();
  double sum = 0.0;
  for (int c = 0; c < dofs.n_cells(); ++c) {
    const mesh::Cell& cell = cells[c];
    const auto ue = gather<C>(field.values, dofs.cell_nodes(c));
    const double h = cell.size();
    for (int k = 0; k < q.size(); ++k) {
      const Point x{cell.box.x0 + q.points[k][0] * h, cell.box.y0 + q.points[k][1] * h};
      const auto ex = exact(x);
      double e2 = 0.0;
      for (int comp = 0; comp < C; ++comp) {
        double uh = 0.0;
        for (int a = 0; a < 4; ++a) uh += q.shapes[k].values[a] * ue(C * a + comp);
        const double d = uh - ex[comp];
        e2 += d * d;
      }
      sum += q.weights[k] * h * h * e2;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const DofMap& dofs, const NodalField& field, const VectorFunction& exact) {
  if (field.kind != FieldKind::displacement) throw Error("l2_error: expected a vector field");
  return l2_error_impl<2>(dofs, field, exact);
}

double l2_error(const DofMap& dofs, const NodalField& field, const ScalarFunction& exact) {
  if (field.kind != FieldKind::phasefield) throw Error("l2_error: expected a scalar field");
  return l2_error_impl<1>(dofs, field, [&](Point p) { return std::array<double, 1>{exact(p)}; });
}

}  // namespace limitfrac::fem
