#include "limitfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "limitfrac/errors.hpp"

namespace limitfrac::mesh {

namespace {

// Vertex position on the integer lattice of the finest level, row-major.
using LatticeKey = std::pair<std::int64_t, std::int64_t>;  // (J, I)

}  // namespace

QuadMesh::QuadMesh(Box domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw ConfigError("QuadMesh: need at least one base cell per direction");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw ConfigError("QuadMesh: degenerate domain");
  base_h_ = domain.width() / nx;
  const double hy = domain.height() / ny;
  if (std::abs(hy - base_h_) > 1e-12 * base_h_)
    throw ConfigError("QuadMesh: base cells must be square");
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) leaves_.insert(Key{0, i, j});
  rebuild();
}

double QuadMesh::h_min() const { return std::ldexp(base_h_, -max_level_); }

bool QuadMesh::in_domain(int level, int i, int j) const {
  return i >= 0 && j >= 0 && i < (nx_ << level) && j < (ny_ << level);
}

const QuadMesh::Key* QuadMesh::covering_leaf(int level, int i, int j) const {
  for (int l = level; l >= 0; --l) {
    const int shift = level - l;
    auto it = leaves_.find(Key{l, i >> shift, j >> shift});
    if (it != leaves_.end()) return &*it;
  }
  return nullptr;
}

void QuadMesh::split(const Key& k) {
  leaves_.erase(k);
  for (int dj = 0; dj < 2; ++dj)
    for (int di = 0; di < 2; ++di) leaves_.insert(Key{k.level + 1, 2 * k.i + di, 2 * k.j + dj});
}

void QuadMesh::balance() {
  for (;;) {
    std::vector<Key> coarse;
    for (const Key& k : leaves_) {
      if (k.level < 2) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ni = k.i + di;
          const int nj = k.j + dj;
          if (!in_domain(k.level, ni, nj)) continue;
          const Key* c = covering_leaf(k.level, ni, nj);
          if (c != nullptr && c->level < k.level - 1) coarse.push_back(*c);
        }
      }
    }
    if (coarse.empty()) return;
    std::sort(coarse.begin(), coarse.end());
    coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
    for (const Key& k : coarse) split(k);
  }
}

bool QuadMesh::is_balanced() const {
  for (const Key& k : leaves_) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        if (!in_domain(k.level, k.i + di, k.j + dj)) continue;
        const Key* c = covering_leaf(k.level, k.i + di, k.j + dj);
        if (c != nullptr && c->level < k.level - 1) return false;
      }
    }
  }
  return true;
}

void QuadMesh::refine_global(int times) {
  if (times < 0) throw ConfigError("refine_global: negative pass count");
  for (int pass = 0; pass < times; ++pass) {
    std::vector<Key> all(leaves_.begin(), leaves_.end());
    for (const Key& k : all) split(k);
  }
  if (times > 0) rebuild();
}

void QuadMesh::refine_where(const CellMarker& marker, int levels) {
  if (levels < 0) throw ConfigError("refine_where: negative level count");
  for (int pass = 0; pass < levels; ++pass) {
    std::vector<Key> marked;
    for (const Cell& c : cells_)
      if (marker(c)) marked.push_back(Key{c.level, c.i, c.j});
    if (marked.empty()) break;
    for (const Key& k : marked) split(k);
    balance();
    rebuild();
  }
}

void QuadMesh::rebuild() {
  max_level_ = 0;
  for (const Key& k : leaves_) max_level_ = std::max(max_level_, k.level);
  const int L = max_level_;
  const double h_fine = std::ldexp(base_h_, -L);

  // Corner lattice coordinates of every leaf.
  std::vector<LatticeKey> keys;
  keys.reserve(4 * leaves_.size());
  for (const Key& k : leaves_) {
    const std::int64_t s = std::int64_t{1} << (L - k.level);
    const std::int64_t I = k.i * s;
    const std::int64_t J = k.j * s;
    keys.push_back({J, I});
    keys.push_back({J, I + s});
    keys.push_back({J + s, I + s});
    keys.push_back({J + s, I});
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  auto vertex_id = [&keys](std::int64_t I, std::int64_t J) -> int {
    auto it = std::lower_bound(keys.begin(), keys.end(), LatticeKey{J, I});
    if (it == keys.end() || *it != LatticeKey{J, I}) return -1;
    return static_cast<int>(it - keys.begin());
  };

  vertices_.clear();
  vertices_.reserve(keys.size());
  for (const auto& [J, I] : keys)
    vertices_.push_back({domain_.x0 + static_cast<double>(I) * h_fine,
                         domain_.y0 + static_cast<double>(J) * h_fine});

  // Cells ordered row-major by their lower-left corner; ties cannot occur
  // between leaves.
  std::vector<Key> ordered(leaves_.begin(), leaves_.end());
  auto lower_left = [L](const Key& k) {
    const std::int64_t s = std::int64_t{1} << (L - k.level);
    return LatticeKey{k.j * s, k.i * s};
  };
  std::sort(ordered.begin(), ordered.end(),
            [&](const Key& a, const Key& b) { return lower_left(a) < lower_left(b); });

  cells_.clear();
  cells_.reserve(ordered.size());
  cell_index_.clear();
  constraints_.clear();
  for (const Key& k : ordered) {
    cell_index_[k] = static_cast<int>(cells_.size());
    const std::int64_t s = std::int64_t{1} << (L - k.level);
    const std::int64_t I = k.i * s;
    const std::int64_t J = k.j * s;
    Cell c;
    c.level = k.level;
    c.i = k.i;
    c.j = k.j;
    c.vertices = {vertex_id(I, J), vertex_id(I + s, J), vertex_id(I + s, J + s),
                  vertex_id(I, J + s)};
    const double h = std::ldexp(base_h_, -k.level);
    c.box = Box{domain_.x0 + k.i * h, domain_.y0 + k.j * h, domain_.x0 + (k.i + 1) * h,
                domain_.y0 + (k.j + 1) * h};
    cells_.push_back(c);

    if (k.level == L) continue;
    const std::array<std::array<std::int64_t, 4>, 4> edges = {{
        {I, J, I + s, J},          // bottom
        {I + s, J, I + s, J + s},  // right
        {I, J + s, I + s, J + s},  // top
        {I, J, I, J + s},          // left
    }};
    for (const auto& e : edges) {
      const std::int64_t mi = (e[0] + e[2]) / 2;
      const std::int64_t mj = (e[1] + e[3]) / 2;
      const int v = vertex_id(mi, mj);
      if (v < 0) continue;
      HangingConstraint hc;
      hc.vertex = v;
      hc.parents = {vertex_id(e[0], e[1]), vertex_id(e[2], e[3])};
      constraints_[v] = hc;
    }
  }
}

int QuadMesh::locate(Point p) const {
  const double tol = 1e-12 * std::max(domain_.width(), domain_.height());
  if (!domain_.contains(p, tol)) return -1;
  const int L = max_level_;
  const double h_fine = std::ldexp(base_h_, -L);
  const auto clamp_index = [](double v, int n) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1);
  };
  const int I = clamp_index((p.x - domain_.x0) / h_fine, nx_ << L);
  const int J = clamp_index((p.y - domain_.y0) / h_fine, ny_ << L);
  const Key* leaf = covering_leaf(L, I, J);
  if (leaf == nullptr) return -1;
  return cell_index_.at(*leaf);
}

QuadMesh refine_global(QuadMesh mesh, int times) {
  mesh.refine_global(times);
  return mesh;
}

QuadMesh refine_where(QuadMesh mesh, const CellMarker& marker, int levels) {
  mesh.refine_where(marker, levels);
  return mesh;
}

CellMarker box_marker(Box region) {
  return [region](const Cell& c) { return c.box.overlaps(region); };
}

}  // namespace limitfrac::mesh
