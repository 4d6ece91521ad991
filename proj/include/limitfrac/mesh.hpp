#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace limitfrac::mesh {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Point p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
  /// True when the intersection with `other` has positive area.
  bool overlaps(const Box& other) const {
    return x0 < other.x1 && other.x0 < x1 && y0 < other.y1 && other.y0 < y1;
  }
};

/// Active (leaf) cell of the quadtree. Vertices are listed counter-clockwise
/// starting at the lower-left corner.
struct Cell {
  int level = 0;
  int i = 0;
  int j = 0;
  std::array<int, 4> vertices{};
  Box box;

  Point centroid() const { return box.center(); }
  double size() const { return box.width(); }
};

/// A hanging vertex sits at the midpoint of a coarse edge; its value is the
/// mean of the two edge end points.
struct HangingConstraint {
  int vertex = -1;
  std::array<int, 2> parents{-1, -1};
  std::array<double, 2> weights{0.5, 0.5};
};

using CellMarker = std::function<bool(const Cell&)>;

/// Quadtree of square cells over a rectangle that is tiled by nx x ny square
/// base cells. Leaves are kept 2:1 balanced across edges and corners, which
/// guarantees that hanging vertices never depend on other hanging vertices.
class QuadMesh {
 public:
  QuadMesh(Box domain, int nx, int ny);
  static QuadMesh unit_square() { return QuadMesh(Box{}, 1, 1); }

  void refine_global(int times);
  /// Runs `levels` passes; each pass splits every leaf the marker selects,
  /// then restores 2:1 balance.
  void refine_where(const CellMarker& marker, int levels);

  std::span<const Cell> cells() const { return cells_; }
  std::span<const Point> vertices() const { return vertices_; }
  const std::map<int, HangingConstraint>& constraints() const { return constraints_; }
  const Box& domain() const { return domain_; }

  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int max_level() const { return max_level_; }
  double base_size() const { return base_h_; }
  double h_min() const;

  /// Index of a cell whose closed box contains p, or -1.
  int locate(Point p) const;

  /// Level-difference scan over all neighbouring leaf pairs.
  bool is_balanced() const;

 private:
  struct Key {
    int level;
    int i;
    int j;
    auto operator<=>(const Key&) const = default;
  };

  bool is_leaf(const Key& k) const { return leaves_.contains(k); }
  bool in_domain(int level, int i, int j) const;
  /// Leaf that covers the level-`level` cell (i, j), if it is that cell or one
  /// of its ancestors.
  const Key* covering_leaf(int level, int i, int j) const;
  void split(const Key& k);
  void balance();
  void rebuild();

  Box domain_;
  int nx_ = 1;
  int ny_ = 1;
  double base_h_ = 1.0;
  int max_level_ = 0;
  std::set<Key> leaves_;

  std::vector<Cell> cells_;
  std::map<Key, int> cell_index_;
  std::vector<Point> vertices_;
  std::map<int, HangingConstraint> constraints_;
};

QuadMesh refine_global(QuadMesh mesh, int times);
QuadMesh refine_where(QuadMesh mesh, const CellMarker& marker, int levels);

/// Marker selecting leaves whose box overlaps `region` with positive area.
CellMarker box_marker(Box region);

}  // namespace limitfrac::mesh
