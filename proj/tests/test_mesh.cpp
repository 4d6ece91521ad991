#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "limitfrac/experiments.hpp"
#include "limitfrac/presets.hpp"

using namespace limitfrac;
using namespace limitfrac::mesh;

namespace {

double total_area(const QuadMesh& m) {
  double a = 0.0;
  for (const Cell& c : m.cells()) a += c.box.area();
  return a;
}

}  // namespace

TEST_CASE("global refinement") {
  QuadMesh m = QuadMesh::unit_square();
  CHECK(m.n_cells() == 1);
  CHECK(m.n_vertices() == 4);
  m.refine_global(7);
  CHECK(m.n_cells() == 16384);
  CHECK(m.n_vertices() == 129 * 129);
  CHECK(m.h_min() == 0.0078125);
  CHECK(m.max_level() == 7);
  CHECK(m.constraints().empty());
  CHECK(m.is_balanced());
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));

  for (const Cell& c : m.cells()) {
    const auto& v = m.vertices();
    CHECK(v[c.vertices[0]].x == c.box.x0);
    CHECK(v[c.vertices[0]].y == c.box.y0);
    CHECK(v[c.vertices[1]].x == c.box.x1);
    CHECK(v[c.vertices[2]].y == c.box.y1);
    CHECK(v[c.vertices[3]].x == c.box.x0);
  }
}

TEST_CASE("free refine_global returns a refined copy") {
  const QuadMesh base = QuadMesh::unit_square();
  const QuadMesh fine = refine_global(base, 3);
  CHECK(base.n_cells() == 1);
  CHECK(fine.n_cells() == 64);
}

TEST_CASE("local refinement keeps 2:1 balance") {
  auto m = test::uniform_mesh(3);
  m->refine_where(box_marker({0.45, 0.45, 0.55, 0.55}), 5);
  CHECK(m->is_balanced());
  CHECK(m->max_level() == 8);
  CHECK(m->h_min() == 1.0 / 256.0);
  CHECK(total_area(*m) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_FALSE(m->constraints().empty());

  std::set<std::pair<double, double>> seen;
  for (const Point& p : m->vertices()) CHECK(seen.insert({p.x, p.y}).second);
}

TEST_CASE("hanging constraints") {
  auto m = test::hanging_mesh();
  REQUIRE_FALSE(m->constraints().empty());
  for (const auto& [v, c] : m->constraints()) {
    CHECK(c.vertex == v);
    CHECK(c.weights[0] == 0.5);
    CHECK(c.weights[1] == 0.5);
    const Point p = m->vertices()[v];
    const Point a = m->vertices()[c.parents[0]];
    const Point b = m->vertices()[c.parents[1]];
    CHECK(p.x == doctest::Approx(0.5 * (a.x + b.x)).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(0.5 * (a.y + b.y)).epsilon(1e-15));
    // Balance means parents are never themselves hanging.
    CHECK_FALSE(m->constraints().contains(c.parents[0]));
    CHECK_FALSE(m->constraints().contains(c.parents[1]));
  }
}

TEST_CASE("locate") {
  auto m = test::hanging_mesh();
  for (int k = 0; k < m->n_cells(); ++k) {
    const Cell& c = m->cells()[k];
    CHECK(m->locate(c.centroid()) == k);
  }
  CHECK(m->locate({1.5, 0.5}) == -1);
  CHECK(m->locate({1.0, 1.0}) >= 0);
}

TEST_CASE("rectangular base grid") {
  QuadMesh m(Box{0.0, 0.0, 2.0, 1.0}, 2, 1);
  m.refine_global(2);
  CHECK(m.n_cells() == 32);
  CHECK(m.h_min() == 0.25);
  CHECK(total_area(m) == doctest::Approx(2.0));
}

TEST_CASE("experiment meshes") {
  SUBCASE("example 3 reaches h_min = 1/1024 on the crack path") {
    const auto m = build_mesh(preset("ex3_lefm").mesh);
    CHECK(m->h_min() == 0.0009765625);
    CHECK(m->is_balanced());
    CHECK(total_area(*m) == doctest::Approx(1.0).epsilon(1e-12));
    const int tip = m->locate({0.5, 0.5});
    REQUIRE(tip >= 0);
    CHECK(m->cells()[tip].size() == 0.0009765625);
  }
  SUBCASE("example 1 first cycle") {
    const RunConfig c = preset("ex1_linear");
    auto m = test::uniform_mesh(c.mms_first_level);
    CHECK(m->n_cells() == 4);
  }
}
