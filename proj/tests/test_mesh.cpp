#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "vkmorley/mesh.hpp"

using namespace vkm;

namespace {

// Every interior edge has two adjacent triangles, boundary edges one, and
// adjacency is consistent with the triangle vertex triples.
void check_conforming(const Triangulation& m) {
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& ed = m.edges[e];
    int count = (ed.tri[0] >= 0) + (ed.tri[1] >= 0);
    CHECK(count == (ed.boundary ? 1 : 2));
    for (int s = 0; s < count; ++s) {
      int t = ed.tri[s];
      std::set<int> verts(m.triangles[t].v.begin(), m.triangles[t].v.end());
      CHECK(verts.count(ed.v[0]) == 1);
      CHECK(verts.count(ed.v[1]) == 1);
    }
  }
  for (int t = 0; t < m.n_triangles(); ++t) CHECK(m.area(t) > 0.0);
}

}  // namespace

TEST_CASE("square mesh: counts and sizes") {
  Triangulation m1 = generate_square_mesh(1);
  CHECK(m1.n_triangles() == 2);
  CHECK(m1.n_vertices() == 4);
  CHECK(m1.n_edges() == 5);

  Triangulation m4 = generate_square_mesh(4);
  CHECK(m4.n_triangles() == 32);
  CHECK(m4.n_vertices() == 25);
  CHECK(m4.h_max == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
  // Leg length of each right triangle.
  double min_edge = 1e30;
  for (const auto& e : m4.edges) min_edge = std::min(min_edge, e.length);
  CHECK(min_edge == doctest::Approx(0.25).epsilon(1e-14));

  check_conforming(generate_square_mesh(2));
}

TEST_CASE("lshape mesh: 24 triangles, boundary audit") {
  Triangulation m = generate_lshape_mesh();
  CHECK(m.n_triangles() == 24);
  CHECK(m.n_vertices() == 21);
  CHECK(m.n_edges() == 44);
  check_conforming(m);

  // The re-entrant corner lies on the boundary.
  int corner = -1;
  for (int v = 0; v < m.n_vertices(); ++v)
    if (norm(m.vertices[v]) < 1e-14) corner = v;
  REQUIRE(corner >= 0);
  CHECK(m.boundary_vertex[corner] == 1);

  double blen = 0.0;
  int bcount = 0;
  for (const auto& e : m.edges)
    if (e.boundary) {
      blen += e.length;
      ++bcount;
      CHECK(e.length == doctest::Approx(0.5).epsilon(1e-14));
    }
  CHECK(bcount == 16);
  CHECK(blen == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("red refinement: counts, h halves, omega flags") {
  Triangulation m = generate_square_mesh(1);
  Triangulation r = red_refine(m);
  CHECK(r.n_triangles() == 8);
  CHECK(r.h_max == doctest::Approx(0.5 * m.h_max).epsilon(1e-14));
  check_conforming(r);

  Triangulation L = generate_lshape_mesh();
  Triangulation L1 = red_refine(L);
  CHECK(L1.n_triangles() == 96);
  CHECK(L1.h_max == doctest::Approx(0.35355339059327373).epsilon(1e-12));

  // Parent vertices survive and the triangle count exactly quadruples.
  Triangulation m3 = generate_square_mesh(3);
  Triangulation r3 = red_refine(m3);
  CHECK(r3.n_triangles() == 4 * m3.n_triangles());
  for (int v = 0; v < m3.n_vertices(); ++v) {
    CHECK(r3.vertices[v].x == m3.vertices[v].x);
    CHECK(r3.vertices[v].y == m3.vertices[v].y);
  }
  for (const auto& t : r3.triangles) CHECK(t.in_omega);
}

TEST_CASE("nvb: empty marking returns the mesh unchanged") {
  Triangulation m = generate_square_mesh(2);
  Triangulation r = nvb_refine(m, {});
  CHECK(r.n_triangles() == m.n_triangles());
  CHECK(r.n_vertices() == m.n_vertices());
}

TEST_CASE("nvb: boundary refinement edge bisects only the marked triangle") {
  Triangulation m = generate_square_mesh(1);
  // Both triangles have the shared diagonal as longest edge; mark triangle 0.
  // Its refinement edge is interior, so the neighbor is forced too: 4 total.
  Triangulation r = nvb_refine(m, {0});
  CHECK(r.n_triangles() == 4);
  check_conforming(r);

  // A triangle whose refinement edge lies on the boundary: build one.
  std::vector<Point> verts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<Triangle> tris(1);
  tris[0].v = {0, 1, 2};
  Triangulation single = Triangulation::build(verts, tris);
  single.triangles[0].refine_edge = 0;  // edge (1,2) is the hypotenuse here
  Triangulation s2 = nvb_refine(single, {0});
  CHECK(s2.n_triangles() == 2);
  check_conforming(s2);
}

TEST_CASE("nvb: closure cascade keeps the mesh conforming") {
  Triangulation m = generate_square_mesh(3);
  Triangulation r = nvb_refine(m, {0, 5, 7});
  check_conforming(r);
  CHECK(r.n_triangles() > m.n_triangles());
}

TEST_CASE("nvb: random marking rounds preserve shape regularity") {
  std::mt19937 rng(1234);
  Triangulation m = generate_square_mesh(2);
  double angle0 = m.min_angle();
  for (int round = 0; round < 10; ++round) {
    std::uniform_int_distribution<int> pick(0, m.n_triangles() - 1);
    std::set<int> marked;
    for (int k = 0; k < std::max(1, m.n_triangles() / 8); ++k) marked.insert(pick(rng));
    m = nvb_refine(m, std::vector<int>(marked.begin(), marked.end()));
    check_conforming(m);
    CHECK(m.min_angle() >= 0.5 * angle0 - 1e-12);
  }
}

TEST_CASE("patch_of") {
  Triangulation m1 = generate_square_mesh(1);
  auto p = patch_of(m1, 0);
  CHECK(p == std::vector<int>({0, 1}));

  Triangulation m4 = generate_square_mesh(4);
  for (int t : {0, 9, 17}) {
    auto patch = patch_of(m4, t);
    // Brute-force vertex incidence scan.
    std::set<int> expect;
    for (int s = 0; s < m4.n_triangles(); ++s) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (m4.triangles[s].v[a] == m4.triangles[t].v[b]) expect.insert(s);
    }
    CHECK(patch == std::vector<int>(expect.begin(), expect.end()));
    CHECK(std::count(patch.begin(), patch.end(), t) == 1);
  }
}

TEST_CASE("mesh text format round trip and validation") {
  Triangulation m = generate_lshape_mesh();
  std::stringstream ss;
  save_mesh(m, ss);
  Triangulation r = load_mesh(ss);
  CHECK(r.n_vertices() == m.n_vertices());
  CHECK(r.n_triangles() == m.n_triangles());
  CHECK(r.n_edges() == m.n_edges());
  for (int t = 0; t < r.n_triangles(); ++t) CHECK(r.triangles[t].in_omega == m.triangles[t].in_omega);

  // Orientation is rejected.
  std::stringstream bad("v 0 0\nv 1 0\nv 0 1\nt 0 2 1\n");
  CHECK_THROWS_AS(load_mesh(bad), std::runtime_error);

  // Hanging vertex: the diagonal of the big triangle carries the midpoint of
  // the two small ones.
  std::stringstream hang(
      "v 0 0\nv 1 0\nv 1 1\nv 0 1\nv 0.5 0.5\n"
      "t 0 1 2\nt 0 4 3\nt 4 2 3\n");
  CHECK_THROWS_AS(load_mesh(hang), std::runtime_error);
}
