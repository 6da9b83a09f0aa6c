#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "vkmorley/forms.hpp"
#include "vkmorley/morley.hpp"

using namespace vkm;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Exact integral of x^a y^b over a triangle via the multinomial expansion of
// the barycentric representation and int_T l0^i l1^j l2^k = 2|T| i!j!k!/(i+j+k+2)!.
double exact_monomial_integral(Point p0, Point p1, Point p2, int a, int b) {
  double area = 0.5 * std::abs(cross(p1 - p0, p2 - p0));
  double xs[3] = {p0.x, p1.x, p2.x};
  double ys[3] = {p0.y, p1.y, p2.y};
  double total = 0.0;
  for (int i = 0; i <= a; ++i)
    for (int j = 0; i + j <= a; ++j) {
      int k = a - i - j;
      double cx = factorial(a) / (factorial(i) * factorial(j) * factorial(k)) *
                  std::pow(xs[0], i) * std::pow(xs[1], j) * std::pow(xs[2], k);
      for (int p = 0; p <= b; ++p)
        for (int q = 0; p + q <= b; ++q) {
          int r = b - p - q;
          double cy = factorial(b) / (factorial(p) * factorial(q) * factorial(r)) *
                      std::pow(ys[0], p) * std::pow(ys[1], q) * std::pow(ys[2], r);
          double lint = 2.0 * area * factorial(i + p) * factorial(j + q) * factorial(k + r) /
                        factorial(a + b + 2);
          total += cx * cy * lint;
        }
    }
  return total;
}

Triangulation random_triangle_mesh(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<Point> v = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    double area = 0.5 * cross(v[1] - v[0], v[2] - v[0]);
    if (area < 0.0) {
      std::swap(v[1], v[2]);
      area = -area;
    }
    double h = 0.0;
    for (int k = 0; k < 3; ++k) h = std::max(h, norm(v[(k + 1) % 3] - v[(k + 2) % 3]));
    if (area < 0.05 * h * h) continue;  // keep the shapes non-degenerate
    std::vector<Triangle> t(1);
    t[0].v = {0, 1, 2};
    return Triangulation::build(v, t);
  }
}

// Independent Morley basis on one triangle: DOF functionals applied to the
// global monomials {1,x,y,x^2,xy,y^2}, numerically inverted; edge means by
// Gauss quadrature instead of the midpoint shortcut.
Eigen::Matrix<double, 6, 6> vandermonde_basis(const Triangulation& m) {
  auto mono_val = [](Point p, int c) {
    switch (c) {
      case 0: return 1.0;
      case 1: return p.x;
      case 2: return p.y;
      case 3: return p.x * p.x;
      case 4: return p.x * p.y;
      default: return p.y * p.y;
    }
  };
  auto mono_grad = [](Point p, int c) -> Point {
    switch (c) {
      case 0: return {0.0, 0.0};
      case 1: return {1.0, 0.0};
      case 2: return {0.0, 1.0};
      case 3: return {2.0 * p.x, 0.0};
      case 4: return {p.y, p.x};
      default: return {0.0, 2.0 * p.y};
    }
  };
  std::vector<double> gx, gw;
  gauss_legendre_01(4, gx, gw);
  Eigen::Matrix<double, 6, 6> D;
  for (int c = 0; c < 6; ++c) {
    for (int k = 0; k < 3; ++k) D(k, c) = mono_val(m.vertex_of(0, k), c);
    for (int k = 0; k < 3; ++k) {
      int e = m.tri_edges[0][k];
      Point a = m.vertices[m.edges[e].v[0]];
      Point b = m.vertices[m.edges[e].v[1]];
      Point nu = {m.edges[e].tangent.y, -m.edges[e].tangent.x};
      double mean = 0.0;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        Point p = a + gx[q] * (b - a);
        mean += gw[q] * dot(mono_grad(p, c), nu);
      }
      D(3 + k, c) = mean;
    }
  }
  return D.inverse();
}

}  // namespace

TEST_CASE("dof map: counts and constrained mask") {
  {
    auto space = make_space(generate_square_mesh(1));
    CHECK(space->dim() == 1);  // four boundary vertices, one interior edge
  }
  {
    Triangulation m = generate_square_mesh(4);
    auto space = make_space(m);
    // Direct audit of the slot definition.
    int expect = 0;
    for (int v = 0; v < m.n_vertices(); ++v)
      if (!m.boundary_vertex[v]) ++expect;
    for (int e = 0; e < m.n_edges(); ++e)
      if (!m.edges[e].boundary) ++expect;
    CHECK(space->dim() == expect);
    CHECK(space->dim() == (m.n_vertices() - m.n_boundary_vertices()) +
                              (m.n_edges() - m.n_boundary_edges()));
    const auto& dofs = space->dofs();
    for (int v = 0; v < m.n_vertices(); ++v)
      CHECK(static_cast<bool>(dofs.constrained[dofs.slot_vertex(v)]) ==
            static_cast<bool>(m.boundary_vertex[v]));
    for (int e = 0; e < m.n_edges(); ++e)
      CHECK(static_cast<bool>(dofs.constrained[dofs.slot_edge(e)]) == m.edges[e].boundary);
  }
  {
    auto space = make_space(generate_lshape_mesh());
    CHECK(space->dim() == 33);
  }
}

TEST_CASE("element basis: DOF duality on 1000 random triangles") {
  std::mt19937 rng(7);
  std::vector<double> gx, gw;
  gauss_legendre_01(4, gx, gw);
  for (int rep = 0; rep < 1000; ++rep) {
    Triangulation m = random_triangle_mesh(rng);
    auto space = make_space(m);
    const auto& eb = space->element(0);
    // functional_j(phi_i) must be the Kronecker delta.
    for (int i = 0; i < 6; ++i) {
      double vals[6];
      for (int k = 0; k < 3; ++k) {
        double v[6];
        eb.values_at(m.vertex_of(0, k), v);
        vals[k] = v[i];
      }
      for (int k = 0; k < 3; ++k) {
        int e = m.tri_edges[0][k];
        Point a = m.vertices[m.edges[e].v[0]];
        Point b = m.vertices[m.edges[e].v[1]];
        Point nu = {m.edges[e].tangent.y, -m.edges[e].tangent.x};
        double mean = 0.0;
        for (std::size_t q = 0; q < gx.size(); ++q) {
          Point p = a + gx[q] * (b - a);
          Point g[6];
          eb.gradients_at(p, g);
          mean += gw[q] * dot(g[i], nu);
        }
        vals[3 + k] = mean;
      }
      for (int j = 0; j < 6; ++j) CHECK(vals[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("element basis: local stiffness matches the Vandermonde oracle") {
  std::mt19937 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    Triangulation m = random_triangle_mesh(rng);
    auto space = make_space(m);
    const auto& eb = space->element(0);
    Eigen::Matrix<double, 6, 6> C = vandermonde_basis(m);
    double area = m.area(0);
    for (int i = 0; i < 6; ++i) {
      Eigen::Matrix2d Hi;
      Hi << 2.0 * C(3, i), C(4, i), C(4, i), 2.0 * C(5, i);
      for (int j = 0; j < 6; ++j) {
        Eigen::Matrix2d Hj;
        Hj << 2.0 * C(3, j), C(4, j), C(4, j), 2.0 * C(5, j);
        double oracle = area * Hi.cwiseProduct(Hj).sum();
        double ours = area * eb.hessian[i].cwiseProduct(eb.hessian[j]).sum();
        CHECK(ours == doctest::Approx(oracle).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("quadratic reproduction: interpolant of x^2 has Hessian [[2,0],[0,0]]") {
  auto space = make_space(generate_square_mesh(3));
  MorleyField f = interpolate(
      space, [](double x, double) { return x * x; },
      [](double x, double) -> Point { return {2.0 * x, 0.0}; });
  for (int t = 0; t < space->mesh().n_triangles(); ++t) {
    Eigen::Matrix2d H = element_hessian(f, t);
    CHECK(H(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(H(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(H(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("field evaluation matches the basis-sum oracle") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto space = make_space(generate_square_mesh(2));
  MorleyField f = zero_field(space);
  for (int s = 0; s < f.coeff.size(); ++s) f.coeff[s] = u(rng);
  for (int t = 0; t < space->mesh().n_triangles(); ++t) {
    Point p = space->mesh().point_in(t, 0.41, 0.35, 0.24);
    double v[6];
    space->element(t).values_at(p, v);
    double oracle = 0.0;
    for (int i = 0; i < 6; ++i) oracle += f.coeff[space->slots(t)[i]] * v[i];
    CHECK(eval_field(f, t, p) == doctest::Approx(oracle).epsilon(1e-13));
  }
  MorleyField z = zero_field(space);
  for (int t = 0; t < space->mesh().n_triangles(); ++t) {
    CHECK(eval_field(z, t, space->mesh().centroid(t)) == 0.0);
    CHECK(element_hessian(z, t).norm() == 0.0);
  }
}

TEST_CASE("quadrature: normalization and exactness on random triangles") {
  std::mt19937 rng(11);
  for (int degree : {2, 4, 10}) {
    const auto& rule = QuadratureRule::triangle(degree);
    double wsum = 0.0;
    for (const auto& n : rule.nodes) wsum += n.w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rule.degree >= degree);
    for (int rep = 0; rep < 20; ++rep) {
      Triangulation m = random_triangle_mesh(rng);
      for (int a = 0; a + 0 <= rule.degree; ++a) {
        for (int b = 0; a + b <= rule.degree; ++b) {
          double got = integrate(m, 0, rule,
                                 [&](double x, double y) { return std::pow(x, a) * std::pow(y, b); });
          double want =
              exact_monomial_integral(m.vertex_of(0, 0), m.vertex_of(0, 1), m.vertex_of(0, 2), a, b);
          CHECK(got == doctest::Approx(want).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("projections: mean value, idempotence, orthogonality") {
  auto space = make_space(generate_square_mesh(2));
  auto c = project_pw(*space, [](double, double) { return 3.25; }, 0);
  for (int t = 0; t < space->mesh().n_triangles(); ++t)
    CHECK(c.eval(t, space->mesh().centroid(t)) == doctest::Approx(3.25).epsilon(1e-13));

  auto px = project_pw(*space, [](double x, double) { return x; }, 0);
  for (int t = 0; t < space->mesh().n_triangles(); ++t)
    CHECK(px.eval(t, {0.0, 0.0}) == doctest::Approx(space->mesh().centroid(t).x).epsilon(1e-12));

  // k = 1 projection of a quadratic vs normal equations on global monomials.
  auto f = [](double x, double y) { return x * x + 0.5 * x * y - y; };
  auto p1 = project_pw(*space, f, 1, 8);
  const auto& rule = QuadratureRule::triangle(8);
  for (int t = 0; t < space->mesh().n_triangles(); ++t) {
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& q : rule.nodes) {
      Point p = space->mesh().point_in(t, q.l0, q.l1, q.l2);
      Eigen::Vector3d b(1.0, p.x, p.y);
      M += q.w * b * b.transpose();
      rhs += q.w * f(p.x, p.y) * b;
    }
    Eigen::Vector3d sol = M.ldlt().solve(rhs);
    Point probe = space->mesh().point_in(t, 0.3, 0.3, 0.4);
    double oracle = sol[0] + sol[1] * probe.x + sol[2] * probe.y;
    CHECK(p1.eval(t, probe) == doctest::Approx(oracle).epsilon(1e-11));
    // Orthogonality of the residual to P1 on the triangle.
    for (int c0 = 0; c0 < 3; ++c0) {
      double ip = integrate(space->mesh(), t, rule, [&](double x, double y) {
        double basis = c0 == 0 ? 1.0 : (c0 == 1 ? x : y);
        return (f(x, y) - p1.eval(t, {x, y})) * basis;
      });
      CHECK(ip == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("broken norms") {
  auto space = make_space(generate_square_mesh(3));
  MorleyField z = zero_field(space);
  BrokenNorms nz = broken_norms(z);
  CHECK(nz.l2 == 0.0);
  CHECK(nz.h1 == 0.0);
  CHECK(nz.nc == 0.0);

  // Interpolant of x^2 + y^2: Hessian 2I everywhere, so the NC norm is
  // sqrt(8 |Omega|).
  MorleyField f = interpolate(
      space, [](double x, double y) { return x * x + y * y; },
      [](double x, double y) -> Point { return {2.0 * x, 2.0 * y}; });
  CHECK(broken_norms(f).nc == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));

  ScalarField exact;
  exact.value = [](double x, double y) { return x * x + y * y; };
  exact.dx = [](double x, double) { return 2.0 * x; };
  exact.dy = [](double, double y) { return 2.0 * y; };
  exact.dxx = [](double, double) { return 2.0; };
  exact.dxy = [](double, double) { return 0.0; };
  exact.dyy = [](double, double) { return 2.0; };
  BrokenNorms err = broken_norms(f, exact);
  CHECK(err.nc == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(err.l2 < 1e-10);
  CHECK(err.h1 < 1e-10);
}

TEST_CASE("boundary constraints zero out masked slots in solver fields") {
  auto space = make_space(generate_square_mesh(3));
  Eigen::VectorXd free = Eigen::VectorXd::Random(space->dim());
  MorleyField f = field_from_free(space, free);
  const auto& dofs = space->dofs();
  for (int s = 0; s < dofs.n_slots(); ++s)
    if (dofs.constrained[s]) CHECK(f.coeff[s] == 0.0);
  // Round trip.
  Eigen::VectorXd back = free_from_field(f);
  CHECK((back - free).norm() == 0.0);
}
