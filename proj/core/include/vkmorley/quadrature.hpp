#ifndef VKMORLEY_QUADRATURE_HPP
#define VKMORLEY_QUADRATURE_HPP

#include <vector>

#include "vkmorley/mesh.hpp"

namespace vkm {

// Interior-node quadrature on the reference triangle in barycentric
// coordinates. Weights are area-normalized (they sum to one), so an integral
// over a physical triangle is |T| * sum_i w_i f(x_i).
struct QuadratureRule {
  struct Node {
    double l0, l1, l2, w;
  };
  std::vector<Node> nodes;
  int degree = 0;  // all polynomials of this total degree integrate exactly

  // Cached rule of at least the requested exactness degree.
  static const QuadratureRule& triangle(int degree);
};

// Gauss-Legendre nodes/weights on [0,1]; weights sum to 1.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

template <class F>
double integrate(const Triangulation& mesh, int t, const QuadratureRule& rule, F&& f) {
  double s = 0.0;
  for (const auto& q : rule.nodes) {
    Point p = mesh.point_in(t, q.l0, q.l1, q.l2);
    s += q.w * f(p.x, p.y);
  }
  return mesh.area(t) * s;
}

// Integration with dyadic grading toward one singular corner point. The
// sub-triangle containing the corner is split recursively; everything else
// uses the base rule. Intended for integrable point singularities.
template <class F>
double integrate_graded_tri(Point a, Point b, Point c, Point corner, int depth,
                            const QuadratureRule& rule, F&& f) {
  auto plain = [&](Point p0, Point p1, Point p2) {
    double area = 0.5 * cross(p1 - p0, p2 - p0);
    double s = 0.0;
    for (const auto& q : rule.nodes) {
      double x = q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x;
      double y = q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y;
      s += q.w * f(x, y);
    }
    return area * s;
  };
  int corner_local = -1;
  Point vs[3] = {a, b, c};
  for (int k = 0; k < 3; ++k)
    if (norm(vs[k] - corner) < 1e-12) corner_local = k;
  if (corner_local == -1 || depth <= 0) return plain(a, b, c);
  Point p0 = vs[corner_local], p1 = vs[(corner_local + 1) % 3], p2 = vs[(corner_local + 2) % 3];
  Point m01{0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)};
  Point m02{0.5 * (p0.x + p2.x), 0.5 * (p0.y + p2.y)};
  Point m12{0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y)};
  double s = plain(m01, p1, m12) + plain(m12, p2, m02) + plain(m01, m12, m02);
  return s + integrate_graded_tri(p0, m01, m02, corner, depth - 1, rule, f);
}

template <class F>
double integrate_graded(const Triangulation& mesh, int t, Point corner, int depth,
                        const QuadratureRule& rule, F&& f) {
  return integrate_graded_tri(mesh.vertex_of(t, 0), mesh.vertex_of(t, 1), mesh.vertex_of(t, 2),
                              corner, depth, rule, std::forward<F>(f));
}

}  // namespace vkm

#endif
