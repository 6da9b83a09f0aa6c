#include "vkmorley/morley.hpp"

#include <cmath>
#include <stdexcept>

namespace vkm {

MorleyDofMap build_dof_map(const Triangulation& mesh) {
  MorleyDofMap map;
  map.n_vertices = mesh.n_vertices();
  map.n_edges = mesh.n_edges();
  map.constrained.assign(map.n_slots(), 0);
  for (int v = 0; v < map.n_vertices; ++v)
    if (mesh.boundary_vertex[v]) map.constrained[map.slot_vertex(v)] = 1;
  for (int e = 0; e < map.n_edges; ++e)
    if (mesh.edges[e].boundary) map.constrained[map.slot_edge(e)] = 1;
  map.free_index.assign(map.n_slots(), -1);
  int next = 0;
  for (int s = 0; s < map.n_slots(); ++s)
    if (!map.constrained[s]) map.free_index[s] = next++;
  map.n_free = next;
  return map;
}

namespace {

// Normal for a global edge (a,b), a < b: tangent rotated by -90 degrees.
Point global_edge_normal(const Triangulation& mesh, int e) {
  Point t = mesh.edges[e].tangent;
  return {t.y, -t.x};
}

ElementBasis build_element_basis(const Triangulation& mesh, int t) {
  ElementBasis eb;
  eb.area = mesh.area(t);
  double h = mesh.diameter(t);
  if (!(eb.area > 1e-14 * h * h))
    throw std::runtime_error("morley: degenerate triangle " + std::to_string(t));
  eb.center = mesh.centroid(t);
  eb.scale = h;

  auto local = [&](Point p) -> Point {
    return {(p.x - eb.center.x) / eb.scale, (p.y - eb.center.y) / eb.scale};
  };
  auto mono = [](Point q, double out[6]) {
    out[0] = 1.0;
    out[1] = q.x;
    out[2] = q.y;
    out[3] = q.x * q.x;
    out[4] = q.x * q.y;
    out[5] = q.y * q.y;
  };

  // Rows: DOF functionals applied to the local monomials. For quadratics the
  // edge mean of the normal derivative equals its midpoint value.
  Eigen::Matrix<double, 6, 6> D;
  for (int k = 0; k < 3; ++k) {
    double row[6];
    mono(local(mesh.vertex_of(t, k)), row);
    for (int c = 0; c < 6; ++c) D(k, c) = row[c];
  }
  for (int k = 0; k < 3; ++k) {
    int ge = mesh.tri_edges[t][k];
    Point nu = global_edge_normal(mesh, ge);
    Point a = mesh.vertices[mesh.edges[ge].v[0]];
    Point b = mesh.vertices[mesh.edges[ge].v[1]];
    Point q = local({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    // Physical gradient of the monomials at the midpoint: d/dx = (1/s) d/dX.
    double gx[6] = {0.0, 1.0, 0.0, 2.0 * q.x, q.y, 0.0};
    double gy[6] = {0.0, 0.0, 1.0, 0.0, q.x, 2.0 * q.y};
    for (int c = 0; c < 6; ++c) D(3 + k, c) = (nu.x * gx[c] + nu.y * gy[c]) / eb.scale;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(D);
  if (!lu.isInvertible())
    throw std::runtime_error("morley: singular DOF system on triangle " + std::to_string(t));
  eb.coeff = lu.inverse();

  const double s2 = eb.scale * eb.scale;
  for (int i = 0; i < 6; ++i) {
    Eigen::Matrix2d H;
    H << 2.0 * eb.coeff(3, i) / s2, eb.coeff(4, i) / s2, eb.coeff(4, i) / s2,
        2.0 * eb.coeff(5, i) / s2;
    eb.hessian[i] = H;
  }
  const auto& rule = QuadratureRule::triangle(2);
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (const auto& qn : rule.nodes) {
      Point p = mesh.point_in(t, qn.l0, qn.l1, qn.l2);
      double m[6];
      mono(local(p), m);
      double v = 0.0;
      for (int c = 0; c < 6; ++c) v += eb.coeff(c, i) * m[c];
      s += qn.w * v;
    }
    eb.integral[i] = eb.area * s;
  }
  return eb;
}

}  // namespace

void ElementBasis::values_at(Point p, double out[6]) const {
  Point q{(p.x - center.x) / scale, (p.y - center.y) / scale};
  double m[6] = {1.0, q.x, q.y, q.x * q.x, q.x * q.y, q.y * q.y};
  for (int i = 0; i < 6; ++i) {
    double v = 0.0;
    for (int c = 0; c < 6; ++c) v += coeff(c, i) * m[c];
    out[i] = v;
  }
}

void ElementBasis::gradients_at(Point p, Point out[6]) const {
  Point q{(p.x - center.x) / scale, (p.y - center.y) / scale};
  double gx[6] = {0.0, 1.0, 0.0, 2.0 * q.x, q.y, 0.0};
  double gy[6] = {0.0, 0.0, 1.0, 0.0, q.x, 2.0 * q.y};
  for (int i = 0; i < 6; ++i) {
    double vx = 0.0, vy = 0.0;
    for (int c = 0; c < 6; ++c) {
      vx += coeff(c, i) * gx[c];
      vy += coeff(c, i) * gy[c];
    }
    out[i] = {vx / scale, vy / scale};
  }
}

Eigen::Matrix<double, 6, 1> ElementBasis::combine(const double dofs[6]) const {
  Eigen::Matrix<double, 6, 1> d;
  for (int i = 0; i < 6; ++i) d[i] = dofs[i];
  return coeff * d;
}

double ElementBasis::eval(const Eigen::Matrix<double, 6, 1>& poly, Point p) const {
  Point q{(p.x - center.x) / scale, (p.y - center.y) / scale};
  return poly[0] + poly[1] * q.x + poly[2] * q.y + poly[3] * q.x * q.x + poly[4] * q.x * q.y +
         poly[5] * q.y * q.y;
}

Point ElementBasis::eval_grad(const Eigen::Matrix<double, 6, 1>& poly, Point p) const {
  Point q{(p.x - center.x) / scale, (p.y - center.y) / scale};
  double gx = poly[1] + 2.0 * poly[3] * q.x + poly[4] * q.y;
  double gy = poly[2] + poly[4] * q.x + 2.0 * poly[5] * q.y;
  return {gx / scale, gy / scale};
}

Eigen::Matrix2d ElementBasis::eval_hess(const Eigen::Matrix<double, 6, 1>& poly) const {
  const double s2 = scale * scale;
  Eigen::Matrix2d H;
  H << 2.0 * poly[3] / s2, poly[4] / s2, poly[4] / s2, 2.0 * poly[5] / s2;
  return H;
}

MorleySpace::MorleySpace(MeshPtr mesh) : mesh_(std::move(mesh)) {
  dofs_ = build_dof_map(*mesh_);
  const int nt = mesh_->n_triangles();
  elem_.reserve(nt);
  slots_.resize(nt);
  tri_to_omega_.assign(nt, -1);
  for (int t = 0; t < nt; ++t) {
    elem_.push_back(build_element_basis(*mesh_, t));
    for (int k = 0; k < 3; ++k) {
      slots_[t][k] = dofs_.slot_vertex(mesh_->triangles[t].v[k]);
      slots_[t][3 + k] = dofs_.slot_edge(mesh_->tri_edges[t][k]);
    }
    if (mesh_->triangles[t].in_omega) {
      tri_to_omega_[t] = static_cast<int>(omega_tris_.size());
      omega_tris_.push_back(t);
    }
  }
}

SpacePtr make_space(MeshPtr mesh) { return std::make_shared<MorleySpace>(std::move(mesh)); }

SpacePtr make_space(Triangulation mesh) {
  return make_space(std::make_shared<const Triangulation>(std::move(mesh)));
}

MorleyField zero_field(SpacePtr space) {
  MorleyField f;
  f.coeff = Eigen::VectorXd::Zero(space->dofs().n_slots());
  f.space = std::move(space);
  return f;
}

MorleyField interpolate(SpacePtr space, const ScalarFn& value, const VectorFn& grad) {
  MorleyField f = zero_field(space);
  const auto& mesh = f.sp().mesh();
  const auto& dofs = f.sp().dofs();
  for (int v = 0; v < mesh.n_vertices(); ++v)
    f.coeff[dofs.slot_vertex(v)] = value(mesh.vertices[v].x, mesh.vertices[v].y);
  std::vector<double> gx, gw;
  gauss_legendre_01(3, gx, gw);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Point a = mesh.vertices[mesh.edges[e].v[0]];
    Point b = mesh.vertices[mesh.edges[e].v[1]];
    Point nu = {mesh.edges[e].tangent.y, -mesh.edges[e].tangent.x};
    double mean = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      Point p = a + gx[q] * (b - a);
      mean += gw[q] * dot(grad(p.x, p.y), nu);
    }
    f.coeff[dofs.slot_edge(e)] = mean;
  }
  return f;
}

MorleyField field_from_free(SpacePtr space, const Eigen::VectorXd& free) {
  MorleyField f = zero_field(std::move(space));
  const auto& dofs = f.sp().dofs();
  for (int s = 0; s < dofs.n_slots(); ++s)
    if (dofs.free_index[s] >= 0) f.coeff[s] = free[dofs.free_index[s]];
  return f;
}

Eigen::VectorXd free_from_field(const MorleyField& f) {
  const auto& dofs = f.sp().dofs();
  Eigen::VectorXd v(dofs.n_free);
  for (int s = 0; s < dofs.n_slots(); ++s)
    if (dofs.free_index[s] >= 0) v[dofs.free_index[s]] = f.coeff[s];
  return v;
}

Eigen::Matrix<double, 6, 1> element_poly(const MorleyField& f, int t) {
  if (t < 0 || t >= f.sp().mesh().n_triangles())
    throw std::out_of_range("element_poly: bad triangle index");
  double dofs[6];
  const auto& sl = f.sp().slots(t);
  for (int i = 0; i < 6; ++i) dofs[i] = f.coeff[sl[i]];
  return f.sp().element(t).combine(dofs);
}

Eigen::Matrix2d element_hessian(const MorleyField& f, int t) {
  return f.sp().element(t).eval_hess(element_poly(f, t));
}

double eval_field(const MorleyField& f, int t, Point p) {
  return f.sp().element(t).eval(element_poly(f, t), p);
}

double PiecewisePolyProjection::eval(int t, Point p) const {
  if (k == 0) return coeff(t, 0);
  Point c{(mesh->vertex_of(t, 0).x + mesh->vertex_of(t, 1).x + mesh->vertex_of(t, 2).x) / 3.0,
          (mesh->vertex_of(t, 0).y + mesh->vertex_of(t, 1).y + mesh->vertex_of(t, 2).y) / 3.0};
  return coeff(t, 0) + coeff(t, 1) * (p.x - c.x) + coeff(t, 2) * (p.y - c.y);
}

namespace {

template <class Eval>
PiecewisePolyProjection project_impl(const Triangulation& mesh, int k, int quad_degree,
                                     Eval&& eval) {
  if (k != 0 && k != 1) throw std::invalid_argument("project_pw: k must be 0 or 1");
  PiecewisePolyProjection proj;
  proj.k = k;
  proj.coeff.resize(mesh.n_triangles(), k == 0 ? 1 : 3);
  const auto& rule = QuadratureRule::triangle(std::max(quad_degree, 2 * k + 2));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    Point c = mesh.centroid(t);
    if (k == 0) {
      double s = 0.0;
      for (const auto& q : rule.nodes) {
        Point p = mesh.point_in(t, q.l0, q.l1, q.l2);
        s += q.w * eval(t, p);
      }
      proj.coeff(t, 0) = s;  // area-normalized weights give the mean directly
    } else {
      Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
      Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
      for (const auto& q : rule.nodes) {
        Point p = mesh.point_in(t, q.l0, q.l1, q.l2);
        Eigen::Vector3d b(1.0, p.x - c.x, p.y - c.y);
        M += q.w * b * b.transpose();
        rhs += q.w * eval(t, p) * b;
      }
      Eigen::Vector3d sol = M.ldlt().solve(rhs);
      proj.coeff.row(t) = sol.transpose();
    }
  }
  return proj;
}

}  // namespace

PiecewisePolyProjection project_pw(const MorleySpace& space, const ScalarFn& f, int k,
                                   int quad_degree) {
  auto proj = project_impl(space.mesh(), k, quad_degree,
                           [&](int, Point p) { return f(p.x, p.y); });
  proj.mesh = space.mesh_ptr();
  return proj;
}

PiecewisePolyProjection project_pw(const MorleyField& f, int k) {
  std::vector<Eigen::Matrix<double, 6, 1>> poly(f.sp().mesh().n_triangles());
  for (int t = 0; t < f.sp().mesh().n_triangles(); ++t) poly[t] = element_poly(f, t);
  auto proj = project_impl(f.sp().mesh(), k, 4,
                           [&](int t, Point p) { return f.sp().element(t).eval(poly[t], p); });
  proj.mesh = f.sp().mesh_ptr();
  return proj;
}

BrokenNorms broken_norms(const MorleyField& f) {
  BrokenNorms out;
  const auto& mesh = f.sp().mesh();
  const auto& rule = QuadratureRule::triangle(4);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto poly = element_poly(f, t);
    const auto& eb = f.sp().element(t);
    double l2 = 0.0, h1 = 0.0;
    for (const auto& q : rule.nodes) {
      Point p = mesh.point_in(t, q.l0, q.l1, q.l2);
      double v = eb.eval(poly, p);
      Point g = eb.eval_grad(poly, p);
      l2 += q.w * v * v;
      h1 += q.w * dot(g, g);
    }
    out.l2 += eb.area * l2;
    out.h1 += eb.area * h1;
    out.nc += eb.area * eb.eval_hess(poly).squaredNorm();
  }
  out.l2 = std::sqrt(out.l2);
  out.h1 = std::sqrt(out.h1);
  out.nc = std::sqrt(out.nc);
  return out;
}

namespace {

bool touches(const Triangulation& mesh, int t, Point corner) {
  for (int k = 0; k < 3; ++k)
    if (norm(mesh.vertex_of(t, k) - corner) < 1e-12) return true;
  return false;
}

}  // namespace

BrokenNorms broken_norms(const MorleyField& f, const ScalarField& exact, int quad_degree,
                         const std::optional<GradedCorner>& corner) {
  BrokenNorms out;
  const auto& mesh = f.sp().mesh();
  const auto& rule = QuadratureRule::triangle(quad_degree);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto poly = element_poly(f, t);
    const auto& eb = f.sp().element(t);
    Eigen::Matrix2d Hf = eb.eval_hess(poly);
    auto dl2 = [&](double x, double y) {
      double d = eb.eval(poly, {x, y}) - exact.value(x, y);
      return d * d;
    };
    auto dh1 = [&](double x, double y) {
      Point d = eb.eval_grad(poly, {x, y}) - exact.grad(x, y);
      return dot(d, d);
    };
    auto dnc = [&](double x, double y) {
      Eigen::Matrix2d d = Hf - exact.hess(x, y);
      return d.squaredNorm();
    };
    if (corner && touches(mesh, t, corner->corner)) {
      out.l2 += integrate_graded(mesh, t, corner->corner, corner->depth, rule, dl2);
      out.h1 += integrate_graded(mesh, t, corner->corner, corner->depth, rule, dh1);
      out.nc += integrate_graded(mesh, t, corner->corner, corner->depth, rule, dnc);
    } else {
      out.l2 += integrate(mesh, t, rule, dl2);
      out.h1 += integrate(mesh, t, rule, dh1);
      out.nc += integrate(mesh, t, rule, dnc);
    }
  }
  out.l2 = std::sqrt(std::max(out.l2, 0.0));
  out.h1 = std::sqrt(std::max(out.h1, 0.0));
  out.nc = std::sqrt(std::max(out.nc, 0.0));
  return out;
}

BrokenNorms exact_norms(const MorleySpace& space, const ScalarField& exact, int quad_degree,
                        const std::optional<GradedCorner>& corner) {
  BrokenNorms out;
  const auto& mesh = space.mesh();
  const auto& rule = QuadratureRule::triangle(quad_degree);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto vl2 = [&](double x, double y) {
      double v = exact.value(x, y);
      return v * v;
    };
    auto vh1 = [&](double x, double y) {
      Point g = exact.grad(x, y);
      return dot(g, g);
    };
    auto vnc = [&](double x, double y) { return exact.hess(x, y).squaredNorm(); };
    if (corner && touches(mesh, t, corner->corner)) {
      out.l2 += integrate_graded(mesh, t, corner->corner, corner->depth, rule, vl2);
      out.h1 += integrate_graded(mesh, t, corner->corner, corner->depth, rule, vh1);
      out.nc += integrate_graded(mesh, t, corner->corner, corner->depth, rule, vnc);
    } else {
      out.l2 += integrate(mesh, t, rule, vl2);
      out.h1 += integrate(mesh, t, rule, vh1);
      out.nc += integrate(mesh, t, rule, vnc);
    }
  }
  out.l2 = std::sqrt(out.l2);
  out.h1 = std::sqrt(out.h1);
  out.nc = std::sqrt(out.nc);
  return out;
}

}  // namespace vkm
