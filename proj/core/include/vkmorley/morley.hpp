#ifndef VKMORLEY_MORLEY_HPP
#define VKMORLEY_MORLEY_HPP

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "vkmorley/mesh.hpp"
#include "vkmorley/quadrature.hpp"

namespace vkm {

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<Point(double, double)>;

// Closed-form scalar field with the derivatives needed for broken norms.
struct ScalarField {
  ScalarFn value, dx, dy, dxx, dxy, dyy;
  Point grad(double x, double y) const { return {dx(x, y), dy(x, y)}; }
  Eigen::Matrix2d hess(double x, double y) const {
    Eigen::Matrix2d h;
    double hxy = dxy(x, y);
    h << dxx(x, y), hxy, hxy, dyy(x, y);
    return h;
  }
};

// Global Morley degrees of freedom: one value slot per vertex followed by one
// mean-normal-derivative slot per edge. Slots on the boundary are constrained
// to zero (clamped plate); dim V_M counts the free ones.
struct MorleyDofMap {
  int n_vertices = 0;
  int n_edges = 0;
  std::vector<char> constrained;  // per slot
  std::vector<int> free_index;    // per slot, -1 if constrained
  int n_free = 0;

  int slot_vertex(int v) const { return v; }
  int slot_edge(int e) const { return n_vertices + e; }
  int n_slots() const { return n_vertices + n_edges; }
};

MorleyDofMap build_dof_map(const Triangulation& mesh);

// Per-triangle Morley shape functions, stored as monomial coefficients in a
// centered/scaled local frame. Local DOF order: vertex values 0..2, then mean
// normal derivatives over the edges opposite those vertices. Edge normals use
// the global convention (tangent from the lower to the higher vertex index,
// normal = tangent rotated by -90 degrees), so the two triangles sharing an
// edge agree on the sign of the shared DOF.
struct ElementBasis {
  Point center{};
  double scale = 1.0;
  double area = 0.0;
  Eigen::Matrix<double, 6, 6> coeff;            // column i: monomial coeffs of phi_i
  std::array<Eigen::Matrix2d, 6> hessian;       // constant per shape function
  std::array<double, 6> integral;               // int_T phi_i

  void values_at(Point p, double out[6]) const;
  void gradients_at(Point p, Point out[6]) const;

  // Monomial coefficients (local frame) of a function with the given local
  // DOF values; evaluation helpers for the resulting quadratic.
  Eigen::Matrix<double, 6, 1> combine(const double dofs[6]) const;
  double eval(const Eigen::Matrix<double, 6, 1>& poly, Point p) const;
  Point eval_grad(const Eigen::Matrix<double, 6, 1>& poly, Point p) const;
  Eigen::Matrix2d eval_hess(const Eigen::Matrix<double, 6, 1>& poly) const;
};

// Morley space on one triangulation snapshot: DOF map plus cached element
// bases and the control-region triangle list.
class MorleySpace {
 public:
  explicit MorleySpace(MeshPtr mesh);

  const Triangulation& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const MorleyDofMap& dofs() const { return dofs_; }
  int dim() const { return dofs_.n_free; }
  const ElementBasis& element(int t) const { return elem_[t]; }
  const std::array<int, 6>& slots(int t) const { return slots_[t]; }

  const std::vector<int>& omega_triangles() const { return omega_tris_; }
  int omega_index(int t) const { return tri_to_omega_[t]; }

 private:
  MeshPtr mesh_;
  MorleyDofMap dofs_;
  std::vector<ElementBasis> elem_;
  std::vector<std::array<int, 6>> slots_;
  std::vector<int> omega_tris_;
  std::vector<int> tri_to_omega_;
};

using SpacePtr = std::shared_ptr<const MorleySpace>;

SpacePtr make_space(MeshPtr mesh);
SpacePtr make_space(Triangulation mesh);

// Coefficient vector over all slots; constrained entries are zero for fields
// produced by the solvers. Raw fields (tests, interpolants of functions that
// do not satisfy the boundary conditions) may populate every slot.
struct MorleyField {
  SpacePtr space;
  Eigen::VectorXd coeff;  // size n_slots

  const MorleySpace& sp() const { return *space; }
};

MorleyField zero_field(SpacePtr space);

// Morley interpolation: vertex values plus edge means of the normal
// derivative (3-point Gauss per edge). No boundary masking is applied.
MorleyField interpolate(SpacePtr space, const ScalarFn& value, const VectorFn& grad);

// Scatter a free-DOF vector into a field (constrained slots zero) and back.
MorleyField field_from_free(SpacePtr space, const Eigen::VectorXd& free);
Eigen::VectorXd free_from_field(const MorleyField& f);

// Local quadratic of a field on triangle t (monomial coefficients in the
// element frame), and the constant Hessian.
Eigen::Matrix<double, 6, 1> element_poly(const MorleyField& f, int t);
Eigen::Matrix2d element_hessian(const MorleyField& f, int t);
double eval_field(const MorleyField& f, int t, Point p);

// L^2 projection onto piecewise polynomials of degree k (0 or 1).
struct PiecewisePolyProjection {
  int k = 0;
  MeshPtr mesh;
  // One (k=0) or three (k=1: 1, x-cx, y-cy) coefficients per triangle.
  Eigen::MatrixXd coeff;
  double eval(int t, Point p) const;
};

PiecewisePolyProjection project_pw(const MorleySpace& space, const ScalarFn& f, int k,
                                   int quad_degree = 4);
PiecewisePolyProjection project_pw(const MorleyField& f, int k);

struct GradedCorner {
  Point corner{};
  int depth = 10;
};

struct BrokenNorms {
  double l2 = 0.0;
  double h1 = 0.0;  // broken H^1 seminorm
  double nc = 0.0;  // broken H^2 seminorm, the Morley energy norm
};

// Norms of the field itself. L^2 and H^1 by exact quadrature of the
// quadratic, NC analytically from the constant Hessians.
BrokenNorms broken_norms(const MorleyField& f);

// Norms of (field - exact); quadrature of the given degree, optionally graded
// toward a singular corner.
BrokenNorms broken_norms(const MorleyField& f, const ScalarField& exact, int quad_degree = 10,
                         const std::optional<GradedCorner>& corner = std::nullopt);

// Same quadrature applied to the exact field alone (relative-error
// denominators).
BrokenNorms exact_norms(const MorleySpace& space, const ScalarField& exact, int quad_degree = 10,
                        const std::optional<GradedCorner>& corner = std::nullopt);

}  // namespace vkm

#endif
