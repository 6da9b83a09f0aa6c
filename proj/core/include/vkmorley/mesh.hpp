#ifndef VKMORLEY_MESH_HPP
#define VKMORLEY_MESH_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

namespace vkm {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }

// Triangle record. Vertex indices are CCW; local edge k is the edge opposite
// local vertex k, so the bisection peak of a triangle is v[refine_edge].
struct Triangle {
  std::array<int, 3> v{};
  int refine_edge = 0;   // local index of the newest-vertex-bisection edge
  int generation = 0;
  bool in_omega = true;  // membership in the control region
};

struct Edge {
  std::array<int, 2> v{};       // endpoint vertex indices, v[0] < v[1]
  std::array<int, 2> tri{-1, -1};
  bool boundary = false;
  double length = 0.0;
  Point tangent{};              // unit, points from v[0] to v[1]
};

// Conforming triangulation. Instances are immutable after construction;
// refinement produces a new value, so levels can be snapshotted and shared
// across threads read-only.
class Triangulation {
 public:
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> tri_edges;  // global edge index opposite local vertex k
  std::vector<std::vector<int>> vertex_tris;  // vertex -> incident triangles
  std::vector<char> boundary_vertex;
  double h_max = 0.0;  // max_T diam(T)

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_boundary_edges() const;
  int n_boundary_vertices() const;

  Point vertex_of(int t, int k) const { return vertices[triangles[t].v[k]]; }
  double area(int t) const;
  double diameter(int t) const;
  Point centroid(int t) const;
  // Barycentric combination of the triangle's vertices.
  Point point_in(int t, double l0, double l1, double l2) const;
  double min_angle() const;

  // Builds connectivity, validates orientation and conformity. Throws
  // std::runtime_error on an inconsistent input.
  static Triangulation build(std::vector<Point> vertices, std::vector<Triangle> triangles);
};

using MeshPtr = std::shared_ptr<const Triangulation>;

// Structured n x n grid of the unit square; every cell is split along the
// (lower-left -> upper-right) diagonal. All triangles carry the omega flag.
Triangulation generate_square_mesh(int n);

// Initial 24-triangle mesh of the L-shaped domain
// (-1,1)^2 \ ([0,1) x (-1,0]): three unit quadrants, each split into four
// half-unit squares of two triangles each.
Triangulation generate_lshape_mesh();

// Uniform red refinement: each triangle is split into four similar children
// through the edge midpoints; h halves exactly.
Triangulation red_refine(const Triangulation& mesh);

// Newest-vertex bisection of the marked triangles plus the conformity
// closure. The midpoint of a bisected edge becomes the peak of both children.
Triangulation nvb_refine(const Triangulation& mesh, const std::vector<int>& marked);

// All triangles sharing at least one vertex with t (t included).
std::vector<int> patch_of(const Triangulation& mesh, int t);

// Text format, one item per line:
//   v <x> <y>
//   t <i> <j> <k> [w]
// with 0-based vertex indices; w=1 flags omega membership (default 1).
Triangulation load_mesh(std::istream& in);
void save_mesh(const Triangulation& mesh, std::ostream& out);

}  // namespace vkm

#endif
