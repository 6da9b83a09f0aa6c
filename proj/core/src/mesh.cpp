#include "vkmorley/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vkm {

namespace {

double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

std::array<int, 2> sorted_pair(int a, int b) {
  return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
}

// Longest local edge; ties resolved by the smaller global edge index so the
// choice is independent of traversal order.
int longest_edge_local(const Triangulation& m, int t) {
  int best = 0;
  double best_len = -1.0;
  long best_gid = 0;
  for (int k = 0; k < 3; ++k) {
    int ge = m.tri_edges[t][k];
    double len = m.edges[ge].length;
    if (len > best_len + 1e-14 * (1.0 + best_len) ||
        (std::abs(len - best_len) <= 1e-14 * (1.0 + best_len) && ge < best_gid)) {
      best = k;
      best_len = len;
      best_gid = ge;
    }
  }
  return best;
}

}  // namespace

int Triangulation::n_boundary_edges() const {
  int n = 0;
  for (const auto& e : edges) n += e.boundary ? 1 : 0;
  return n;
}

int Triangulation::n_boundary_vertices() const {
  int n = 0;
  for (char b : boundary_vertex) n += b ? 1 : 0;
  return n;
}

double Triangulation::area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr.v[0]], vertices[tr.v[1]], vertices[tr.v[2]]);
}

double Triangulation::diameter(int t) const {
  double d = 0.0;
  for (int k = 0; k < 3; ++k)
    d = std::max(d, norm(vertex_of(t, (k + 1) % 3) - vertex_of(t, (k + 2) % 3)));
  return d;
}

Point Triangulation::centroid(int t) const {
  Point p = vertex_of(t, 0) + vertex_of(t, 1) + vertex_of(t, 2);
  return {p.x / 3.0, p.y / 3.0};
}

Point Triangulation::point_in(int t, double l0, double l1, double l2) const {
  Point a = vertex_of(t, 0), b = vertex_of(t, 1), c = vertex_of(t, 2);
  return {l0 * a.x + l1 * b.x + l2 * c.x, l0 * a.y + l1 * b.y + l2 * c.y};
}

double Triangulation::min_angle() const {
  double amin = 4.0;
  for (int t = 0; t < n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      Point u = vertex_of(t, (k + 1) % 3) - vertex_of(t, k);
      Point w = vertex_of(t, (k + 2) % 3) - vertex_of(t, k);
      double ang = std::atan2(std::abs(cross(u, w)), dot(u, w));
      amin = std::min(amin, ang);
    }
  }
  return amin;
}

Triangulation Triangulation::build(std::vector<Point> vertices, std::vector<Triangle> triangles) {
  Triangulation m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  const int nv = m.n_vertices();
  const int nt = m.n_triangles();

  for (int t = 0; t < nt; ++t) {
    const auto& tr = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tr.v[k] < 0 || tr.v[k] >= nv)
        throw std::runtime_error("mesh: vertex index out of range in triangle " + std::to_string(t));
    }
    if (tr.v[0] == tr.v[1] || tr.v[1] == tr.v[2] || tr.v[0] == tr.v[2])
      throw std::runtime_error("mesh: repeated vertex in triangle " + std::to_string(t));
    if (m.area(t) <= 0.0)
      throw std::runtime_error("mesh: non-positive orientation in triangle " + std::to_string(t));
    if (tr.refine_edge < 0 || tr.refine_edge > 2)
      throw std::runtime_error("mesh: bad refinement edge in triangle " + std::to_string(t));
  }

  std::map<std::array<int, 2>, int> edge_id;
  m.tri_edges.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      auto key = sorted_pair(m.triangles[t].v[(k + 1) % 3], m.triangles[t].v[(k + 2) % 3]);
      auto it = edge_id.find(key);
      int e;
      if (it == edge_id.end()) {
        e = static_cast<int>(m.edges.size());
        edge_id.emplace(key, e);
        Edge ed;
        ed.v = key;
        Point d = m.vertices[key[1]] - m.vertices[key[0]];
        ed.length = norm(d);
        ed.tangent = {d.x / ed.length, d.y / ed.length};
        m.edges.push_back(ed);
      } else {
        e = it->second;
      }
      Edge& ed = m.edges[e];
      if (ed.tri[0] == -1) {
        ed.tri[0] = t;
      } else if (ed.tri[1] == -1) {
        ed.tri[1] = t;
      } else {
        throw std::runtime_error("mesh: edge shared by more than two triangles");
      }
      m.tri_edges[t][k] = e;
    }
  }
  m.boundary_vertex.assign(nv, 0);
  for (auto& e : m.edges) {
    e.boundary = (e.tri[1] == -1);
    if (e.boundary) {
      m.boundary_vertex[e.v[0]] = 1;
      m.boundary_vertex[e.v[1]] = 1;
    }
  }
  m.vertex_tris.assign(nv, {});
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) m.vertex_tris[m.triangles[t].v[k]].push_back(t);

  m.h_max = 0.0;
  for (int t = 0; t < nt; ++t) m.h_max = std::max(m.h_max, m.diameter(t));
  return m;
}

Triangulation generate_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("generate_square_mesh: n must be >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Triangle a, b;
      a.v = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
      b.v = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      tris.push_back(a);
      tris.push_back(b);
    }
  }
  Triangulation m = Triangulation::build(std::move(verts), std::move(tris));
  for (int t = 0; t < m.n_triangles(); ++t)
    m.triangles[t].refine_edge = longest_edge_local(m, t);
  return m;
}

Triangulation generate_lshape_mesh() {
  const double s = 0.5;
  std::vector<Point> verts;
  std::vector<int> id(5 * 5, -1);
  auto grid = [&](int i, int j) -> int {
    int& slot = id[j * 5 + i];
    if (slot == -1) {
      slot = static_cast<int>(verts.size());
      verts.push_back({-1.0 + s * i, -1.0 + s * j});
    }
    return slot;
  };
  std::vector<Triangle> tris;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      double x0 = -1.0 + s * i, y0 = -1.0 + s * j;
      if (x0 >= -1e-12 && y0 <= -s + 1e-12) continue;  // removed quadrant [0,1)x(-1,0]
      Triangle a, b;
      a.v = {grid(i, j), grid(i + 1, j), grid(i + 1, j + 1)};
      b.v = {grid(i, j), grid(i + 1, j + 1), grid(i, j + 1)};
      tris.push_back(a);
      tris.push_back(b);
    }
  }
  Triangulation m = Triangulation::build(std::move(verts), std::move(tris));
  for (int t = 0; t < m.n_triangles(); ++t)
    m.triangles[t].refine_edge = longest_edge_local(m, t);
  return m;
}

Triangulation red_refine(const Triangulation& mesh) {
  std::vector<Point> verts = mesh.vertices;
  std::vector<int> edge_mid(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Point a = mesh.vertices[mesh.edges[e].v[0]];
    Point b = mesh.vertices[mesh.edges[e].v[1]];
    edge_mid[e] = static_cast<int>(verts.size());
    verts.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(4) * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    int m0 = edge_mid[mesh.tri_edges[t][0]];  // midpoint opposite v0
    int m1 = edge_mid[mesh.tri_edges[t][1]];
    int m2 = edge_mid[mesh.tri_edges[t][2]];
    Triangle c;
    c.generation = tr.generation + 1;
    c.in_omega = tr.in_omega;
    c.v = {tr.v[0], m2, m1};
    tris.push_back(c);
    c.v = {m2, tr.v[1], m0};
    tris.push_back(c);
    c.v = {m1, m0, tr.v[2]};
    tris.push_back(c);
    c.v = {m0, m1, m2};
    tris.push_back(c);
  }
  Triangulation m = Triangulation::build(std::move(verts), std::move(tris));
  for (int t = 0; t < m.n_triangles(); ++t)
    m.triangles[t].refine_edge = longest_edge_local(m, t);
  return m;
}

Triangulation nvb_refine(const Triangulation& mesh, const std::vector<int>& marked) {
  if (marked.empty()) return mesh;
  for (int t : marked)
    if (t < 0 || t >= mesh.n_triangles())
      throw std::invalid_argument("nvb_refine: marked index out of range");

  std::vector<Point> verts = mesh.vertices;
  std::vector<Triangle> tris = mesh.triangles;
  std::vector<char> alive(tris.size(), 1);
  std::map<std::array<int, 2>, int> midpoint;

  auto midpoint_of = [&](int a, int b) {
    auto key = sorted_pair(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int m = static_cast<int>(verts.size());
    verts.push_back({0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)});
    midpoint.emplace(key, m);
    return m;
  };

  auto bisect = [&](int t) {
    const Triangle tr = tris[t];
    int re = tr.refine_edge;
    int peak = tr.v[re], a = tr.v[(re + 1) % 3], b = tr.v[(re + 2) % 3];
    int m = midpoint_of(a, b);
    alive[t] = 0;
    Triangle c1, c2;
    c1.generation = c2.generation = tr.generation + 1;
    c1.in_omega = c2.in_omega = tr.in_omega;
    c1.v = {peak, a, m};
    c1.refine_edge = 2;  // edge (peak, a), opposite the new peak m
    c2.v = {peak, m, b};
    c2.refine_edge = 1;  // edge (b, peak)
    tris.push_back(c1);
    alive.push_back(1);
    tris.push_back(c2);
    alive.push_back(1);
  };

  for (int t : marked)
    if (alive[t]) bisect(t);

  // Closure: keep bisecting (through the refinement edge) any triangle one of
  // whose edges already carries a midpoint, until conforming.
  const int max_sweeps = 1000;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    const std::size_t count = tris.size();
    for (std::size_t t = 0; t < count; ++t) {
      if (!alive[t]) continue;
      bool split = false;
      for (int k = 0; k < 3 && !split; ++k)
        split = midpoint.count(sorted_pair(tris[t].v[(k + 1) % 3], tris[t].v[(k + 2) % 3])) > 0;
      if (split) {
        bisect(static_cast<int>(t));
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (sweep == max_sweeps) throw std::runtime_error("nvb_refine: closure did not terminate");

  std::vector<Triangle> out;
  out.reserve(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t)
    if (alive[t]) out.push_back(tris[t]);
  return Triangulation::build(std::move(verts), std::move(out));
}

std::vector<int> patch_of(const Triangulation& mesh, int t) {
  if (t < 0 || t >= mesh.n_triangles()) throw std::out_of_range("patch_of: bad triangle index");
  std::vector<int> out;
  for (int k = 0; k < 3; ++k)
    for (int s : mesh.vertex_tris[mesh.triangles[t].v[k]]) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Triangulation load_mesh(std::istream& in) {
  std::vector<Point> verts;
  std::vector<Triangle> tris;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Point p;
      if (!(ls >> p.x >> p.y)) throw std::runtime_error("mesh load: bad vertex at line " + std::to_string(lineno));
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::runtime_error("mesh load: non-finite vertex at line " + std::to_string(lineno));
      verts.push_back(p);
    } else if (tag == "t") {
      Triangle t;
      if (!(ls >> t.v[0] >> t.v[1] >> t.v[2]))
        throw std::runtime_error("mesh load: bad triangle at line " + std::to_string(lineno));
      int w = 1;
      if (ls >> w) t.in_omega = (w != 0);
      tris.push_back(t);
    } else {
      throw std::runtime_error("mesh load: unknown tag '" + tag + "' at line " + std::to_string(lineno));
    }
  }
  Triangulation m = Triangulation::build(std::move(verts), std::move(tris));
  // Reject hanging vertices: no vertex may sit strictly inside an edge.
  for (const auto& e : m.edges) {
    Point a = m.vertices[e.v[0]], b = m.vertices[e.v[1]];
    for (int v = 0; v < m.n_vertices(); ++v) {
      if (v == e.v[0] || v == e.v[1]) continue;
      Point p = m.vertices[v];
      double t = dot(p - a, b - a) / (e.length * e.length);
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      Point proj = a + t * (b - a);
      if (norm(p - proj) < 1e-12 * e.length)
        throw std::runtime_error("mesh load: hanging vertex " + std::to_string(v));
    }
  }
  for (int t = 0; t < m.n_triangles(); ++t)
    m.triangles[t].refine_edge = longest_edge_local(m, t);
  return m;
}

void save_mesh(const Triangulation& mesh, std::ostream& out) {
  out.precision(17);
  for (const auto& p : mesh.vertices) out << "v " << p.x << " " << p.y << "\n";
  for (const auto& t : mesh.triangles)
    out << "t " << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << (t.in_omega ? 1 : 0) << "\n";
}

}  // namespace vkm
