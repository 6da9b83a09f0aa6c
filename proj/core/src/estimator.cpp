#include "vkmorley/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace vkm {

std::vector<double> EstimatorBreakdown::marking_indicator(
    const Triangulation& mesh, const std::vector<std::array<int, 3>>& tri_edges) const {
  std::vector<double> ind(mesh.n_triangles(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ind[t] = eta2_state_K[t] + eta2_adj_res_K[t] + eta2_adj_p0_K[t] + eta2_control_K[t];
    for (int k = 0; k < 3; ++k) {
      int e = tri_edges[t][k];
      if (!mesh.edges[e].boundary) ind[t] += 0.5 * (eta2_edge_state[e] + eta2_edge_adj[e]);
    }
  }
  return ind;
}

double state_volume_indicator(const OptimalitySolution& sol, const ProblemData& data, int t,
                              const EstimatorConfig& cfg) {
  const auto& space = sol.state.psi1.sp();
  const auto& mesh = space.mesh();
  double h = mesh.diameter(t);
  double br12 = bracket(element_hessian(sol.state.psi1, t), element_hessian(sol.state.psi2, t));
  double br11 = bracket(element_hessian(sol.state.psi1, t), element_hessian(sol.state.psi1, t));
  double cu = 0.0;
  int k = space.omega_index(t);
  if (k >= 0) cu = sol.control.value[k];
  const auto& rule = QuadratureRule::triangle(cfg.quad_degree);
  double resid2 = integrate(mesh, t, rule, [&](double x, double y) {
    double r = data.f(x, y) + cu + br12;
    return r * r;
  });
  double h4 = h * h * h * h;
  return h4 * (resid2 + br11 * br11 * mesh.area(t));
}

std::pair<double, double> adjoint_volume_indicator(const OptimalitySolution& sol,
                                                   const ProblemData& data, int t,
                                                   const EstimatorConfig& cfg) {
  const auto& space = sol.state.psi1.sp();
  const auto& mesh = space.mesh();
  const auto& eb = space.element(t);
  double h = mesh.diameter(t);
  auto p1 = element_poly(sol.state.psi1, t);
  auto p2 = element_poly(sol.state.psi2, t);
  auto t1 = element_poly(sol.adjoint.theta1, t);
  auto t2 = element_poly(sol.adjoint.theta2, t);
  Eigen::Matrix2d H1 = eb.eval_hess(p1), H2 = eb.eval_hess(p2);
  double br_1t2 = bracket(H1, eb.eval_hess(t2));
  double br_2t1 = bracket(H2, eb.eval_hess(t1));
  double br_1t1 = bracket(H1, eb.eval_hess(t1));

  const auto& rule = QuadratureRule::triangle(cfg.quad_degree);
  double res2 = integrate(mesh, t, rule, [&](double x, double y) {
    double r1 = eb.eval(p1, {x, y}) - data.psi_d1(x, y) - br_1t2 + br_2t1;
    double r2 = eb.eval(p2, {x, y}) - data.psi_d2(x, y) + br_1t1;
    return r1 * r1 + r2 * r2;
  });
  double h4 = h * h * h * h;

  // Mean defects (1 - P0) of the adjoint components; the integrand is the
  // squared quadratic times a constant Hessian norm, integrated exactly.
  double mean1 = 0.0, mean2 = 0.0;
  {
    const auto& sl = space.slots(t);
    for (int i = 0; i < 6; ++i) {
      mean1 += sol.adjoint.theta1.coeff[sl[i]] * eb.integral[i];
      mean2 += sol.adjoint.theta2.coeff[sl[i]] * eb.integral[i];
    }
    mean1 /= eb.area;
    mean2 /= eb.area;
  }
  const auto& rule4 = QuadratureRule::triangle(cfg.quad_p0_degree);
  double d1 = integrate(mesh, t, rule4, [&](double x, double y) {
    double v = eb.eval(t1, {x, y}) - mean1;
    return v * v;
  });
  double d2 = integrate(mesh, t, rule4, [&](double x, double y) {
    double v = eb.eval(t2, {x, y}) - mean2;
    return v * v;
  });
  double p0 = H1.squaredNorm() * d2 + H2.squaredNorm() * d1 + H1.squaredNorm() * d1;
  return {h4 * res2, p0};
}

double edge_jump_indicator(const MorleyField& f1, const MorleyField& f2, int e) {
  const auto& mesh = f1.sp().mesh();
  const Edge& ed = mesh.edges[e];
  if (ed.boundary) return 0.0;
  Eigen::Vector2d tau(ed.tangent.x, ed.tangent.y);
  double val = 0.0;
  for (const MorleyField* f : {&f1, &f2}) {
    Eigen::Matrix2d jump = element_hessian(*f, ed.tri[0]) - element_hessian(*f, ed.tri[1]);
    val += (jump * tau).squaredNorm();
  }
  return ed.length * ed.length * val;
}

double control_indicator(const OptimalitySolution& sol, const ProblemData& data, int t,
                         const EstimatorConfig& cfg) {
  const auto& space = sol.state.psi1.sp();
  int k = space.omega_index(t);
  if (k < 0) return 0.0;
  const auto& mesh = space.mesh();
  const auto& eb = space.element(t);
  auto t1 = element_poly(sol.adjoint.theta1, t);
  double uh = sol.control.value[k];
  const auto& rule = QuadratureRule::triangle(cfg.quad_degree);
  return integrate(mesh, t, rule, [&](double x, double y) {
    double ut = clip(-eb.eval(t1, {x, y}) / data.alpha, data.u_lower, data.u_upper);
    double d = ut - uh;
    return d * d;
  });
}

EstimatorBreakdown assemble_breakdown(const OptimalitySolution& sol, const ProblemData& data,
                                      const EstimatorConfig& cfg) {
  const auto& space = sol.state.psi1.sp();
  const auto& mesh = space.mesh();
  EstimatorBreakdown b;
  const int nt = mesh.n_triangles();
  const int ne = mesh.n_edges();
  b.eta2_state_K.resize(nt);
  b.eta2_adj_res_K.resize(nt);
  b.eta2_adj_p0_K.resize(nt);
  b.eta2_control_K.resize(nt);
  b.eta2_edge_state.resize(ne);
  b.eta2_edge_adj.resize(ne);
  for (int t = 0; t < nt; ++t) {
    b.eta2_state_K[t] = state_volume_indicator(sol, data, t, cfg);
    auto [res, p0] = adjoint_volume_indicator(sol, data, t, cfg);
    b.eta2_adj_res_K[t] = res;
    b.eta2_adj_p0_K[t] = p0;
    b.eta2_control_K[t] = control_indicator(sol, data, t, cfg);
  }
  for (int e = 0; e < ne; ++e) {
    b.eta2_edge_state[e] = edge_jump_indicator(sol.state.psi1, sol.state.psi2, e);
    b.eta2_edge_adj[e] = edge_jump_indicator(sol.adjoint.theta1, sol.adjoint.theta2, e);
  }
  auto sum = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  double st2 = sum(b.eta2_state_K) + sum(b.eta2_edge_state);
  double ad2 = sum(b.eta2_adj_res_K) + sum(b.eta2_adj_p0_K) + sum(b.eta2_edge_adj);
  double con2 = sum(b.eta2_control_K);
  b.eta_st = std::sqrt(st2);
  b.eta_ad = std::sqrt(ad2);
  b.eta_con = std::sqrt(con2);
  b.eta = std::sqrt(st2 + ad2 + con2);
  return b;
}

double data_oscillation(const MorleySpace& space, const ScalarFn& f, int k, int quad_degree) {
  auto proj = project_pw(space, f, k, quad_degree);
  const auto& mesh = space.mesh();
  const auto& rule = QuadratureRule::triangle(quad_degree);
  double osc2 = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double h = mesh.diameter(t);
    double v = integrate(mesh, t, rule, [&](double x, double y) {
      double d = f(x, y) - proj.eval(t, {x, y});
      return d * d;
    });
    osc2 += h * h * h * h * v;
  }
  return std::sqrt(osc2);
}

std::vector<int> doerfler_mark(const std::vector<double>& eta2, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("doerfler_mark: theta in (0,1)");
  for (double v : eta2)
    if (v < 0.0) throw std::invalid_argument("doerfler_mark: negative indicator");
  std::vector<int> order(eta2.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (eta2[a] != eta2[b]) return eta2[a] > eta2[b];
    return a < b;
  });
  double total = std::accumulate(eta2.begin(), eta2.end(), 0.0);
  double goal = theta * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int t : order) {
    if (acc >= goal) break;
    marked.push_back(t);
    acc += eta2[t];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

void write_estimator_dump(std::ostream& out, const EstimatorBreakdown& b, int level,
                          bool header) {
  if (header)
    out << "entity_kind,entity_id,level,eta_sq_state,eta_sq_adjoint_res,eta_sq_adjoint_p0,"
           "eta_sq_control,eta_sq_edge_state,eta_sq_edge_adjoint\n";
  char buf[512];
  for (std::size_t t = 0; t < b.eta2_state_K.size(); ++t) {
    std::snprintf(buf, sizeof buf, "triangle,%zu,%d,%.12g,%.12g,%.12g,%.12g,0,0\n", t, level,
                  b.eta2_state_K[t], b.eta2_adj_res_K[t], b.eta2_adj_p0_K[t], b.eta2_control_K[t]);
    out << buf;
  }
  for (std::size_t e = 0; e < b.eta2_edge_state.size(); ++e) {
    std::snprintf(buf, sizeof buf, "edge,%zu,%d,0,0,0,0,%.12g,%.12g\n", e, level,
                  b.eta2_edge_state[e], b.eta2_edge_adj[e]);
    out << buf;
  }
}

}  // namespace vkm
