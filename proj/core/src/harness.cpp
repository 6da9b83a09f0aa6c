#include "vkmorley/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace vkm {

namespace {

struct LevelOutputs {
  OptimalitySolution sol;
  EstimatorBreakdown est;
};

LevelRow measure_level(const ManufacturedCase& mc, SpacePtr space, int level,
                       const SolverConfig& solver, const HarnessConfig& harness,
                       LevelOutputs& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out.sol = pdas_solve(space, mc.data, solver);
  out.est = assemble_breakdown(out.sol, mc.data);

  LevelRow row;
  row.level = level;
  const auto& mesh = space->mesh();
  row.h_max = mesh.h_max;
  row.h_leg = mesh.h_max / std::sqrt(2.0);
  row.n_triangles = mesh.n_triangles();
  row.dim_vm = space->dim();
  const long n_omega = static_cast<long>(space->omega_triangles().size());
  row.ndof = 2L * space->dim() + n_omega;
  row.ndof_pair = 4L * space->dim() + n_omega;

  const int deg = harness.quad_error_degree;
  const auto& corner = mc.data.corner;
  BrokenNorms e1 = broken_norms(out.sol.state.psi1, mc.psi1, deg, corner);
  BrokenNorms e2 = broken_norms(out.sol.state.psi2, mc.psi2, deg, corner);
  BrokenNorms a1 = broken_norms(out.sol.adjoint.theta1, mc.theta1, deg, corner);
  BrokenNorms a2 = broken_norms(out.sol.adjoint.theta2, mc.theta2, deg, corner);
  BrokenNorms n1 = exact_norms(*space, mc.psi1, deg, corner);
  BrokenNorms n2 = exact_norms(*space, mc.psi2, deg, corner);
  BrokenNorms m1 = exact_norms(*space, mc.theta1, deg, corner);
  BrokenNorms m2 = exact_norms(*space, mc.theta2, deg, corner);

  double abs_state = std::hypot(e1.nc, e2.nc);
  double abs_adjoint = std::hypot(a1.nc, a2.nc);
  row.norm_state = std::hypot(n1.nc, n2.nc);
  row.norm_adjoint = std::hypot(m1.nc, m2.nc);

  // Control error in L2(omega) against the exact clipped control.
  const auto& rule = QuadratureRule::triangle(deg);
  double cerr2 = 0.0, cnrm2 = 0.0;
  for (std::size_t k = 0; k < space->omega_triangles().size(); ++k) {
    int t = space->omega_triangles()[k];
    double uh = out.sol.control.value[k];
    auto derr = [&](double x, double y) {
      double d = mc.control(x, y) - uh;
      return d * d;
    };
    auto dnrm = [&](double x, double y) {
      double v = mc.control(x, y);
      return v * v;
    };
    cerr2 += integrate(mesh, t, rule, derr);
    cnrm2 += integrate(mesh, t, rule, dnrm);
  }
  double abs_control = std::sqrt(cerr2);
  row.norm_control = std::sqrt(cnrm2);

  row.err_state = abs_state / row.norm_state;
  row.err_adjoint = abs_adjoint / row.norm_adjoint;
  row.err_control = abs_control / row.norm_control;
  double abs_total = abs_state + abs_adjoint + abs_control;
  row.total_error = abs_total / (row.norm_state + row.norm_adjoint + row.norm_control);

  row.eta_st = out.est.eta_st;
  row.eta_ad = out.est.eta_ad;
  row.eta_con = out.est.eta_con;
  row.eta = out.est.eta;
  row.efficiency_ratio = abs_total / out.est.eta;
  row.osc0_f = data_oscillation(*space, mc.data.f, 0, deg);
  row.cost_value = out.sol.diag.cost_value;
  row.pdas_steps = out.sol.diag.pdas_steps;
  row.newton_total = out.sol.diag.newton_total();
  row.newton_max = out.sol.diag.newton_max();
  row.state_residual = out.sol.diag.state_residual;
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

void fill_orders(RunReport& rep, bool by_ndof) {
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const LevelRow& a = rep.rows[i - 1];
    LevelRow& b = rep.rows[i];
    double denom = by_ndof ? std::log(static_cast<double>(b.ndof_pair) / a.ndof_pair)
                           : std::log(a.h_max / b.h_max);
    auto ord = [&](double ea, double eb) { return std::log(ea / eb) / denom; };
    b.ord_state = ord(a.err_state, b.err_state);
    b.ord_adjoint = ord(a.err_adjoint, b.err_adjoint);
    b.ord_control = ord(a.err_control, b.err_control);
    b.ord_total = ord(a.total_error, b.total_error);
    b.ord_eta_st = ord(a.eta_st, b.eta_st);
    b.ord_eta_ad = ord(a.eta_ad, b.eta_ad);
    b.ord_eta_con = ord(a.eta_con, b.eta_con);
    b.ord_eta = ord(a.eta, b.eta);
  }
}

void maybe_dump(const HarnessConfig& harness, const EstimatorBreakdown& est, int level) {
  if (harness.estimator_dump)
    write_estimator_dump(*harness.estimator_dump, est, level, level == 0);
}

void maybe_mesh_out(const HarnessConfig& harness, const Triangulation& mesh, int level) {
  if (harness.mesh_out_prefix.empty()) return;
  std::string path = harness.mesh_out_prefix + "_L" + std::to_string(level) + ".mesh";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open mesh output file " + path);
  save_mesh(mesh, out);
}

}  // namespace

RunReport run_uniform(const ManufacturedCase& mc, int levels, const SolverConfig& solver,
                      const HarnessConfig& harness) {
  if (levels < 1) throw std::invalid_argument("run_uniform: levels must be >= 1");
  RunReport rep;
  rep.example = mc.name;
  rep.refine = "uniform";
  Triangulation mesh = mc.initial_mesh();
  for (int level = 0; level < levels; ++level) {
    SpacePtr space = make_space(mesh);
    LevelOutputs out;
    rep.rows.push_back(measure_level(mc, space, level, solver, harness, out));
    maybe_dump(harness, out.est, level);
    maybe_mesh_out(harness, mesh, level);
    if (level + 1 < levels) mesh = red_refine(mesh);
  }
  fill_orders(rep, /*by_ndof=*/false);
  return rep;
}

RunReport run_adaptive(const ManufacturedCase& mc, int max_iterations, const SolverConfig& solver,
                       const HarnessConfig& harness) {
  if (max_iterations < 1) throw std::invalid_argument("run_adaptive: need at least one iteration");
  if (!(harness.theta > 0.0 && harness.theta < 1.0))
    throw std::invalid_argument("run_adaptive: theta must lie in (0,1)");
  RunReport rep;
  rep.example = mc.name;
  rep.refine = "adaptive";
  Triangulation mesh = mc.initial_mesh();
  for (int level = 0; level < max_iterations; ++level) {
    SpacePtr space = make_space(mesh);
    LevelOutputs out;
    LevelRow row = measure_level(mc, space, level, solver, harness, out);

    auto indicator = out.est.marking_indicator(space->mesh(), space->mesh().tri_edges);
    std::vector<int> marked = doerfler_mark(indicator, harness.theta);
    row.marked = static_cast<int>(marked.size());
    for (int t : marked) {
      Point c = space->mesh().centroid(t);
      if (norm(c) < 0.25) ++row.marked_near_corner;
    }
    rep.rows.push_back(row);
    maybe_dump(harness, out.est, level);
    maybe_mesh_out(harness, mesh, level);
    if (level + 1 < max_iterations) mesh = nvb_refine(mesh, marked);
  }
  fill_orders(rep, /*by_ndof=*/true);
  return rep;
}

void emit_report(const RunReport& report, std::ostream& out) {
  out << "level,h_max,h_leg,n_triangles,dim_vm,ndof,ndof_pair,"
         "rel_err_state,order_state,rel_err_adjoint,order_adjoint,"
         "rel_err_control,order_control,total_error,order_total,"
         "eta_st,order_eta_st,eta_ad,order_eta_ad,eta_con,order_eta_con,eta,order_eta,"
         "efficiency_ratio,osc0_f,cost,pdas_steps,newton_total,newton_max,state_residual,"
         "marked,marked_near_corner\n";
  char buf[1024];
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const LevelRow& r = report.rows[i];
    auto ord = [&](double v) {
      if (i == 0) return std::string();
      char b[32];
      std::snprintf(b, sizeof b, "%.4f", v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf,
                  "%d,%.6g,%.6g,%d,%d,%ld,%ld,%.9g,%s,%.9g,%s,%.9g,%s,%.9g,%s,"
                  "%.9g,%s,%.9g,%s,%.9g,%s,%.9g,%s,%.9g,%.9g,%.9g,%d,%d,%d,%.6g,%d,%d\n",
                  r.level, r.h_max, r.h_leg, r.n_triangles, r.dim_vm, r.ndof, r.ndof_pair,
                  r.err_state, ord(r.ord_state).c_str(), r.err_adjoint, ord(r.ord_adjoint).c_str(),
                  r.err_control, ord(r.ord_control).c_str(), r.total_error, ord(r.ord_total).c_str(),
                  r.eta_st, ord(r.ord_eta_st).c_str(), r.eta_ad, ord(r.ord_eta_ad).c_str(),
                  r.eta_con, ord(r.ord_eta_con).c_str(), r.eta, ord(r.ord_eta).c_str(),
                  r.efficiency_ratio, r.osc0_f, r.cost_value, r.pdas_steps, r.newton_total,
                  r.newton_max, r.state_residual, r.marked, r.marked_near_corner);
    out << buf;
  }
}

void emit_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file " + path);
  emit_report(report, out);
}

}  // namespace vkm
