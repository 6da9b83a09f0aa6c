#ifndef VKMORLEY_HARNESS_HPP
#define VKMORLEY_HARNESS_HPP

#include <iosfwd>
#include <optional>

#include "vkmorley/cases.hpp"
#include "vkmorley/estimator.hpp"

namespace vkm {

struct HarnessConfig {
  int quad_error_degree = 10;  // quadrature for error norms and denominators
  double theta = 0.2;          // Doerfler parameter
  std::ostream* estimator_dump = nullptr;
  std::string mesh_out_prefix;  // per-level mesh files when nonempty
};

// One refinement level of a convergence study. Errors are relative; the
// total error is (sum of absolute errors) / (sum of exact norms) and the
// efficiency ratio is (sum of absolute errors) / eta.
struct LevelRow {
  int level = 0;
  double h_max = 0.0;
  double h_leg = 0.0;  // h_max / sqrt(2), the leg of a structured right triangle
  int n_triangles = 0;
  int dim_vm = 0;
  long ndof = 0;        // 2 dim(V_M) + #omega-triangles
  long ndof_pair = 0;   // 2 dim(V_M x V_M) + #omega-triangles
  double err_state = 0.0, err_adjoint = 0.0, err_control = 0.0;
  double norm_state = 0.0, norm_adjoint = 0.0, norm_control = 0.0;
  double total_error = 0.0;
  double eta_st = 0.0, eta_ad = 0.0, eta_con = 0.0, eta = 0.0;
  double efficiency_ratio = 0.0;
  double osc0_f = 0.0;
  double cost_value = 0.0;
  int pdas_steps = 0;
  int newton_total = 0;
  int newton_max = 0;
  double state_residual = 0.0;
  int marked = 0;
  int marked_near_corner = 0;  // centroid within 0.25 of the L-corner
  double wall_seconds = 0.0;   // not serialized (reports stay deterministic)

  double ord_state = 0.0, ord_adjoint = 0.0, ord_control = 0.0, ord_total = 0.0;
  double ord_eta_st = 0.0, ord_eta_ad = 0.0, ord_eta_con = 0.0, ord_eta = 0.0;
};

struct RunReport {
  std::string example;
  std::string refine;  // "uniform" | "adaptive"
  std::vector<LevelRow> rows;
};

// Uniform red-refinement study; orders use mesh-size ratios.
RunReport run_uniform(const ManufacturedCase& mc, int levels, const SolverConfig& solver,
                      const HarnessConfig& harness);

// Solve-estimate-mark-refine loop with Doerfler marking and newest-vertex
// bisection; orders use NDOF ratios (positive rates).
RunReport run_adaptive(const ManufacturedCase& mc, int max_iterations, const SolverConfig& solver,
                       const HarnessConfig& harness);

// Deterministic CSV, one row per level.
void emit_report(const RunReport& report, std::ostream& out);
void emit_report(const RunReport& report, const std::string& path);

}  // namespace vkm

#endif
