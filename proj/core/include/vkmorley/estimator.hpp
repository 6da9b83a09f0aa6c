#ifndef VKMORLEY_ESTIMATOR_HPP
#define VKMORLEY_ESTIMATOR_HPP

#include <iosfwd>

#include "vkmorley/control.hpp"

namespace vkm {

// Per-entity a posteriori indicators. Family totals group the volume and
// edge contributions of the state and adjoint variables; the grand total is
// eta^2 = eta_ST^2 + eta_AD^2 + eta_CON^2.
struct EstimatorBreakdown {
  std::vector<double> eta2_state_K;     // h_K^4-weighted state residuals
  std::vector<double> eta2_adj_res_K;   // adjoint residual part
  std::vector<double> eta2_adj_p0_K;    // adjoint piecewise-mean defect part
  std::vector<double> eta2_control_K;   // post-processed control distance
  std::vector<double> eta2_edge_state;  // tangential Hessian jumps, state pair
  std::vector<double> eta2_edge_adj;    // tangential Hessian jumps, adjoint pair

  double eta_st = 0.0;
  double eta_ad = 0.0;
  double eta_con = 0.0;
  double eta = 0.0;

  // Per-triangle marking indicator: volume terms plus half of each adjacent
  // interior edge term.
  std::vector<double> marking_indicator(const Triangulation& mesh,
                                        const std::vector<std::array<int, 3>>& tri_edges) const;
};

struct EstimatorConfig {
  int quad_degree = 10;          // data terms and the clipped control integrand
  int quad_p0_degree = 4;        // exact for the quadratic-minus-mean squares
};

// eta^2_{K,state} = h_K^4 (||f + C u + [psi1,psi2]||^2_K + ||[psi1,psi1]||^2_K).
double state_volume_indicator(const OptimalitySolution& sol, const ProblemData& data, int t,
                              const EstimatorConfig& cfg = {});

// Residual and mean-defect parts of the adjoint indicator.
std::pair<double, double> adjoint_volume_indicator(const OptimalitySolution& sol,
                                                   const ProblemData& data, int t,
                                                   const EstimatorConfig& cfg = {});

// h_E^2 | [D^2 field] tau_E |^2 summed over a field pair; zero on boundary
// edges.
double edge_jump_indicator(const MorleyField& f1, const MorleyField& f2, int e);

// ||u~ - u_h||^2_{L2(K)} with u~ = clip(-(1/alpha) theta_1) evaluated
// pointwise; zero outside omega.
double control_indicator(const OptimalitySolution& sol, const ProblemData& data, int t,
                         const EstimatorConfig& cfg = {});

EstimatorBreakdown assemble_breakdown(const OptimalitySolution& sol, const ProblemData& data,
                                      const EstimatorConfig& cfg = {});

// osc_k(f)= ( sum_T h_T^4 || f - Pi_k f ||^2_{L2(T)} )^{1/2}.
double data_oscillation(const MorleySpace& space, const ScalarFn& f, int k, int quad_degree = 10);

// Minimal set (greedy on sorted indicators) with
// theta * sum eta2 <= sum_{marked} eta2.
std::vector<int> doerfler_mark(const std::vector<double>& eta2, double theta);

// CSV dump, one row per triangle and per edge.
void write_estimator_dump(std::ostream& out, const EstimatorBreakdown& b, int level,
                          bool header = true);

}  // namespace vkm

#endif
