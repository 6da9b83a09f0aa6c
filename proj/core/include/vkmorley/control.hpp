#ifndef VKMORLEY_CONTROL_HPP
#define VKMORLEY_CONTROL_HPP

#include <stdexcept>
#include <string>

#include "vkmorley/forms.hpp"

namespace vkm {

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct SingularJacobian : std::runtime_error {
  explicit SingularJacobian(const std::string& what) : std::runtime_error(what) {}
};
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

enum class LinearSolver { sparse_lu };

struct SolverConfig {
  double newton_tol = 1e-9;  // Euclidean norm of the iterate difference
  int newton_max_iter = 50;
  int pdas_max_iter = 20;
  LinearSolver linear_solver = LinearSolver::sparse_lu;
  bool warm_start = true;  // reuse the previous iterate across active-set steps
  double newton_damping = 1.0;  // fallback, plain Newton by default
};

struct SolverDiagnostics {
  std::vector<int> newton_iters;  // per active-set step
  int pdas_steps = 0;
  double state_residual = 0.0;
  double adjoint_residual = 0.0;
  double cost_value = 0.0;
  int newton_total() const {
    int s = 0;
    for (int k : newton_iters) s += k;
    return s;
  }
  int newton_max() const {
    int m = 0;
    for (int k : newton_iters) m = std::max(m, k);
    return m;
  }
};

struct OptimalitySolution {
  StatePair state;
  AdjointPair adjoint;
  ControlField control;
  SolverDiagnostics diag;
};

// Newton iteration for the nonlinear state system at a fixed control. The
// default initial guess is the solution of the biharmonic part.
StatePair solve_state(SpacePtr space, const ControlField& u, const ProblemData& data,
                      const SolverConfig& config, const StatePair* initial = nullptr,
                      int* iterations = nullptr);

// One linear solve with the transposed state Jacobian.
AdjointPair solve_adjoint(const StatePair& psi, const ProblemData& data);

// Unclipped per-omega-triangle candidates -(1/alpha) mean_T(theta_1); the
// discrete optimality condition is u|_T = clip(candidate_T).
std::vector<double> control_update_candidate(const AdjointPair& theta, const ProblemData& data);

// Primal-dual active set outer loop for the full optimality system. Each
// step solves the state and adjoint equations coupled with the projected
// control condition for the current active-set guess (Newton), then updates
// the active sets from the candidates; it stops when the sets repeat.
OptimalitySolution pdas_solve(SpacePtr space, const ProblemData& data, const SolverConfig& config);

}  // namespace vkm

#endif
