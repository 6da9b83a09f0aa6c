#include "vkmorley/control.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace vkm {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Loads and matrices that do not change across Newton/PDAS iterations.
struct Workspace {
  SpacePtr space;
  SparseMat A, M;
  Eigen::VectorXd lf, lg, ld1, ld2;
  std::vector<double> omega_area;  // per omega-triangle
  // Per omega-triangle: sparse free-DOF weights of the element mean,
  // mean_T(v) = sum (index, weight) . v_free.
  std::vector<std::vector<std::pair<int, double>>> wmean;

  explicit Workspace(SpacePtr sp, const ProblemData& data) : space(std::move(sp)) {
    const auto& s = *space;
    A = assemble_biharmonic(s);
    M = assemble_mass(s);
    lf = assemble_load(s, data.f, data.quad_load_degree, data.corner);
    lg = data.g ? assemble_load(s, data.g, data.quad_load_degree, data.corner)
                : Eigen::VectorXd::Zero(s.dim());
    ld1 = assemble_load(s, data.psi_d1, data.quad_load_degree, data.corner);
    ld2 = assemble_load(s, data.psi_d2, data.quad_load_degree, data.corner);
    const auto& omega = s.omega_triangles();
    omega_area.resize(omega.size());
    wmean.resize(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) {
      int t = omega[k];
      omega_area[k] = s.mesh().area(t);
      const auto& eb = s.element(t);
      const auto& sl = s.slots(t);
      for (int i = 0; i < 6; ++i) {
        int fi = s.dofs().free_index[sl[i]];
        if (fi >= 0) wmean[k].emplace_back(fi, eb.integral[i] / omega_area[k]);
      }
    }
  }

  double mean_of(std::size_t k, const Eigen::VectorXd& free) const {
    double m = 0.0;
    for (auto [i, w] : wmean[k]) m += w * free[i];
    return m;
  }
};

StatePair state_from_vec(SpacePtr space, const Eigen::VectorXd& x) {
  const int n = space->dim();
  return {field_from_free(space, x.head(n)), field_from_free(space, x.tail(n))};
}

AdjointPair adjoint_from_vec(SpacePtr space, const Eigen::VectorXd& x) {
  const int n = space->dim();
  return {field_from_free(space, x.head(n)), field_from_free(space, x.tail(n))};
}

Eigen::VectorXd solve_lu(const SparseMat& m, const Eigen::VectorXd& rhs, const char* who) {
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) throw SingularJacobian(std::string(who) + ": factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SingularJacobian(std::string(who) + ": solve failed");
  return x;
}

// Biharmonic initialization of the state for a given control; the adjoint
// part uses the biharmonic operator with the tracking right-hand side.
Eigen::VectorXd biharmonic_state(const Workspace& ws, const ControlField& u) {
  Eigen::SimplicialLDLT<SparseMat> ldlt;
  ldlt.compute(ws.A);
  if (ldlt.info() != Eigen::Success) throw SingularSystem("biharmonic init: factorization failed");
  const int n = ws.space->dim();
  Eigen::VectorXd x(2 * n);
  x.head(n) = ldlt.solve(ws.lf + assemble_control_load(*ws.space, u));
  x.tail(n) = ldlt.solve(ws.lg);
  return x;
}

Eigen::VectorXd biharmonic_adjoint(const Workspace& ws, const Eigen::VectorXd& state) {
  Eigen::SimplicialLDLT<SparseMat> ldlt;
  ldlt.compute(ws.A);
  if (ldlt.info() != Eigen::Success) throw SingularSystem("biharmonic init: factorization failed");
  const int n = ws.space->dim();
  Eigen::VectorXd x(2 * n);
  x.head(n) = ldlt.solve(ws.M * state.head(n) - ws.ld1);
  x.tail(n) = ldlt.solve(ws.M * state.tail(n) - ws.ld2);
  return x;
}

std::vector<double> candidates_from(const Workspace& ws, const Eigen::VectorXd& t1,
                                    double alpha) {
  std::vector<double> c(ws.wmean.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = -ws.mean_of(k, t1) / alpha;
  return c;
}

enum class SetTag : char { inactive, lower, upper };

// Control value per omega-triangle for the fixed active-set guess; inactive
// triangles take the unclipped candidate.
std::vector<double> control_values(const std::vector<SetTag>& tag, const std::vector<double>& cand,
                                   const ProblemData& data) {
  std::vector<double> u(tag.size());
  for (std::size_t k = 0; k < tag.size(); ++k) {
    u[k] = tag[k] == SetTag::lower ? data.u_lower
           : tag[k] == SetTag::upper ? data.u_upper
                                     : cand[k];
  }
  return u;
}

}  // namespace

StatePair solve_state(SpacePtr space, const ControlField& u, const ProblemData& data,
                      const SolverConfig& config, const StatePair* initial, int* iterations) {
  Workspace ws(space, data);
  const int n = space->dim();
  Eigen::VectorXd x;
  if (initial) {
    x.resize(2 * n);
    x.head(n) = free_from_field(initial->psi1);
    x.tail(n) = free_from_field(initial->psi2);
  } else {
    x = biharmonic_state(ws, u);
  }
  Eigen::VectorXd lc = assemble_control_load(*space, u);
  int iter = 0;
  for (; iter < config.newton_max_iter; ++iter) {
    StatePair psi = state_from_vec(space, x);
    SparseMat P1 = assemble_bracket_in_trial(*space, psi.psi1);
    SparseMat P2 = assemble_bracket_in_trial(*space, psi.psi2);
    Eigen::VectorXd p1 = x.head(n), p2 = x.tail(n);
    Eigen::VectorXd r(2 * n);
    r.head(n) = ws.A * p1 + 2.0 * (P1 * p2) - ws.lf - lc;
    r.tail(n) = ws.A * p2 - P1 * p1 - ws.lg;
    Triplets trip;
    auto add_block = [&](const SparseMat& m, int r0, int c0, double s) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it)
          trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                            s * it.value());
    };
    add_block(ws.A, 0, 0, 1.0);
    add_block(P2, 0, 0, 2.0);
    add_block(P1, 0, n, 2.0);
    add_block(P1, n, 0, -2.0);
    add_block(ws.A, n, n, 1.0);
    SparseMat J(2 * n, 2 * n);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd dx = solve_lu(J, r, "solve_state");
    x -= config.newton_damping * dx;
    if (dx.norm() < config.newton_tol) {
      ++iter;
      break;
    }
  }
  if (iter >= config.newton_max_iter)
    throw NoConvergence("solve_state: Newton did not converge in " +
                        std::to_string(config.newton_max_iter) + " iterations");
  if (iterations) *iterations = iter;
  return state_from_vec(space, x);
}

AdjointPair solve_adjoint(const StatePair& psi, const ProblemData& data) {
  auto [Jt, rhs] = assemble_adjoint_system(psi, data);
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(Jt);
  if (lu.info() != Eigen::Success) throw SingularSystem("solve_adjoint: factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SingularSystem("solve_adjoint: solve failed");
  double rnorm = (Jt * x - rhs).norm();
  if (rnorm > 1e-10 * (1.0 + rhs.norm()))
    throw SingularSystem("solve_adjoint: residual too large");
  return adjoint_from_vec(psi.psi1.space, x);
}

std::vector<double> control_update_candidate(const AdjointPair& theta, const ProblemData& data) {
  const auto& space = theta.theta1.sp();
  const auto& omega = space.omega_triangles();
  std::vector<double> c(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    int t = omega[k];
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    double mean = 0.0;
    for (int i = 0; i < 6; ++i) mean += theta.theta1.coeff[sl[i]] * eb.integral[i];
    mean /= eb.area;
    c[k] = -mean / data.alpha;
  }
  return c;
}

OptimalitySolution pdas_solve(SpacePtr space, const ProblemData& data,
                              const SolverConfig& config) {
  if (!(data.alpha > 0.0)) throw std::invalid_argument("pdas_solve: alpha must be positive");
  if (!(data.u_lower <= data.u_upper))
    throw std::invalid_argument("pdas_solve: inconsistent control bounds");
  Workspace ws(space, data);
  const int n = space->dim();
  const std::size_t nu = ws.wmean.size();

  ControlField u0;
  u0.lower = data.u_lower;
  u0.upper = data.u_upper;
  u0.value.assign(nu, clip(0.0, data.u_lower, data.u_upper));

  // x = [psi1; psi2; theta1; theta2] on free DOFs.
  Eigen::VectorXd x(4 * n);
  {
    Eigen::VectorXd xs = biharmonic_state(ws, u0);
    Eigen::VectorXd xa = biharmonic_adjoint(ws, xs);
    x.head(2 * n) = xs;
    x.tail(2 * n) = xa;
  }

  auto tags_from_candidates = [&](const std::vector<double>& cand) {
    std::vector<SetTag> tag(nu, SetTag::inactive);
    for (std::size_t k = 0; k < nu; ++k) {
      if (cand[k] < data.u_lower)
        tag[k] = SetTag::lower;
      else if (cand[k] > data.u_upper)
        tag[k] = SetTag::upper;
    }
    return tag;
  };

  std::vector<SetTag> tag = tags_from_candidates(candidates_from(ws, x.segment(2 * n, n), data.alpha));

  SolverDiagnostics diag;
  bool converged = false;
  for (int step = 0; step < config.pdas_max_iter && !converged; ++step) {
    if (!config.warm_start && step > 0) {
      auto cand = candidates_from(ws, x.segment(2 * n, n), data.alpha);
      ControlField uk{control_values(tag, cand, data), data.u_lower, data.u_upper};
      for (auto& v : uk.value) v = clip(v, data.u_lower, data.u_upper);
      Eigen::VectorXd xs = biharmonic_state(ws, uk);
      Eigen::VectorXd xa = biharmonic_adjoint(ws, xs);
      x.head(2 * n) = xs;
      x.tail(2 * n) = xa;
    }

    // Newton on the coupled reduced optimality system for this active set.
    int newton = 0;
    for (;; ++newton) {
      if (newton >= config.newton_max_iter)
        throw NoConvergence("pdas_solve: Newton did not converge in " +
                            std::to_string(config.newton_max_iter) + " iterations");
      Eigen::VectorXd p1 = x.segment(0, n), p2 = x.segment(n, n);
      Eigen::VectorXd t1 = x.segment(2 * n, n), t2 = x.segment(3 * n, n);
      StatePair psi = state_from_vec(space, x.head(2 * n));
      AdjointPair th = adjoint_from_vec(space, x.tail(2 * n));
      SparseMat P1 = assemble_bracket_in_trial(*space, psi.psi1);
      SparseMat P2 = assemble_bracket_in_trial(*space, psi.psi2);
      SparseMat S1 = assemble_bracket_pair(*space, th.theta1);
      SparseMat S2 = assemble_bracket_pair(*space, th.theta2);
      SparseMat P1t = SparseMat(P1.transpose());
      SparseMat P2t = SparseMat(P2.transpose());

      auto cand = candidates_from(ws, t1, data.alpha);
      std::vector<double> uval = control_values(tag, cand, data);
      Eigen::VectorXd lc = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < nu; ++k)
        for (auto [i, w] : ws.wmean[k]) lc[i] += uval[k] * ws.omega_area[k] * w;

      Eigen::VectorXd r(4 * n);
      r.segment(0, n) = ws.A * p1 + 2.0 * (P1 * p2) - ws.lf - lc;
      r.segment(n, n) = ws.A * p2 - P1 * p1 - ws.lg;
      r.segment(2 * n, n) = ws.A * t1 + 2.0 * (P2t * t1) - 2.0 * (P1t * t2) - (ws.M * p1 - ws.ld1);
      r.segment(3 * n, n) = ws.A * t2 + 2.0 * (P1t * t1) - (ws.M * p2 - ws.ld2);

      Triplets trip;
      auto add_block = [&](const SparseMat& m, int r0, int c0, double s) {
        for (int k = 0; k < m.outerSize(); ++k)
          for (SparseMat::InnerIterator it(m, k); it; ++it)
            trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                              s * it.value());
      };
      add_block(ws.A, 0, 0, 1.0);
      add_block(P2, 0, 0, 2.0);
      add_block(P1, 0, n, 2.0);
      add_block(P1, n, 0, -2.0);
      add_block(ws.A, n, n, 1.0);
      add_block(ws.M, 2 * n, 0, -1.0);
      add_block(S2, 2 * n, 0, -2.0);
      add_block(S1, 2 * n, n, 2.0);
      add_block(ws.A, 2 * n, 2 * n, 1.0);
      add_block(P2t, 2 * n, 2 * n, 2.0);
      add_block(P1t, 2 * n, 3 * n, -2.0);
      add_block(S1, 3 * n, 0, 2.0);
      add_block(ws.M, 3 * n, n, -1.0);
      add_block(P1t, 3 * n, 2 * n, 2.0);
      add_block(ws.A, 3 * n, 3 * n, 1.0);
      // d u_K / d t1 = -(1/alpha) mean-weights on the inactive set.
      for (std::size_t k = 0; k < nu; ++k) {
        if (tag[k] != SetTag::inactive) continue;
        double s = ws.omega_area[k] / data.alpha;
        for (auto [a, wa] : ws.wmean[k])
          for (auto [b, wb] : ws.wmean[k]) trip.emplace_back(a, 2 * n + b, s * wa * wb);
      }
      SparseMat J(4 * n, 4 * n);
      J.setFromTriplets(trip.begin(), trip.end());
      Eigen::VectorXd dx = solve_lu(J, r, "pdas_solve");
      x -= config.newton_damping * dx;
      if (dx.norm() < config.newton_tol) {
        ++newton;
        break;
      }
    }
    diag.newton_iters.push_back(newton);
    ++diag.pdas_steps;

    auto cand = candidates_from(ws, x.segment(2 * n, n), data.alpha);
    std::vector<SetTag> next = tags_from_candidates(cand);
    if (next == tag) converged = true;
    tag = std::move(next);
  }
  if (!converged)
    throw NoConvergence("pdas_solve: active sets did not settle in " +
                        std::to_string(config.pdas_max_iter) + " steps");

  OptimalitySolution sol;
  sol.state = state_from_vec(space, x.head(2 * n));
  sol.adjoint = adjoint_from_vec(space, x.tail(2 * n));
  sol.control.lower = data.u_lower;
  sol.control.upper = data.u_upper;
  auto cand = candidates_from(ws, x.segment(2 * n, n), data.alpha);
  sol.control.value.resize(nu);
  for (std::size_t k = 0; k < nu; ++k) sol.control.value[k] = clip(cand[k], data.u_lower, data.u_upper);

  sol.diag = std::move(diag);
  sol.diag.state_residual = assemble_state_residual(sol.state, sol.control, data).norm();
  auto [Jt, rhs] = assemble_adjoint_system(sol.state, data);
  Eigen::VectorXd tvec(2 * n);
  tvec.head(n) = free_from_field(sol.adjoint.theta1);
  tvec.tail(n) = free_from_field(sol.adjoint.theta2);
  sol.diag.adjoint_residual = (Jt * tvec - rhs).norm();
  sol.diag.cost_value = cost(sol.state, sol.control, data);
  return sol;
}

}  // namespace vkm
