#ifndef VKMORLEY_FORMS_HPP
#define VKMORLEY_FORMS_HPP

#include <Eigen/Sparse>
#include <optional>

#include "vkmorley/morley.hpp"

namespace vkm {

using SparseMat = Eigen::SparseMatrix<double>;

struct StatePair {
  MorleyField psi1, psi2;  // displacement and Airy stress
};

struct AdjointPair {
  MorleyField theta1, theta2;
};

// One value per omega-triangle, box-constrained.
struct ControlField {
  std::vector<double> value;
  double lower = 0.0;
  double upper = 0.0;
};

inline double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Data of one control problem. The second-component source g vanishes for the
// physical model and is nonzero for manufactured solutions.
struct ProblemData {
  ScalarFn f;
  ScalarFn g;
  ScalarFn psi_d1, psi_d2;
  double alpha = 1.0;
  double u_lower = 0.0;
  double u_upper = 0.0;
  std::optional<GradedCorner> corner;  // grading hint for singular data
  int quad_load_degree = 4;
};

// von Karman bracket of two (constant) Hessians:
// [A,B] = Axx Byy + Ayy Bxx - 2 Axy Bxy.
inline double bracket(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
  return A(0, 0) * B(1, 1) + A(1, 1) * B(0, 0) - 2.0 * A(0, 1) * B(0, 1);
}

// Piecewise biharmonic form a_NC over free DOFs: K_ij = sum_T |T| H_i : H_j.
// Symmetric positive definite.
SparseMat assemble_biharmonic(const MorleySpace& space);

// Morley mass matrix over free DOFs (exact quadrature).
SparseMat assemble_mass(const MorleySpace& space);

// P(eta)_{j,i} = b_NC(eta, phi_i, phi_j): the trilinear form with a fixed
// first argument, trial in the second slot and test in the third.
SparseMat assemble_bracket_in_trial(const MorleySpace& space, const MorleyField& eta);

// S(zeta)_{j,i} = b_NC(phi_i, phi_j, zeta): trial and test inside the
// bracket, weighted by the element integrals of zeta. Symmetric.
SparseMat assemble_bracket_pair(const MorleySpace& space, const MorleyField& zeta);

// Load vector (f, phi) over free DOFs, graded near a singular corner.
Eigen::VectorXd assemble_load(const MorleySpace& space, const ScalarFn& f, int quad_degree,
                              const std::optional<GradedCorner>& corner = std::nullopt);

// (C u, phi): exact for the piecewise-constant control.
Eigen::VectorXd assemble_control_load(const MorleySpace& space, const ControlField& u);

// b_NC(eta, chi, .) as a functional over free test DOFs together with the
// per-triangle bracket values [eta, chi]|_T.
struct TrilinearApplied {
  Eigen::VectorXd functional;
  std::vector<double> bracket_per_tri;
  double operator()(const MorleyField& test) const { return functional.dot(free_from_field(test)); }
};
TrilinearApplied apply_trilinear(const MorleyField& eta, const MorleyField& chi);

// Residual of the discrete state system, block layout [psi1-tests; psi2-tests]:
//   A_NC(Psi,Phi) + B_NC(Psi,Psi,Phi) - (f + C u, phi1) - (g, phi2).
Eigen::VectorXd assemble_state_residual(const StatePair& psi, const ControlField& u,
                                        const ProblemData& data);

// Frechet derivative of the state residual at Psi:
//   [[A + 2P(psi2), 2P(psi1)], [-2P(psi1), A]].
SparseMat assemble_state_jacobian(const StatePair& psi);

// Adjoint system: matrix = transpose of the state Jacobian, right-hand side
// (Psi - Psi_d, Phi).
std::pair<SparseMat, Eigen::VectorXd> assemble_adjoint_system(const StatePair& psi,
                                                              const ProblemData& data);

// J(Psi,u) = 1/2 ||| Psi - Psi_d |||^2 + alpha/2 ||u||^2_{L2(omega)}.
double cost(const StatePair& psi, const ControlField& u, const ProblemData& data,
            int quad_degree = 10);

}  // namespace vkm

#endif
