#include "vkmorley/forms.hpp"

#include <stdexcept>

namespace vkm {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void check_same_space(const MorleyField& a, const MorleyField& b) {
  if (a.space != b.space) throw std::invalid_argument("forms: fields on different spaces");
}

SparseMat from_triplets(int rows, int cols, const Triplets& trip) {
  SparseMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

bool touches_corner(const Triangulation& mesh, int t, const std::optional<GradedCorner>& c) {
  if (!c) return false;
  for (int k = 0; k < 3; ++k)
    if (norm(mesh.vertex_of(t, k) - c->corner) < 1e-12) return true;
  return false;
}

}  // namespace

SparseMat assemble_biharmonic(const MorleySpace& space) {
  const auto& dofs = space.dofs();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * 36);
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    for (int i = 0; i < 6; ++i) {
      int fi = dofs.free_index[sl[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        int fj = dofs.free_index[sl[j]];
        if (fj < 0) continue;
        double k = eb.area * eb.hessian[i].cwiseProduct(eb.hessian[j]).sum();
        trip.emplace_back(fi, fj, k);
      }
    }
  }
  return from_triplets(dofs.n_free, dofs.n_free, trip);
}

SparseMat assemble_mass(const MorleySpace& space) {
  const auto& dofs = space.dofs();
  const auto& rule = QuadratureRule::triangle(4);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * 36);
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& q : rule.nodes) {
      Point p = space.mesh().point_in(t, q.l0, q.l1, q.l2);
      double v[6];
      eb.values_at(p, v);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) local(i, j) += q.w * v[i] * v[j];
    }
    local *= eb.area;
    for (int i = 0; i < 6; ++i) {
      int fi = dofs.free_index[sl[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        int fj = dofs.free_index[sl[j]];
        if (fj < 0) continue;
        trip.emplace_back(fi, fj, local(i, j));
      }
    }
  }
  return from_triplets(dofs.n_free, dofs.n_free, trip);
}

SparseMat assemble_bracket_in_trial(const MorleySpace& space, const MorleyField& eta) {
  const auto& dofs = space.dofs();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * 36);
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    Eigen::Matrix2d He = element_hessian(eta, t);
    for (int j = 0; j < 6; ++j) {  // test: weighted by int_T phi_j
      int fj = dofs.free_index[sl[j]];
      if (fj < 0) continue;
      for (int i = 0; i < 6; ++i) {  // trial: inside the bracket
        int fi = dofs.free_index[sl[i]];
        if (fi < 0) continue;
        trip.emplace_back(fj, fi, -0.5 * bracket(He, eb.hessian[i]) * eb.integral[j]);
      }
    }
  }
  return from_triplets(dofs.n_free, dofs.n_free, trip);
}

SparseMat assemble_bracket_pair(const MorleySpace& space, const MorleyField& zeta) {
  const auto& dofs = space.dofs();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * 36);
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    double zint = 0.0;
    for (int i = 0; i < 6; ++i) zint += zeta.coeff[sl[i]] * eb.integral[i];
    for (int j = 0; j < 6; ++j) {
      int fj = dofs.free_index[sl[j]];
      if (fj < 0) continue;
      for (int i = 0; i < 6; ++i) {
        int fi = dofs.free_index[sl[i]];
        if (fi < 0) continue;
        trip.emplace_back(fj, fi, -0.5 * bracket(eb.hessian[i], eb.hessian[j]) * zint);
      }
    }
  }
  return from_triplets(dofs.n_free, dofs.n_free, trip);
}

Eigen::VectorXd assemble_load(const MorleySpace& space, const ScalarFn& f, int quad_degree,
                              const std::optional<GradedCorner>& corner) {
  const auto& dofs = space.dofs();
  const auto& rule = QuadratureRule::triangle(quad_degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.n_free);
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    for (int i = 0; i < 6; ++i) {
      int fi = dofs.free_index[sl[i]];
      if (fi < 0) continue;
      auto integrand = [&](double x, double y) {
        double v[6];
        eb.values_at({x, y}, v);
        return f(x, y) * v[i];
      };
      double val = touches_corner(space.mesh(), t, corner)
                       ? integrate_graded(space.mesh(), t, corner->corner, corner->depth, rule,
                                          integrand)
                       : integrate(space.mesh(), t, rule, integrand);
      load[fi] += val;
    }
  }
  return load;
}

Eigen::VectorXd assemble_control_load(const MorleySpace& space, const ControlField& u) {
  const auto& dofs = space.dofs();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.n_free);
  const auto& omega = space.omega_triangles();
  if (u.value.size() != omega.size())
    throw std::invalid_argument("control load: control size mismatch");
  for (std::size_t k = 0; k < omega.size(); ++k) {
    int t = omega[k];
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    for (int i = 0; i < 6; ++i) {
      int fi = dofs.free_index[sl[i]];
      if (fi >= 0) load[fi] += u.value[k] * eb.integral[i];
    }
  }
  return load;
}

TrilinearApplied apply_trilinear(const MorleyField& eta, const MorleyField& chi) {
  check_same_space(eta, chi);
  const auto& space = eta.sp();
  const auto& dofs = space.dofs();
  TrilinearApplied out;
  out.functional = Eigen::VectorXd::Zero(dofs.n_free);
  out.bracket_per_tri.resize(space.mesh().n_triangles());
  for (int t = 0; t < space.mesh().n_triangles(); ++t) {
    const auto& eb = space.element(t);
    const auto& sl = space.slots(t);
    double br = bracket(element_hessian(eta, t), element_hessian(chi, t));
    out.bracket_per_tri[t] = br;
    for (int j = 0; j < 6; ++j) {
      int fj = dofs.free_index[sl[j]];
      if (fj >= 0) out.functional[fj] += -0.5 * br * eb.integral[j];
    }
  }
  return out;
}

Eigen::VectorXd assemble_state_residual(const StatePair& psi, const ControlField& u,
                                        const ProblemData& data) {
  check_same_space(psi.psi1, psi.psi2);
  const auto& space = psi.psi1.sp();
  const int n = space.dim();
  SparseMat A = assemble_biharmonic(space);
  Eigen::VectorXd p1 = free_from_field(psi.psi1);
  Eigen::VectorXd p2 = free_from_field(psi.psi2);
  TrilinearApplied b12 = apply_trilinear(psi.psi1, psi.psi2);
  TrilinearApplied b11 = apply_trilinear(psi.psi1, psi.psi1);
  Eigen::VectorXd lf = assemble_load(space, data.f, data.quad_load_degree, data.corner);
  Eigen::VectorXd lg = data.g ? assemble_load(space, data.g, data.quad_load_degree, data.corner)
                              : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lc = assemble_control_load(space, u);
  Eigen::VectorXd r(2 * n);
  r.head(n) = A * p1 + 2.0 * b12.functional - lf - lc;
  r.tail(n) = A * p2 - b11.functional - lg;
  return r;
}

SparseMat assemble_state_jacobian(const StatePair& psi) {
  check_same_space(psi.psi1, psi.psi2);
  const auto& space = psi.psi1.sp();
  const int n = space.dim();
  SparseMat A = assemble_biharmonic(space);
  SparseMat P1 = assemble_bracket_in_trial(space, psi.psi1);
  SparseMat P2 = assemble_bracket_in_trial(space, psi.psi2);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()) * 2 + P1.nonZeros() * 3);
  auto add_block = [&](const SparseMat& m, int r0, int c0, double s) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMat::InnerIterator it(m, k); it; ++it)
        trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                          s * it.value());
  };
  add_block(A, 0, 0, 1.0);
  add_block(P2, 0, 0, 2.0);
  add_block(P1, 0, n, 2.0);
  add_block(P1, n, 0, -2.0);
  add_block(A, n, n, 1.0);
  return from_triplets(2 * n, 2 * n, trip);
}

std::pair<SparseMat, Eigen::VectorXd> assemble_adjoint_system(const StatePair& psi,
                                                              const ProblemData& data) {
  const auto& space = psi.psi1.sp();
  const int n = space.dim();
  SparseMat J = assemble_state_jacobian(psi);
  SparseMat Jt = SparseMat(J.transpose());
  SparseMat M = assemble_mass(space);
  Eigen::VectorXd ld1 = assemble_load(space, data.psi_d1, data.quad_load_degree, data.corner);
  Eigen::VectorXd ld2 = assemble_load(space, data.psi_d2, data.quad_load_degree, data.corner);
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = M * free_from_field(psi.psi1) - ld1;
  rhs.tail(n) = M * free_from_field(psi.psi2) - ld2;
  return {std::move(Jt), std::move(rhs)};
}

double cost(const StatePair& psi, const ControlField& u, const ProblemData& data,
            int quad_degree) {
  const auto& space = psi.psi1.sp();
  const auto& mesh = space.mesh();
  const auto& rule = QuadratureRule::triangle(quad_degree);
  double track = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto poly1 = element_poly(psi.psi1, t);
    auto poly2 = element_poly(psi.psi2, t);
    const auto& eb = space.element(t);
    auto integrand = [&](double x, double y) {
      double d1 = eb.eval(poly1, {x, y}) - data.psi_d1(x, y);
      double d2 = eb.eval(poly2, {x, y}) - data.psi_d2(x, y);
      return d1 * d1 + d2 * d2;
    };
    track += touches_corner(mesh, t, data.corner)
                 ? integrate_graded(mesh, t, data.corner->corner, data.corner->depth, rule,
                                    integrand)
                 : integrate(mesh, t, rule, integrand);
  }
  double ctrl = 0.0;
  const auto& omega = space.omega_triangles();
  for (std::size_t k = 0; k < omega.size(); ++k)
    ctrl += u.value[k] * u.value[k] * mesh.area(omega[k]);
  return 0.5 * track + 0.5 * data.alpha * ctrl;
}

}  // namespace vkm
