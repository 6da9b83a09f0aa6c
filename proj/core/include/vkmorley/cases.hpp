#ifndef VKMORLEY_CASES_HPP
#define VKMORLEY_CASES_HPP

#include <string>

#include "vkmorley/forms.hpp"

namespace vkm {

// Manufactured benchmark: exact state, adjoint and control in closed form,
// with the sources and observations derived from the optimality system
//   f = lap^2 psi1 - [psi1,psi2] - u,         g = lap^2 psi2 + 1/2 [psi1,psi1],
//   psi_d1 = psi1 - lap^2 th1 + [psi2,th1] - [psi1,th2],
//   psi_d2 = psi2 - lap^2 th2 + [psi1,th1],
//   u = clip(-(1/alpha) th1).
struct ManufacturedCase {
  std::string name;
  std::function<Triangulation()> initial_mesh;
  ScalarField psi1, psi2, theta1, theta2;  // exact fields
  ScalarFn control;                        // exact control
  ProblemData data;
};

// Smooth benchmark on the unit square:
//   psi1 = psi2 = sin^2(pi x) sin^2(pi y),
//   th1 = th2 = x^2 y^2 (1-x)^2 (1-y)^2,  u = clip(-th1/alpha, [-750,-50]).
ManufacturedCase case_square(double alpha = 1e-5);

// Singular benchmark on the L-shaped domain (-1,1)^2 \ ([0,1)x(-1,0]):
// all four exact fields equal (x^2-1)^2 (y^2-1)^2 r^{1+g} g_{g,w}(th) with the
// clamped-corner exponent g ~ 0.5445 for opening angle 3 pi/2, and
// u = clip(-th1/alpha, [-600,-50]).
ManufacturedCase case_lshape(double alpha = 1e-3);

// Root of sin^2(g w) = g^2 sin^2(w) near 0.5445, polished to machine
// precision for w = 3 pi / 2.
double lshape_singular_exponent();

}  // namespace vkm

#endif
