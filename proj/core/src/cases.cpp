#include "vkmorley/cases.hpp"

#include <cmath>
#include <numbers>

namespace vkm {

namespace {

constexpr double kPi = std::numbers::pi;

// --- square benchmark -------------------------------------------------------

// s(t) = sin^2(pi t) and derivatives.
double s0(double t) { return std::sin(kPi * t) * std::sin(kPi * t); }
double s1(double t) { return kPi * std::sin(2.0 * kPi * t); }
double s2(double t) { return 2.0 * kPi * kPi * std::cos(2.0 * kPi * t); }
double s3(double t) { return -4.0 * kPi * kPi * kPi * std::sin(2.0 * kPi * t); }
double s4(double t) { return -8.0 * kPi * kPi * kPi * kPi * std::cos(2.0 * kPi * t); }

// q(t) = t^2 (1-t)^2 and derivatives.
double q0(double t) { return t * t * (1.0 - t) * (1.0 - t); }
double q1(double t) { return 2.0 * t - 6.0 * t * t + 4.0 * t * t * t; }
double q2(double t) { return 2.0 - 12.0 * t + 12.0 * t * t; }

struct TensorField {
  double (*f0)(double);
  double (*f1)(double);
  double (*f2)(double);
  ScalarField field() const {
    auto a0 = f0, a1 = f1, a2 = f2;
    ScalarField out;
    out.value = [a0](double x, double y) { return a0(x) * a0(y); };
    out.dx = [a0, a1](double x, double y) { return a1(x) * a0(y); };
    out.dy = [a0, a1](double x, double y) { return a0(x) * a1(y); };
    out.dxx = [a0, a2](double x, double y) { return a2(x) * a0(y); };
    out.dxy = [a1](double x, double y) { return a1(x) * a1(y); };
    out.dyy = [a0, a2](double x, double y) { return a0(x) * a2(y); };
    return out;
  }
};

double biharm_sin(double x, double y) {
  return s4(x) * s0(y) + 2.0 * s2(x) * s2(y) + s0(x) * s4(y);
}
double biharm_poly(double x, double y) {
  return 24.0 * q0(y) + 2.0 * q2(x) * q2(y) + 24.0 * q0(x);
}

double bracket_of(const ScalarField& a, const ScalarField& b, double x, double y) {
  return a.dxx(x, y) * b.dyy(x, y) + a.dyy(x, y) * b.dxx(x, y) -
         2.0 * a.dxy(x, y) * b.dxy(x, y);
}

// --- L-shape singular factor -------------------------------------------------

constexpr double kOmega = 1.5 * kPi;

struct AngularFn {
  double gamma, A, B;
  void eval(double th, double& g, double& g1, double& g2, double& g3) const {
    const double gm = gamma - 1.0, gp = gamma + 1.0;
    const double cm = std::cos(gm * th), cp = std::cos(gp * th);
    const double sm = std::sin(gm * th), sp = std::sin(gp * th);
    g = A * (cm - cp) - B * (sm / gm - sp / gp);
    g1 = A * (-gm * sm + gp * sp) - B * (cm - cp);
    g2 = A * (-gm * gm * cm + gp * gp * cp) - B * (-gm * sm + gp * sp);
    g3 = A * (gm * gm * gm * sm - gp * gp * gp * sp) - B * (-gm * gm * cm + gp * gp * cp);
  }
};

AngularFn make_angular(double gamma) {
  const double gm = gamma - 1.0, gp = gamma + 1.0;
  AngularFn a;
  a.gamma = gamma;
  a.A = std::sin(gm * kOmega) / gm - std::sin(gp * kOmega) / gp;
  a.B = std::cos(gm * kOmega) - std::cos(gp * kOmega);
  return a;
}

// r^{1+gamma} g(theta) and its derivatives up to the gradient of the
// Laplacian; the function itself is biharmonic.
struct SingularPart {
  AngularFn ang;
  double k;  // 1 + gamma

  struct Derivs {
    double w, wx, wy, wxx, wxy, wyy;
    double lap, lapx, lapy;
  };

  Derivs eval(double x, double y) const {
    Derivs d{};
    double r2 = x * x + y * y;
    if (r2 == 0.0) return d;  // w and grad w vanish at the corner; rest unused
    double r = std::sqrt(r2);
    double th = std::atan2(y, x);
    if (th < 0.0) th += 2.0 * kPi;
    double c = x / r, s = y / r;
    double g, g1, g2, g3;
    ang.eval(th, g, g1, g2, g3);

    double rk = std::pow(r, k);
    double rk1 = rk / r, rk2 = rk1 / r, rk3 = rk2 / r;
    d.w = rk * g;
    // First derivatives via the polar chain rule.
    double h1 = k * g * c - g1 * s;       // dw/dx = r^{k-1} h1
    double h2 = k * g * s + g1 * c;       // dw/dy = r^{k-1} h2
    d.wx = rk1 * h1;
    d.wy = rk1 * h2;
    double h1p = (k - 1.0) * g1 * c - (k * g + g2) * s;
    double h2p = (k - 1.0) * g1 * s + (k * g + g2) * c;
    d.wxx = rk2 * ((k - 1.0) * h1 * c - h1p * s);
    d.wxy = rk2 * ((k - 1.0) * h1 * s + h1p * c);
    d.wyy = rk2 * ((k - 1.0) * h2 * s + h2p * c);
    double G = g2 + k * k * g;            // lap w = r^{k-2} G
    double G1 = g3 + k * k * g1;
    d.lap = rk2 * G;
    d.lapx = rk3 * ((k - 2.0) * G * c - G1 * s);
    d.lapy = rk3 * ((k - 2.0) * G * s + G1 * c);
    return d;
  }
};

// Cutoff rho(x,y) = (x^2-1)^2 (y^2-1)^2 with derivatives through order four.
struct Cutoff {
  static void eval1d(double t, double d[5]) {
    double u = t * t - 1.0;
    d[0] = u * u;
    d[1] = 4.0 * t * u;
    d[2] = 12.0 * t * t - 4.0;
    d[3] = 24.0 * t;
    d[4] = 24.0;
  }
};

struct LshapeExact {
  SingularPart sing;

  struct Derivs {
    double v, vx, vy, vxx, vxy, vyy;
    double bilap;  // lap^2 of the product
  };

  Derivs eval(double x, double y) const {
    auto w = sing.eval(x, y);
    double px[5], py[5];
    Cutoff::eval1d(x, px);
    Cutoff::eval1d(y, py);
    double rho = px[0] * py[0];
    double rx = px[1] * py[0], ry = px[0] * py[1];
    double rxx = px[2] * py[0], rxy = px[1] * py[1], ryy = px[0] * py[2];
    Derivs d{};
    d.v = rho * w.w;
    d.vx = rx * w.w + rho * w.wx;
    d.vy = ry * w.w + rho * w.wy;
    d.vxx = rxx * w.w + 2.0 * rx * w.wx + rho * w.wxx;
    d.vxy = rxy * w.w + rx * w.wy + ry * w.wx + rho * w.wxy;
    d.vyy = ryy * w.w + 2.0 * ry * w.wy + rho * w.wyy;
    // lap^2(rho w) with lap^2 w = 0:
    //   4 grad rho . grad(lap w) + 2 lap rho lap w + 4 D^2 rho : D^2 w
    //   + 4 grad(lap rho) . grad w + w lap^2 rho.
    double lap_rho = px[2] * py[0] + px[0] * py[2];
    double lap_rho_x = px[3] * py[0] + px[1] * py[2];
    double lap_rho_y = px[2] * py[1] + px[0] * py[3];
    double bilap_rho = px[4] * py[0] + 2.0 * px[2] * py[2] + px[0] * py[4];
    double d2rho_d2w = rxx * w.wxx + 2.0 * rxy * w.wxy + ryy * w.wyy;
    d.bilap = 4.0 * (rx * w.lapx + ry * w.lapy) + 2.0 * lap_rho * w.lap + 4.0 * d2rho_d2w +
              4.0 * (lap_rho_x * w.wx + lap_rho_y * w.wy) + w.w * bilap_rho;
    return d;
  }

  ScalarField field() const {
    auto self = *this;
    ScalarField f;
    f.value = [self](double x, double y) { return self.eval(x, y).v; };
    f.dx = [self](double x, double y) { return self.eval(x, y).vx; };
    f.dy = [self](double x, double y) { return self.eval(x, y).vy; };
    f.dxx = [self](double x, double y) { return self.eval(x, y).vxx; };
    f.dxy = [self](double x, double y) { return self.eval(x, y).vxy; };
    f.dyy = [self](double x, double y) { return self.eval(x, y).vyy; };
    return f;
  }
};

}  // namespace

double lshape_singular_exponent() {
  // Non-characteristic root of sin^2(g w) = g^2 sin^2(w): here sin(g w) = g
  // with g w in (pi/2, pi).
  double g = 0.5444837367;
  for (int i = 0; i < 50; ++i) {
    double f = std::sin(g * kOmega) - g;
    double fp = kOmega * std::cos(g * kOmega) - 1.0;
    double step = f / fp;
    g -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return g;
}

ManufacturedCase case_square(double alpha) {
  ManufacturedCase mc;
  mc.name = "square";
  mc.initial_mesh = [] { return generate_square_mesh(4); };
  TensorField sin_field{s0, s1, s2};
  TensorField poly_field{q0, q1, q2};
  mc.psi1 = sin_field.field();
  mc.psi2 = sin_field.field();
  mc.theta1 = poly_field.field();
  mc.theta2 = poly_field.field();

  const double lo = -750.0, hi = -50.0;
  mc.control = [alpha, lo, hi](double x, double y) {
    return clip(-q0(x) * q0(y) / alpha, lo, hi);
  };

  ScalarField psi = mc.psi1;
  ScalarField th = mc.theta1;
  ScalarFn u = mc.control;
  mc.data.f = [psi, u](double x, double y) {
    return biharm_sin(x, y) - bracket_of(psi, psi, x, y) - u(x, y);
  };
  mc.data.g = [psi](double x, double y) {
    return biharm_sin(x, y) + 0.5 * bracket_of(psi, psi, x, y);
  };
  // psi_d1: the cross brackets cancel because the two state and the two
  // adjoint components coincide.
  mc.data.psi_d1 = [psi](double x, double y) { return psi.value(x, y) - biharm_poly(x, y); };
  mc.data.psi_d2 = [psi, th](double x, double y) {
    return psi.value(x, y) - biharm_poly(x, y) + bracket_of(psi, th, x, y);
  };
  mc.data.alpha = alpha;
  mc.data.u_lower = lo;
  mc.data.u_upper = hi;
  return mc;
}

ManufacturedCase case_lshape(double alpha) {
  ManufacturedCase mc;
  mc.name = "lshape";
  mc.initial_mesh = [] { return generate_lshape_mesh(); };
  const double gamma = lshape_singular_exponent();
  LshapeExact exact{SingularPart{make_angular(gamma), 1.0 + gamma}};
  ScalarField f = exact.field();
  mc.psi1 = f;
  mc.psi2 = f;
  mc.theta1 = f;
  mc.theta2 = f;

  const double lo = -600.0, hi = -50.0;
  mc.control = [exact, alpha, lo, hi](double x, double y) {
    return clip(-exact.eval(x, y).v / alpha, lo, hi);
  };

  ScalarFn u = mc.control;
  mc.data.f = [exact, u](double x, double y) {
    auto d = exact.eval(x, y);
    double br = d.vxx * d.vyy + d.vyy * d.vxx - 2.0 * d.vxy * d.vxy;
    return d.bilap - br - u(x, y);
  };
  mc.data.g = [exact](double x, double y) {
    auto d = exact.eval(x, y);
    double br = d.vxx * d.vyy + d.vyy * d.vxx - 2.0 * d.vxy * d.vxy;
    return d.bilap + 0.5 * br;
  };
  mc.data.psi_d1 = [exact](double x, double y) {
    auto d = exact.eval(x, y);
    return d.v - d.bilap;
  };
  mc.data.psi_d2 = [exact](double x, double y) {
    auto d = exact.eval(x, y);
    double br = d.vxx * d.vyy + d.vyy * d.vxx - 2.0 * d.vxy * d.vxy;
    return d.v - d.bilap + br;
  };
  mc.data.alpha = alpha;
  mc.data.u_lower = lo;
  mc.data.u_upper = hi;
  mc.data.corner = GradedCorner{{0.0, 0.0}, 12};
  return mc;
}

}  // namespace vkm
