#pragma once

// Analytic wavefields for the three model systems. Units: m = hbar = 1 and,
// for the hydrogen-like atom, e^2 Z / (4 pi eps0) = 1.
//
// Every system exposes psi(x, t), the classical potential V(x) and its
// gradient. Closed-form derived fields are optional: a system advertises them
// through closed_velocity / closed_quantum_potential /
// closed_quantum_potential_gradient returning std::optional, and may decline
// at runtime by returning std::nullopt.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "qctrans/error.hpp"
#include "qctrans/special.hpp"
#include "qctrans/vec.hpp"

namespace qct {

using cplx = std::complex<double>;

template <class S>
concept WaveSystem = requires(const S& s, const typename S::Point& x, double t) {
  { S::dim } -> std::convertible_to<int>;
  { s.psi(x, t) } -> std::same_as<cplx>;
  { s.potential(x) } -> std::convertible_to<double>;
  { s.potential_gradient(x) } -> std::same_as<typename S::Point>;
};

template <class S>
concept HasClosedVelocity = WaveSystem<S> && requires(const S& s, const typename S::Point& x, double t) {
  { s.closed_velocity(x, t) } -> std::same_as<std::optional<typename S::Point>>;
};

template <class S>
concept HasClosedQuantumPotential = WaveSystem<S> && requires(const S& s, const typename S::Point& x, double t) {
  { s.closed_quantum_potential(x, t) } -> std::same_as<std::optional<double>>;
  { s.closed_quantum_potential_gradient(x, t) } -> std::same_as<std::optional<typename S::Point>>;
};

// ---------------------------------------------------------------------------
// Double slit: two dispersing Gaussian packets of initial width rho0 emerging
// from slits at +-X with opposite group velocities.

struct DoubleSlitParams {
  double width = 5.0 / 8.0;     // rho0
  double wavenumber = -2.0;     // u
  double half_separation = 2.5; // X
};

class DoubleSlit {
 public:
  static constexpr int dim = 1;
  using Point = Vec<1>;
  using Params = DoubleSlitParams;

  explicit DoubleSlit(DoubleSlitParams p = {}) : p_(p) {
    if (!(p.width > 0.0) || !std::isfinite(p.width)) throw InvalidParameter("double slit width must be > 0");
    if (!(p.half_separation > 0.0) || !std::isfinite(p.half_separation))
      throw InvalidParameter("double slit half separation must be > 0");
    if (!std::isfinite(p.wavenumber)) throw InvalidParameter("double slit wavenumber must be finite");
  }

  const DoubleSlitParams& params() const { return p_; }
  static std::string name() { return "double_slit"; }

  cplx psi(const Point& x, double t) const {
    check_time(t);
    const Terms k = terms(x[0], t);
    return k.norm * (std::exp(k.phi1) + std::exp(k.phi2));
  }

  double potential(const Point&) const { return 0.0; }
  Point potential_gradient(const Point&) const { return Point{0.0}; }

  // Exact derivatives of psi give the guidance velocity and quantum potential
  // without finite differences. Both exponentials are rescaled by the larger
  // real part so ratios stay finite far out in the tails.
  std::optional<Point> closed_velocity(const Point& x, double t) const {
    const Derivs d = derivs(x[0], t);
    return Point{(d.d1 / d.d0).imag()};
  }

  std::optional<double> closed_quantum_potential(const Point& x, double t) const {
    const Derivs d = derivs(x[0], t);
    const cplx g1 = d.d1 / d.d0;
    const cplx g2 = d.d2 / d.d0;
    return -0.5 * (g2.real() + g1.imag() * g1.imag());
  }

  std::optional<Point> closed_quantum_potential_gradient(const Point& x, double t) const {
    const Derivs d = derivs(x[0], t);
    const cplx g1 = d.d1 / d.d0;
    const cplx g2 = d.d2 / d.d0;
    const cplx g3 = d.d3 / d.d0;
    // d/dx (psi''/psi) = g3 - g2 g1,  d/dx (psi'/psi) = g2 - g1^2
    const double d_re = (g3 - g2 * g1).real();
    const double d_im = (g2 - g1 * g1).imag();
    return Point{-0.5 * d_re - g1.imag() * d_im};
  }

  // Closed-form density (cross-check only).
  double closed_density(double x, double t) const {
    check_time(t);
    const double r = p_.width, u = p_.wavenumber, X = p_.half_separation;
    const double r2 = r * r, D = t * t + r2 * r2;
    const double a = u * t + x - X, b = -u * t + x + X;
    const double base = x * x + (X - u * t) * (X - u * t);
    const double bracket = std::exp((a * a - 2.0 * base) * r2 / D) + std::exp((b * b - 2.0 * base) * r2 / D) +
                           2.0 * std::exp(-base * r2 / D) * std::cos(2.0 * x * (X * t + u * r2 * r2) / D);
    return bracket / std::sqrt(D / r2);
  }

  // Closed-form phase (cross-check only), evaluated with atan2.
  double closed_phase(double x, double t) const {
    check_time(t);
    const double r = p_.width, u = p_.wavenumber, X = p_.half_separation;
    const double r2 = r * r, D = r2 * r2 + t * t;
    const double a = u * t + x - X, b = -u * t + x + X;
    const double T1 = t * b * b / (2.0 * D) - 0.5 * std::atan(t / r2) + u * (-u * t / 2.0 + x + X);
    const double T2 = -t * a * a / (2.0 * D) + 0.5 * std::atan(t / r2) + u * (u * t / 2.0 + x - X);
    // Common factor exp(-(a^2+b^2) r^2 / (2D)) keeps both weights <= 1.
    const double shift = std::max(a * a, b * b) * r2 / (2.0 * D);
    const double e1 = std::exp(r2 * a * a / (2.0 * D) - shift);
    const double e2 = std::exp(r2 * b * b / (2.0 * D) - shift);
    return std::atan2(e1 * std::sin(T1) - e2 * std::sin(T2), e1 * std::cos(T1) + e2 * std::cos(T2));
  }

  // Width of a single dispersing packet at time t.
  double packet_width(double t) const {
    const double r2 = p_.width * p_.width;
    return p_.width * std::sqrt(1.0 + t * t / (r2 * r2));
  }

 private:
  struct Terms {
    cplx phi1, phi2, dphi1, dphi2, ddphi, norm;
  };
  struct Derivs {
    cplx d0, d1, d2, d3;
  };

  static void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("double slit wavefunction requires t >= 0");
  }

  Terms terms(double x, double t) const {
    const double r = p_.width, u = p_.wavenumber, X = p_.half_separation;
    const cplx I(0.0, 1.0);
    const cplx w(r * r, t);  // rho0^2 (1 + i t / rho0^2)
    const double a = u * t + x - X, b = -u * t + x + X;
    Terms k;
    k.phi1 = -a * a / (2.0 * w) - I * u * (u * t / 2.0 + x - X);
    k.phi2 = -b * b / (2.0 * w) + I * u * (-u * t / 2.0 + x + X);
    k.dphi1 = -a / w - I * u;
    k.dphi2 = -b / w + I * u;
    k.ddphi = -1.0 / w;
    k.norm = 1.0 / std::sqrt(cplx(r, t / r));
    return k;
  }

  Derivs derivs(double x, double t) const {
    check_time(t);
    const Terms k = terms(x, t);
    const double shift = std::max(k.phi1.real(), k.phi2.real());
    const cplx e1 = std::exp(k.phi1 - shift), e2 = std::exp(k.phi2 - shift);
    Derivs d;
    d.d0 = e1 + e2;
    if (std::abs(d.d0) == 0.0) throw SingularityError("double slit nodal point", {x}, t);
    d.d1 = k.dphi1 * e1 + k.dphi2 * e2;
    d.d2 = (k.ddphi + k.dphi1 * k.dphi1) * e1 + (k.ddphi + k.dphi2 * k.dphi2) * e2;
    d.d3 = (3.0 * k.dphi1 * k.ddphi + k.dphi1 * k.dphi1 * k.dphi1) * e1 +
           (3.0 * k.dphi2 * k.ddphi + k.dphi2 * k.dphi2 * k.dphi2) * e2;
    return d;
  }

  DoubleSlitParams p_;
};

// ---------------------------------------------------------------------------
// Isotropic 2D oscillator in the degenerate entangled state
//   psi = (omega / sqrt(pi)) (x + e^{i alpha} y) exp(-omega r^2 / 2 - 2 i omega t)
// i.e. the normalized superposition of the two first excited states with a
// relative phase shift alpha.

struct Oscillator2DParams {
  double spring = 1.0;                     // k0
  double phase = std::numbers::pi / 2.0;   // alpha
};

class Oscillator2D {
 public:
  static constexpr int dim = 2;
  using Point = Vec<2>;
  using Params = Oscillator2DParams;

  explicit Oscillator2D(Oscillator2DParams p = {}) : p_(p) {
    if (!(p.spring > 0.0) || !std::isfinite(p.spring)) throw InvalidParameter("oscillator spring constant must be > 0");
    if (!std::isfinite(p.phase)) throw InvalidParameter("oscillator phase must be finite");
    omega_ = std::sqrt(p.spring);
  }

  const Oscillator2DParams& params() const { return p_; }
  double omega() const { return omega_; }
  static std::string name() { return "oscillator_2d"; }

  cplx psi(const Point& q, double t) const {
    const double x = q[0], y = q[1];
    const cplx amp = cplx(x, 0.0) + std::polar(1.0, p_.phase) * y;
    const double r2 = x * x + y * y;
    return omega_ / std::sqrt(std::numbers::pi) * amp * std::exp(-0.5 * omega_ * r2) *
           std::polar(1.0, -2.0 * omega_ * t);
  }

  double potential(const Point& q) const { return 0.5 * p_.spring * (q[0] * q[0] + q[1] * q[1]); }
  Point potential_gradient(const Point& q) const { return p_.spring * q; }

  // Node polynomial x^2 + 2 x y cos(alpha) + y^2.
  double node_polynomial(const Point& q) const {
    const double x = q[0], y = q[1];
    return x * x + 2.0 * x * y * std::cos(p_.phase) + y * y;
  }

  double closed_density(const Point& q) const {
    const double r2 = q[0] * q[0] + q[1] * q[1];
    return std::exp(-omega_ * r2) * omega_ * omega_ * node_polynomial(q) / std::numbers::pi;
  }

  double closed_phase(const Point& q, double t) const {
    const double x = q[0], y = q[1], w = 2.0 * omega_ * t;
    return -std::atan2(x * std::sin(w) + y * std::sin(w - p_.phase), x * std::cos(w) + y * std::cos(w - p_.phase));
  }

  std::optional<Point> closed_velocity(const Point& q, double t) const {
    const double g = guarded_node_polynomial(q, t);
    const double s = std::sin(p_.phase);
    return Point{-q[1] * s / g, q[0] * s / g};
  }

  std::optional<double> closed_quantum_potential(const Point& q, double t) const {
    const double g = guarded_node_polynomial(q, t);
    const double x = q[0], y = q[1], w = omega_, c = std::cos(p_.phase);
    const double r2 = x * x + y * y;
    const double T1 = w * w * r2 * r2 - 4.0 * w * r2 + 1.0;
    const double T2 = w * r2 - 4.0;
    const double T3 = x * x * (-4.0 * w * w * y * y * r2 + 16.0 * w * y * y + 1.0) + y * y;
    return (-T1 * r2 - 4.0 * T2 * x * w * y * c * r2 + T3 * c * c) / (2.0 * g * g);
  }

  // Gradient of Q from the log-amplitude L = ln R:
  //   Q = -(lap L + |grad L|^2) / 2,  grad Q = -(grad lap L + 2 Hess(L) grad L) / 2
  std::optional<Point> closed_quantum_potential_gradient(const Point& q, double t) const {
    const double g = guarded_node_polynomial(q, t);
    const double x = q[0], y = q[1], w = omega_, c = std::cos(p_.phase);
    const Point dg{2.0 * x + 2.0 * c * y, 2.0 * y + 2.0 * c * x};
    const double dg2 = dot(dg, dg);
    const Point gradL = -w * q + dg / (2.0 * g);
    const auto hg = [c](const Point& v) { return Point{2.0 * v[0] + 2.0 * c * v[1], 2.0 * c * v[0] + 2.0 * v[1]}; };
    const auto hessL = [&](const Point& v) { return -w * v + hg(v) / (2.0 * g) - dg * (dot(dg, v) / (2.0 * g * g)); };
    const Point grad_lapL = -2.0 * dg / (g * g) - hg(dg) / (g * g) + dg * (dg2 / (g * g * g));
    return -0.5 * (grad_lapL + 2.0 * hessL(gradL));
  }

 private:
  double guarded_node_polynomial(const Point& q, double t) const {
    const double g = node_polynomial(q);
    if (!(g > 0.0)) throw SingularityError("oscillator nodal point", to_std_vector(q), t);
    return g;
  }

  Oscillator2DParams p_;
  double omega_ = 1.0;
};

// ---------------------------------------------------------------------------
// Hydrogen-like atom eigenstate (n, l, m) in atomic units. Radial variable
// 2r/n, Condon-Shortley phase, time factor exp(-i E_n t) with E_n = -1/(2 n^2).

struct HydrogenParams {
  int n = 2;
  int l = 1;
  int m = 1;
};

class Hydrogen {
 public:
  static constexpr int dim = 3;
  using Point = Vec<3>;
  using Params = HydrogenParams;

  explicit Hydrogen(HydrogenParams p = {}) : p_(p) {
    if (p.n < 1) throw InvalidParameter("hydrogen n must be >= 1");
    if (p.l < 0 || p.l >= p.n) throw InvalidParameter("hydrogen l must satisfy 0 <= l < n");
    if (std::abs(p.m) > p.l) throw InvalidParameter("hydrogen m must satisfy |m| <= l");
    // 2/n^2 sqrt((n-l-1)! / (n+l)!)
    double ratio = 1.0;
    for (int k = p.n - p.l; k <= p.n + p.l; ++k) ratio /= k;
    radial_norm_ = 2.0 / (p.n * p.n) * std::sqrt(ratio);
  }

  const HydrogenParams& params() const { return p_; }
  static std::string name() { return "hydrogen"; }
  double energy() const { return -0.5 / (p_.n * p_.n); }
  bool is_211_family() const { return p_.n == 2 && p_.l == 1 && std::abs(p_.m) == 1; }

  cplx psi(const Point& q, double t) const {
    const double r = norm(q);
    const cplx time_factor = std::polar(1.0, -energy() * t);
    const int am = std::abs(p_.m);
    if (r == 0.0) {
      if (p_.l != 0) return 0.0;
      return radial_norm_ * special::assoc_laguerre(p_.n - 1, 1.0, 0.0) * special::reduced_sph_legendre(0, 0, 1.0) *
             time_factor;
    }
    const double rho = 2.0 * r / p_.n;
    const double radial = radial_norm_ * std::pow(rho, p_.l) * std::exp(-0.5 * rho) *
                          special::assoc_laguerre(p_.n - p_.l - 1, 2.0 * p_.l + 1.0, rho);
    const double legendre = special::reduced_sph_legendre(p_.l, am, q[2] / r);
    // sin^m(theta) e^{i m phi} = ((x + i y) / r)^m
    cplx azimuthal = 1.0;
    const cplx unit(q[0] / r, q[1] / r);
    for (int k = 0; k < am; ++k) azimuthal *= unit;
    if (p_.m < 0) azimuthal = (am % 2 ? -1.0 : 1.0) * std::conj(azimuthal);
    return radial * legendre * azimuthal * time_factor;
  }

  double potential(const Point& q) const {
    const double r = norm(q);
    if (r == 0.0) throw SingularityError("Coulomb singularity", to_std_vector(q), 0.0);
    return -1.0 / r;
  }

  Point potential_gradient(const Point& q) const {
    const double r = norm(q);
    if (r == 0.0) throw SingularityError("Coulomb singularity", to_std_vector(q), 0.0);
    return q / (r * r * r);
  }

  // Phase is m*phi - E t, so the flow circles the z-axis with speed |m| / s.
  std::optional<Point> closed_velocity(const Point& q, double t) const {
    if (p_.m == 0) return Point{0.0, 0.0, 0.0};
    const double s2 = axis_distance_sq(q, t);
    return Point{-p_.m * q[1] / s2, p_.m * q[0] / s2, 0.0};
  }

  std::optional<double> closed_quantum_potential(const Point& q, double t) const {
    if (!is_211_family()) return std::nullopt;
    const double s2 = axis_distance_sq(q, t);
    const double r = norm(q);
    const double f = 1.0 - 8.0 / r;
    return -(q[0] * q[0] * f + q[1] * q[1] * f + 4.0) / (8.0 * s2);
  }

  // Q = 1/r - 1/8 - 1/(2 s^2) for the (2,1,+-1) states.
  std::optional<Point> closed_quantum_potential_gradient(const Point& q, double t) const {
    if (!is_211_family()) return std::nullopt;
    const double s2 = axis_distance_sq(q, t);
    const double r = norm(q);
    const double r3 = r * r * r, s4 = s2 * s2;
    return Point{q[0] / s4 - q[0] / r3, q[1] / s4 - q[1] / r3, -q[2] / r3};
  }

  // Cartesian phase for (2,1,1); differs from arg(psi) by the constant pi.
  double closed_phase(const Point& q, double t) const {
    const double c = std::cos(t / 8.0), s = std::sin(t / 8.0);
    return std::atan2(q[0] * s + q[1] * c, q[0] * c - q[1] * s);
  }

 private:
  double axis_distance_sq(const Point& q, double t) const {
    const double s2 = q[0] * q[0] + q[1] * q[1];
    if (!(s2 > 0.0)) throw SingularityError("on the z-axis", to_std_vector(q), t);
    return s2;
  }

  HydrogenParams p_;
  double radial_norm_ = 1.0;
};

using SystemVariant = std::variant<DoubleSlit, Oscillator2D, Hydrogen>;

inline int dimension(const SystemVariant& s) {
  return std::visit([](const auto& sys) { return std::decay_t<decltype(sys)>::dim; }, s);
}

}  // namespace qct
