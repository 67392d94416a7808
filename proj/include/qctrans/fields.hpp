#pragma once

// Numeric derived fields of a complex wavefunction by central differences:
// density, guidance velocity (phase gradient and current/density), quantum
// potential Q = -lap(R) / (2R) and its gradient, and the interpolating force
// -grad(V + P(t) Q).
//
// Step selection: first derivatives use h; second derivatives use 10h so the
// nested gradient of Q stays above rounding noise. Both are capped at 2% of
// the local length |psi| / |grad psi|, which shrinks the stencil near nodes.

#include <algorithm>
#include <cmath>
#include <limits>

#include "qctrans/coupling.hpp"
#include "qctrans/error.hpp"
#include "qctrans/systems.hpp"

namespace qct {

struct StencilConfig {
  double h = 1e-4;
  bool richardson = true;
  double min_rho = 1e-12;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("stencil step h must be > 0");
    if (!(min_rho > 0.0) || !std::isfinite(min_rho)) throw InvalidParameter("node guard min_rho must be > 0");
  }
};

namespace detail {

inline constexpr double kSecondDerivativeScale = 10.0;
inline constexpr double kNodeFraction = 0.02;

template <WaveSystem S>
double local_length(const S& sys, const typename S::Point& x, double t, cplx psi0, double h) {
  double max_grad = 0.0;
  for (int i = 0; i < S::dim; ++i) {
    const auto e = S::Point::unit(i) * h;
    max_grad = std::max(max_grad, std::abs(sys.psi(x + e, t) - sys.psi(x - e, t)) / (2.0 * h));
  }
  if (max_grad == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(psi0) / max_grad;
}

template <WaveSystem S>
cplx guarded_psi(const S& sys, const typename S::Point& x, double t, const StencilConfig& st) {
  st.validate();
  const cplx p = sys.psi(x, t);
  const double rho = std::norm(p);
  if (!(rho >= st.min_rho)) throw NodeProximityError(to_std_vector(x), t, rho);
  return p;
}

struct Steps {
  double first;
  double second;
};

template <WaveSystem S>
Steps choose_steps(const S& sys, const typename S::Point& x, double t, cplx psi0, const StencilConfig& st) {
  const double cap = kNodeFraction * local_length(sys, x, t, psi0, st.h);
  return {std::min(st.h, cap), std::min(kSecondDerivativeScale * st.h, cap)};
}

template <class F>
double richardson(F&& estimate, double h, bool enabled) {
  const double fine = estimate(h);
  if (!enabled) return fine;
  return (4.0 * fine - estimate(2.0 * h)) / 3.0;
}

// Laplacian(R)/R at x with a fixed step.
template <WaveSystem S>
double laplacian_ratio(const S& sys, const typename S::Point& x, double t, double h, bool use_richardson) {
  const double r0 = std::abs(sys.psi(x, t));
  if (r0 == 0.0) throw SingularityError("zero amplitude in quantum potential stencil", to_std_vector(x), t);
  auto lap = [&](double step) {
    double acc = 0.0;
    for (int i = 0; i < S::dim; ++i) {
      const auto e = S::Point::unit(i) * step;
      acc += std::abs(sys.psi(x + e, t)) + std::abs(sys.psi(x - e, t)) - 2.0 * r0;
    }
    return acc / (step * step);
  };
  return richardson(lap, h, use_richardson) / r0;
}

}  // namespace detail

template <WaveSystem S>
double density(const S& sys, const typename S::Point& x, double t) {
  return std::norm(sys.psi(x, t));
}

// Gradient of the locally unwrapped phase (m = 1).
template <WaveSystem S>
typename S::Point velocity_grad_S(const S& sys, const typename S::Point& x, double t, const StencilConfig& st = {}) {
  const cplx p0 = detail::guarded_psi(sys, x, t, st);
  const double h = detail::choose_steps(sys, x, t, p0, st).first;
  typename S::Point u;
  for (int i = 0; i < S::dim; ++i) {
    auto diff = [&](double step) {
      const auto e = S::Point::unit(i) * step;
      return std::arg(sys.psi(x + e, t) * std::conj(sys.psi(x - e, t))) / (2.0 * step);
    };
    u[i] = detail::richardson(diff, h, st.richardson);
  }
  return u;
}

// Current over density, j = Im(psi* grad psi) (hbar = m = 1).
template <WaveSystem S>
typename S::Point velocity_current(const S& sys, const typename S::Point& x, double t, const StencilConfig& st = {}) {
  const cplx p0 = detail::guarded_psi(sys, x, t, st);
  const double h = detail::choose_steps(sys, x, t, p0, st).first;
  const double rho = std::norm(p0);
  typename S::Point u;
  for (int i = 0; i < S::dim; ++i) {
    auto current = [&](double step) {
      const auto e = S::Point::unit(i) * step;
      const cplx dpsi = (sys.psi(x + e, t) - sys.psi(x - e, t)) / (2.0 * step);
      return (std::conj(p0) * dpsi).imag();
    };
    u[i] = detail::richardson(current, h, st.richardson) / rho;
  }
  return u;
}

template <WaveSystem S>
double quantum_potential(const S& sys, const typename S::Point& x, double t, const StencilConfig& st = {}) {
  const cplx p0 = detail::guarded_psi(sys, x, t, st);
  const double h = detail::choose_steps(sys, x, t, p0, st).second;
  return -0.5 * detail::laplacian_ratio(sys, x, t, h, st.richardson);
}

// Nested differences: outer step is twice the inner Laplacian step.
template <WaveSystem S>
typename S::Point quantum_potential_gradient(const S& sys, const typename S::Point& x, double t,
                                             const StencilConfig& st = {}) {
  const cplx p0 = detail::guarded_psi(sys, x, t, st);
  const double inner = detail::choose_steps(sys, x, t, p0, st).second;
  auto q_at = [&](const typename S::Point& y) { return -0.5 * detail::laplacian_ratio(sys, y, t, inner, st.richardson); };
  typename S::Point g;
  for (int i = 0; i < S::dim; ++i) {
    auto diff = [&](double step) {
      const auto e = S::Point::unit(i) * step;
      return (q_at(x + e) - q_at(x - e)) / (2.0 * step);
    };
    g[i] = detail::richardson(diff, 2.0 * inner, st.richardson);
  }
  return g;
}

// Guidance velocity: closed form when the system supplies one.
template <WaveSystem S>
typename S::Point guidance_velocity(const S& sys, const typename S::Point& x, double t, const StencilConfig& st = {}) {
  if constexpr (HasClosedVelocity<S>) {
    if (auto v = sys.closed_velocity(x, t)) return *v;
  }
  return velocity_grad_S(sys, x, t, st);
}

template <WaveSystem S>
double quantum_potential_value(const S& sys, const typename S::Point& x, double t, const StencilConfig& st = {}) {
  if constexpr (HasClosedQuantumPotential<S>) {
    if (auto q = sys.closed_quantum_potential(x, t)) return *q;
  }
  return quantum_potential(sys, x, t, st);
}

template <WaveSystem S>
typename S::Point quantum_force_gradient(const S& sys, const typename S::Point& x, double t,
                                         const StencilConfig& st = {}) {
  if constexpr (HasClosedQuantumPotential<S>) {
    if (auto g = sys.closed_quantum_potential_gradient(x, t)) return *g;
  }
  return quantum_potential_gradient(sys, x, t, st);
}

// Acceleration -grad V - P(t) grad Q (m = 1). The quantum term is skipped
// entirely when P(t) == 0.
template <WaveSystem S>
typename S::Point force(const S& sys, const CouplingSchedule& coupling, const typename S::Point& x, double t,
                        const StencilConfig& st = {}) {
  typename S::Point a = -sys.potential_gradient(x);
  const double p = eval_P(coupling, t);
  if (p != 0.0) a -= p * quantum_force_gradient(sys, x, t, st);
  return a;
}

// Numeric-only force, ignoring any closed forms; used as a cross-check.
template <WaveSystem S>
typename S::Point force_numeric(const S& sys, const CouplingSchedule& coupling, const typename S::Point& x, double t,
                                const StencilConfig& st = {}) {
  typename S::Point a = -sys.potential_gradient(x);
  const double p = eval_P(coupling, t);
  if (p != 0.0) a -= p * quantum_potential_gradient(sys, x, t, st);
  return a;
}

}  // namespace qct
