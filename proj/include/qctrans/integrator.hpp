#pragma once

// Explicit Runge-Kutta integrators with dense output: classic fixed-step RK4
// (cubic Hermite between steps) and Dormand-Prince 5(4) with error control
// (its own fourth-order continuous extension).
//
// The right-hand side may throw FieldError (node guard, singular set). The
// adaptive scheme answers by halving the step, up to 40 consecutive times,
// before stopping with status singular_stop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qctrans/error.hpp"
#include "qctrans/vec.hpp"

namespace qct {

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

inline std::string to_string(IntegratorMethod m) {
  return m == IntegratorMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk45_adaptive;
  double dt = 1e-2;
  double rtol = 1e-7;
  double atol = 1e-9;
  std::int64_t max_steps = 50000;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("integrator dt must be > 0");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidParameter("integrator tolerances must be > 0");
    if (max_steps < 1) throw InvalidParameter("integrator max_steps must be >= 1");
  }
};

enum class TrajectoryStatus { completed, singular_stop, step_limit };

inline std::string to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::singular_stop: return "singular_stop";
    case TrajectoryStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

template <int N>
struct OdeSample {
  double t = 0.0;
  Vec<N> y;
  Vec<N> dy;  // derivative of the interpolant at t
};

template <int N>
struct OdeSolution {
  std::vector<OdeSample<N>> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
  double stop_t = 0.0;  // last reached time
  Vec<N> stop_y;        // state at stop_t
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
};

namespace detail {

inline constexpr int kMaxHalvings = 40;

inline void check_output_grid(std::span<const double> outputs, double t0) {
  if (outputs.empty()) throw InvalidParameter("output grid is empty");
  if (outputs.front() != t0) throw InvalidParameter("output grid must start at the initial time");
  for (std::size_t i = 1; i < outputs.size(); ++i)
    if (!(outputs[i] > outputs[i - 1])) throw InvalidParameter("output grid must be strictly increasing");
}

// Cubic Hermite interpolation on [t0, t0 + h] and its time derivative.
template <int N>
OdeSample<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double h, const Vec<N>& y1, const Vec<N>& f1,
                     double t) {
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1, d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
  OdeSample<N> out;
  out.t = t;
  out.y = h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
  out.dy = d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1;
  return out;
}

inline bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Emit every output time in (t, t + h]; returns the advanced output index.
template <int N, class Interp>
std::size_t emit(std::span<const double> outputs, std::size_t next, double t, double h, const Vec<N>& y1,
                 const Vec<N>& f1, Interp&& interp, std::vector<OdeSample<N>>& out) {
  const double t1 = t + h;
  while (next < outputs.size() && (outputs[next] <= t1 || same_time(outputs[next], t1))) {
    if (same_time(outputs[next], t1))
      out.push_back({outputs[next], y1, f1});
    else
      out.push_back(interp(outputs[next]));
    ++next;
  }
  return next;
}

// Dormand-Prince continuous extension in Hairer's form,
// y(s) = r1 + s (r2 + (1-s) (r3 + s (r4 + (1-s) r5))), s = (t - t0) / h.
template <int N>
struct DopriDense {
  double t0, h;
  Vec<N> r1, r2, r3, r4, r5;

  OdeSample<N> operator()(double t) const {
    const double s = (t - t0) / h, s1 = 1.0 - s;
    const Vec<N> a = r4 + s1 * r5;
    const Vec<N> da = -r5;
    const Vec<N> b = r3 + s * a;
    const Vec<N> db = a + s * da;
    const Vec<N> c = r2 + s1 * b;
    const Vec<N> dc = s1 * db - b;
    OdeSample<N> out;
    out.t = t;
    out.y = r1 + s * c;
    out.dy = (1.0 / h) * (c + s * dc);
    return out;
  }
};

}  // namespace detail

template <int N, class Rhs>
OdeSolution<N> solve_rk4_fixed(Rhs&& f, double t0, const Vec<N>& y0, std::span<const double> outputs,
                               const IntegratorConfig& cfg) {
  cfg.validate();
  detail::check_output_grid(outputs, t0);
  OdeSolution<N> sol;
  sol.stop_t = t0;
  sol.stop_y = y0;
  Vec<N> y = y0, k1;
  try {
    k1 = f(t0, y0);
  } catch (const FieldError&) {
    sol.samples.push_back({t0, y0, Vec<N>{}});
    sol.status = TrajectoryStatus::singular_stop;
    return sol;
  }
  sol.samples.push_back({t0, y0, k1});
  const double t_end = outputs.back();
  std::size_t next = 1;
  double t = t0;
  for (std::int64_t step = 0; next < outputs.size(); ++step) {
    if (sol.accepted_steps >= cfg.max_steps) {
      sol.status = TrajectoryStatus::step_limit;
      return sol;
    }
    double t1 = t0 + static_cast<double>(step + 1) * cfg.dt;
    if (t1 > t_end || detail::same_time(t1, t_end)) t1 = t_end;
    const double h = t1 - t;
    Vec<N> y1, k1_next;
    try {
      const Vec<N> k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
      const Vec<N> k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
      const Vec<N> k4 = f(t + h, y + h * k3);
      y1 = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!all_finite(y1)) throw SingularityError("non-finite state", to_std_vector(y1), t1);
      k1_next = f(t1, y1);
    } catch (const FieldError&) {
      sol.status = TrajectoryStatus::singular_stop;
      return sol;
    }
    next = detail::emit(outputs, next, t, h, y1, k1_next,
                        [&](double tq) { return detail::hermite(t, y, k1, h, y1, k1_next, tq); }, sol.samples);
    t = t1;
    y = y1;
    k1 = k1_next;
    ++sol.accepted_steps;
    sol.stop_t = t;
    sol.stop_y = y;
  }
  return sol;
}

template <int N, class Rhs>
OdeSolution<N> solve_dopri45(Rhs&& f, double t0, const Vec<N>& y0, std::span<const double> outputs,
                             const IntegratorConfig& cfg) {
  cfg.validate();
  detail::check_output_grid(outputs, t0);
  // Dormand-Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                   e7 = -1.0 / 40;

  OdeSolution<N> sol;
  sol.stop_t = t0;
  sol.stop_y = y0;
  Vec<N> y = y0, k1;
  try {
    k1 = f(t0, y0);
  } catch (const FieldError&) {
    sol.samples.push_back({t0, y0, Vec<N>{}});
    sol.status = TrajectoryStatus::singular_stop;
    return sol;
  }
  sol.samples.push_back({t0, y0, k1});
  const double t_end = outputs.back();
  std::size_t next = 1;
  double t = t0;
  double h = std::min(cfg.dt, t_end - t0);
  int halvings = 0;

  while (next < outputs.size()) {
    if (sol.accepted_steps >= cfg.max_steps) {
      sol.status = TrajectoryStatus::step_limit;
      return sol;
    }
    if (t + h > t_end || detail::same_time(t + h, t_end)) h = t_end - t;
    if (!(h > 0.0) || t + h == t) {
      sol.status = TrajectoryStatus::singular_stop;
      return sol;
    }

    Vec<N> y1, k3, k4, k5, k6, k7;
    double err = 0.0;
    try {
      const Vec<N> k2 = f(t + c2 * h, y + h * (a21 * k1));
      k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      if (!all_finite(y1)) throw SingularityError("non-finite state", to_std_vector(y1), t + h);
      k7 = f(t + h, y1);
      const Vec<N> errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      for (int i = 0; i < N; ++i) {
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err = std::max(err, std::abs(errv[i]) / scale);
      }
      if (!std::isfinite(err)) throw SingularityError("non-finite error estimate", to_std_vector(y1), t + h);
    } catch (const FieldError&) {
      if (++halvings > detail::kMaxHalvings) {
        sol.status = TrajectoryStatus::singular_stop;
        return sol;
      }
      h *= 0.5;
      ++sol.rejected_steps;
      continue;
    }
    halvings = 0;

    if (err <= 1.0) {
      const Vec<N> dy = y1 - y;
      const Vec<N> r3 = h * k1 - dy;
      const detail::DopriDense<N> dense{
          t, h, y, dy, r3, dy - h * k7 - r3, h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
      next = detail::emit(outputs, next, t, h, y1, k7, dense, sol.samples);
      t += h;
      y = y1;
      k1 = k7;
      ++sol.accepted_steps;
      sol.stop_t = t;
      sol.stop_y = y;
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      ++sol.rejected_steps;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
  return sol;
}

template <int N, class Rhs>
OdeSolution<N> solve_ode(Rhs&& f, double t0, const Vec<N>& y0, std::span<const double> outputs,
                         const IntegratorConfig& cfg) {
  if (cfg.method == IntegratorMethod::rk4_fixed) return solve_rk4_fixed<N>(f, t0, y0, outputs, cfg);
  return solve_dopri45<N>(f, t0, y0, outputs, cfg);
}

}  // namespace qct
