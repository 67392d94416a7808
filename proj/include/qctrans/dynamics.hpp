#pragma once

// Trajectory integration: first-order guidance dx/dt = grad S and the
// second-order interpolating dynamics dx/dt = v, dv/dt = -grad(V + P(t) Q).

#include <optional>
#include <span>
#include <vector>

#include "qctrans/coupling.hpp"
#include "qctrans/fields.hpp"
#include "qctrans/integrator.hpp"
#include "qctrans/systems.hpp"

namespace qct {

template <int D>
struct TrajectoryState {
  Vec<D> x;
  Vec<D> v;
  double t = 0.0;
};

template <int D>
struct Trajectory {
  std::vector<TrajectoryState<D>> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::optional<TrajectoryState<D>> stop;  // set unless completed
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
};

// Uniform output grid of n points on [start, end].
inline std::vector<double> uniform_grid(double start, double end, int n) {
  if (n < 2 || !(end > start)) throw InvalidParameter("time grid needs end > start and at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = start + (end - start) * i / (n - 1);
  g.back() = end;
  return g;
}

template <WaveSystem S>
Trajectory<S::dim> integrate_guidance(const S& sys, const Vec<S::dim>& x0, std::span<const double> t_grid,
                                      const IntegratorConfig& cfg, const StencilConfig& stencil = {}) {
  constexpr int D = S::dim;
  if (t_grid.empty()) throw InvalidParameter("empty time grid");
  auto rhs = [&](double t, const Vec<D>& x) { return guidance_velocity(sys, x, t, stencil); };
  const OdeSolution<D> sol = solve_ode<D>(rhs, t_grid.front(), x0, t_grid, cfg);

  Trajectory<D> out;
  out.status = sol.status;
  out.accepted_steps = sol.accepted_steps;
  out.rejected_steps = sol.rejected_steps;
  out.samples.reserve(sol.samples.size());
  for (const auto& s : sol.samples) {
    Vec<D> v = s.dy;
    try {
      v = guidance_velocity(sys, s.y, s.t, stencil);
    } catch (const FieldError&) {
    }
    out.samples.push_back({s.y, v, s.t});
  }
  if (sol.status != TrajectoryStatus::completed) {
    Vec<D> v{};
    try {
      v = guidance_velocity(sys, sol.stop_y, sol.stop_t, stencil);
    } catch (const FieldError&) {
    }
    out.stop = TrajectoryState<D>{sol.stop_y, v, sol.stop_t};
  }
  return out;
}

template <WaveSystem S>
Trajectory<S::dim> integrate_transition(const S& sys, const CouplingSchedule& coupling,
                                        const TrajectoryState<S::dim>& state0, std::span<const double> t_grid,
                                        const IntegratorConfig& cfg, const StencilConfig& stencil = {}) {
  constexpr int D = S::dim;
  if (t_grid.empty()) throw InvalidParameter("empty time grid");
  if (t_grid.front() != state0.t) throw InvalidParameter("time grid must start at the initial state's time");
  validate(coupling);
  auto rhs = [&](double t, const Vec<2 * D>& y) {
    const Vec<D> x = slice<0, D>(y);
    const Vec<D> v = slice<D, D>(y);
    return concat(v, force(sys, coupling, x, t, stencil));
  };
  const OdeSolution<2 * D> sol = solve_ode<2 * D>(rhs, state0.t, concat(state0.x, state0.v), t_grid, cfg);

  Trajectory<D> out;
  out.status = sol.status;
  out.accepted_steps = sol.accepted_steps;
  out.rejected_steps = sol.rejected_steps;
  out.samples.reserve(sol.samples.size());
  for (const auto& s : sol.samples) out.samples.push_back({slice<0, D>(s.y), slice<D, D>(s.y), s.t});
  if (sol.status != TrajectoryStatus::completed)
    out.stop = TrajectoryState<D>{slice<0, D>(sol.stop_y), slice<D, D>(sol.stop_y), sol.stop_t};
  return out;
}

}  // namespace qct
