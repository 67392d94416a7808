#pragma once

// Ensemble runs: sample initial conditions, integrate every trajectory,
// record conservation diagnostics and distribution distances.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qctrans/dynamics.hpp"
#include "qctrans/quadrature.hpp"
#include "qctrans/sampling.hpp"
#include "qctrans/scenario.hpp"

namespace qct {

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov distance

template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
  if (samples.size() < 2) throw InvalidParameter("KS distance needs at least 2 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic critical value at significance 0.01.
inline double ks_critical_value_01(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// ---------------------------------------------------------------------------
// One-dimensional marginals used for distribution checks

template <int D>
struct MarginalSpec {
  std::string name;
  double (*project)(const Vec<D>&);
};

inline std::vector<MarginalSpec<1>> marginals(const DoubleSlit&) {
  return {{"x", [](const Vec<1>& p) { return p[0]; }}};
}
inline std::vector<MarginalSpec<2>> marginals(const Oscillator2D&) {
  return {{"radius", [](const Vec<2>& p) { return norm(p); }}};
}
inline std::vector<MarginalSpec<3>> marginals(const Hydrogen&) {
  return {{"cyl_radius", [](const Vec<3>& p) { return std::hypot(p[0], p[1]); }},
          {"z", [](const Vec<3>& p) { return p[2]; }}};
}

// The returned CDF keeps its own copy of the system.
inline NumericCdf marginal_cdf(const DoubleSlit& sys, const std::string& name, double t) {
  if (name != "x") throw InvalidParameter("unknown double slit marginal " + name);
  const Box box = default_domain(sys, t);
  return NumericCdf([sys, t](double x) { return density(sys, Vec<1>{x}, t); }, box.lo[0], box.hi[0]);
}

inline NumericCdf marginal_cdf(const Oscillator2D& sys, const std::string& name, double t) {
  if (name != "radius") throw InvalidParameter("unknown oscillator marginal " + name);
  // Periodic trapezoid rule in the angle converges spectrally.
  auto radial = [sys, t](double r) {
    constexpr int kAngles = 64;
    double acc = 0.0;
    for (int k = 0; k < kAngles; ++k) {
      const double th = 2.0 * std::numbers::pi * k / kAngles;
      acc += density(sys, Vec<2>{r * std::cos(th), r * std::sin(th)}, t);
    }
    return r * acc * 2.0 * std::numbers::pi / kAngles;
  };
  return NumericCdf(radial, 0.0, 9.0 / std::sqrt(sys.omega()), 1500);
}

// Eigenstate densities are axially symmetric, so the azimuthal integral is 2 pi.
inline NumericCdf marginal_cdf(const Hydrogen& sys, const std::string& name, double t) {
  const double L = 15.0 * sys.params().n;
  if (name == "cyl_radius") {
    auto f = [sys, t, L](double s) {
      auto g = [&](double z) { return density(sys, Vec<3>{s, 0.0, z}, t); };
      return 2.0 * std::numbers::pi * s * integrate(g, -L, L, 16, 1e-13);
    };
    return NumericCdf(f, 0.0, L, 600, 1e-12);
  }
  if (name == "z") {
    auto f = [sys, t, L](double z) {
      auto g = [&](double s) { return s * density(sys, Vec<3>{s, 0.0, z}, t); };
      return 2.0 * std::numbers::pi * integrate(g, 0.0, L, 16, 1e-13);
    };
    return NumericCdf(f, -L, L, 1200, 1e-12);
  }
  throw InvalidParameter("unknown hydrogen marginal " + name);
}

// ---------------------------------------------------------------------------
// Result types (dimension-erased for serialization)

struct StateRecord {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> v;
  bool operator==(const StateRecord&) const = default;
};

struct TrajectoryRecord {
  std::size_t id = 0;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::vector<StateRecord> samples;
  std::optional<StateRecord> stop;
  bool operator==(const TrajectoryRecord&) const = default;
};

// Per-sample conservation monitors. angular_momentum holds L (2D) or
// (Lx, Ly, Lz) (3D); radius is r (2D) or the cylindrical radius (3D).
struct DiagnosticsRecord {
  std::vector<double> energy;
  std::vector<std::vector<double>> angular_momentum;
  std::vector<double> radius;
  std::vector<double> z;
  double max_energy_drift = 0.0;  // relative to |H(0)|, absolute when H(0) = 0
  double max_angular_momentum_drift = 0.0;
  double max_radius_drift = 0.0;
  double max_z_drift = 0.0;
  bool operator==(const DiagnosticsRecord&) const = default;
};

struct DistributionMetric {
  double t = 0.0;
  std::string marginal;
  std::size_t n = 0;
  double statistic = 0.0;
  double critical_value = 0.0;
  bool operator==(const DistributionMetric&) const = default;
};

struct TruncationReport {
  std::size_t completed = 0;
  std::size_t singular_stop = 0;
  std::size_t step_limit = 0;
  bool operator==(const TruncationReport&) const = default;
};

struct EnsembleResult {
  std::string system;
  int dim = 1;
  std::string mode;
  std::vector<TrajectoryRecord> trajectories;
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<DistributionMetric> distribution_metrics;
  TruncationReport truncation_report;
  bool operator==(const EnsembleResult&) const = default;
};

// ---------------------------------------------------------------------------
// Worker pool

inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QCTRANS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, n); the first exception is rethrown after all workers join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

template <int D>
StateRecord to_record(const TrajectoryState<D>& s) {
  return {s.t, std::vector<double>(s.x.begin(), s.x.end()), std::vector<double>(s.v.begin(), s.v.end())};
}

template <WaveSystem S>
DiagnosticsRecord compute_diagnostics(const S& sys, const Trajectory<S::dim>& traj) {
  constexpr int D = S::dim;
  DiagnosticsRecord d;
  for (const auto& s : traj.samples) {
    double pot = 0.0;
    try {
      pot = sys.potential(s.x);
    } catch (const FieldError&) {
      pot = std::numeric_limits<double>::quiet_NaN();
    }
    d.energy.push_back(0.5 * dot(s.v, s.v) + pot);
    if constexpr (D == 2) {
      d.angular_momentum.push_back({s.x[0] * s.v[1] - s.x[1] * s.v[0]});
      d.radius.push_back(norm(s.x));
    } else if constexpr (D == 3) {
      d.angular_momentum.push_back({s.x[1] * s.v[2] - s.x[2] * s.v[1], s.x[2] * s.v[0] - s.x[0] * s.v[2],
                                    s.x[0] * s.v[1] - s.x[1] * s.v[0]});
      d.radius.push_back(std::hypot(s.x[0], s.x[1]));
      d.z.push_back(s.x[2]);
    }
  }
  if (!d.energy.empty()) {
    const double h0 = d.energy.front();
    const double scale = std::abs(h0) > 0.0 ? std::abs(h0) : 1.0;
    for (double e : d.energy) d.max_energy_drift = std::max(d.max_energy_drift, std::abs(e - h0) / scale);
  }
  for (std::size_t k = 1; k < d.angular_momentum.size(); ++k) {
    double dev = 0.0;
    for (std::size_t c = 0; c < d.angular_momentum[k].size(); ++c)
      dev += std::pow(d.angular_momentum[k][c] - d.angular_momentum[0][c], 2);
    d.max_angular_momentum_drift = std::max(d.max_angular_momentum_drift, std::sqrt(dev));
  }
  for (double r : d.radius) d.max_radius_drift = std::max(d.max_radius_drift, std::abs(r - d.radius.front()));
  for (double z : d.z) d.max_z_drift = std::max(d.max_z_drift, std::abs(z - d.z.front()));
  return d;
}

template <int D>
std::vector<Vec<D>> to_points(const std::vector<std::vector<double>>& raw, const char* path) {
  std::vector<Vec<D>> out;
  for (const auto& p : raw) {
    if (static_cast<int>(p.size()) != D)
      throw ConfigError(path, "entry has dimension " + std::to_string(p.size()) + ", system needs " + std::to_string(D));
    Vec<D> v;
    for (int i = 0; i < D; ++i) v[i] = p[static_cast<std::size_t>(i)];
    out.push_back(v);
  }
  return out;
}

// Initial states for a scenario: explicit positions/velocities when given,
// otherwise sampled from |psi|^2 with phase-gradient velocities.
template <WaveSystem S>
std::vector<TrajectoryState<S::dim>> initial_states(const S& sys, const ScenarioConfig& sc) {
  constexpr int D = S::dim;
  std::vector<Vec<D>> positions = sc.initial_positions.empty() ? sample_positions(sys, sc.ensemble, sc.time.start)
                                                                : to_points<D>(sc.initial_positions, "ensemble.initial_positions");
  std::vector<Vec<D>> velocities;
  if (!sc.initial_velocities.empty()) {
    velocities = to_points<D>(sc.initial_velocities, "ensemble.initial_velocities");
    if (velocities.size() != positions.size())
      throw ConfigError("ensemble.initial_velocities", "count must match initial_positions");
  } else {
    velocities = initial_velocities(sys, positions, sc.ensemble, sc.time.start, sc.numerics);
  }
  std::vector<TrajectoryState<D>> out;
  for (std::size_t i = 0; i < positions.size(); ++i) out.push_back({positions[i], velocities[i], sc.time.start});
  return out;
}

template <WaveSystem S>
EnsembleResult run_ensemble_for(const S& sys, const ScenarioConfig& sc) {
  constexpr int D = S::dim;
  sc.integrator.validate();
  sc.numerics.validate();
  const std::vector<double> grid = uniform_grid(sc.time.start, sc.time.end, sc.time.n_outputs);
  const auto states = initial_states(sys, sc);
  const CouplingSchedule coupling = effective_coupling(sc);

  std::vector<Trajectory<D>> trajs(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    if (sc.mode == RunMode::guidance)
      trajs[i] = integrate_guidance(sys, states[i].x, grid, sc.integrator, sc.numerics);
    else
      trajs[i] = integrate_transition(sys, coupling, states[i], grid, sc.integrator, sc.numerics);
  });

  EnsembleResult res;
  res.system = S::name();
  res.dim = D;
  res.mode = to_string(sc.mode);
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    TrajectoryRecord rec;
    rec.id = i;
    rec.status = trajs[i].status;
    for (const auto& s : trajs[i].samples) rec.samples.push_back(to_record(s));
    if (trajs[i].stop) rec.stop = to_record(*trajs[i].stop);
    res.trajectories.push_back(std::move(rec));
    res.diagnostics.push_back(compute_diagnostics(sys, trajs[i]));
    switch (trajs[i].status) {
      case TrajectoryStatus::completed: ++res.truncation_report.completed; break;
      case TrajectoryStatus::singular_stop: ++res.truncation_report.singular_stop; break;
      case TrajectoryStatus::step_limit: ++res.truncation_report.step_limit; break;
    }
  }

  if (trajs.size() >= 2) {
    std::vector<double> ks_times = sc.output.ks_times.empty() ? std::vector<double>{sc.time.end} : sc.output.ks_times;
    for (double tk : ks_times) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(grid.begin(), grid.end(), tk - 1e-12 * std::max(1.0, std::abs(tk))) - grid.begin());
      if (idx >= grid.size()) continue;
      for (const auto& m : marginals(sys)) {
        std::vector<double> values;
        for (const auto& t : trajs)
          if (idx < t.samples.size()) values.push_back(m.project(t.samples[idx].x));
        if (values.size() < 2) continue;
        const NumericCdf cdf = marginal_cdf(sys, m.name, grid[idx]);
        res.distribution_metrics.push_back(
            {grid[idx], m.name, values.size(), ks_distance(values, cdf), ks_critical_value_01(values.size())});
      }
    }
  }
  return res;
}

inline EnsembleResult run_ensemble(const ScenarioConfig& sc) {
  return std::visit([&](const auto& sys) { return run_ensemble_for(sys, sc); }, sc.system);
}

}  // namespace qct
