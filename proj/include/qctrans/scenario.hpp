#pragma once

// Declarative description of a run: system, coupling, sampler, integrator,
// time grid, stencil and outputs.

#include <optional>
#include <string>
#include <vector>

#include "qctrans/coupling.hpp"
#include "qctrans/fields.hpp"
#include "qctrans/integrator.hpp"
#include "qctrans/sampling.hpp"
#include "qctrans/systems.hpp"

namespace qct {

enum class RunMode { guidance, transition, classical };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::guidance: return "guidance";
    case RunMode::transition: return "transition";
    case RunMode::classical: return "classical";
  }
  return "unknown";
}

struct TimeConfig {
  double start = 0.0;
  double end = 2.0;
  int n_outputs = 201;
};

// A scalar field sampled on a 2D grid. For 1D systems the grid spans (x, t);
// otherwise a plane through the system at fixed time `t` (for 3D systems the
// plane "xy", "xz" or "yz" at `offset` along the remaining axis).
struct FieldSpec {
  std::string quantity = "Q";  // rho, S, Q, V
  double a_lo = -3.0, a_hi = 3.0;
  double b_lo = -3.0, b_hi = 3.0;
  int grid = 101;
  double t = 0.0;
  std::string plane = "xy";
  double offset = 0.0;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "svg"};
  std::optional<std::string> plane;  // projection for trajectory plots of 3D systems
  std::vector<FieldSpec> fields;
  std::vector<double> ks_times;  // defaults to the end time
};

struct ScenarioConfig {
  std::string name = "custom";
  SystemVariant system = DoubleSlit{};
  CouplingSchedule coupling = Constant{1.0};
  RunMode mode = RunMode::transition;
  SamplerConfig ensemble;
  std::vector<std::vector<double>> initial_positions;
  std::vector<std::vector<double>> initial_velocities;
  IntegratorConfig integrator;
  TimeConfig time;
  StencilConfig numerics;
  OutputConfig output;
};

// The coupling actually applied by the second-order integrator.
inline CouplingSchedule effective_coupling(const ScenarioConfig& s) {
  if (s.mode == RunMode::classical) return Constant{0.0};
  if (s.mode == RunMode::guidance) return Constant{1.0};
  return s.coupling;
}

}  // namespace qct
