#pragma once

// Initial conditions distributed as |psi(., t_start)|^2 with velocities from
// the phase gradient.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qctrans/error.hpp"
#include "qctrans/fields.hpp"
#include "qctrans/quadrature.hpp"
#include "qctrans/rng.hpp"
#include "qctrans/systems.hpp"

namespace qct {

enum class SamplerMode { quantile_1d, rejection };

inline std::string to_string(SamplerMode m) { return m == SamplerMode::quantile_1d ? "quantile_1d" : "rejection"; }

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

struct SamplerConfig {
  SamplerMode mode = SamplerMode::rejection;
  std::size_t n = 1;
  std::uint64_t seed = 1;
  std::optional<Box> domain;  // system default when empty
  double envelope_margin = 1.5;
};

inline Box default_domain(const DoubleSlit& s, double t_start) {
  const auto& p = s.params();
  const double base = 4.0 * p.half_separation + 6.0 * p.width;
  const double moving = p.half_separation + std::abs(p.wavenumber) * t_start + 10.0 * s.packet_width(t_start);
  const double half = std::max(base, moving);
  return {{-half}, {half}};
}
inline Box default_domain(const Oscillator2D& s, double) {
  const double half = 6.0 / std::sqrt(s.omega());
  return {{-half, -half}, {half, half}};
}
inline Box default_domain(const Hydrogen& s, double) {
  const double half = 10.0 * s.params().n;
  return {{-half, -half, -half}, {half, half, half}};
}

namespace detail {

template <WaveSystem S>
void check_box(const Box& box) {
  if (box.dim() != S::dim || box.hi.size() != box.lo.size())
    throw ConfigError("ensemble.domain", "domain dimension " + std::to_string(box.dim()) + " does not match system dimension " +
                                             std::to_string(S::dim));
  for (int i = 0; i < box.dim(); ++i)
    if (!(box.hi[static_cast<std::size_t>(i)] > box.lo[static_cast<std::size_t>(i)]))
      throw ConfigError("ensemble.domain", "domain must have positive volume");
}

template <WaveSystem S>
double estimate_max_density(const S& sys, const Box& box, double t) {
  constexpr int per_dim = S::dim == 1 ? 4001 : (S::dim == 2 ? 201 : 61);
  double best = 0.0;
  typename S::Point x;
  std::array<int, S::dim> idx{};
  while (true) {
    for (int i = 0; i < S::dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      x[i] = box.lo[k] + (box.hi[k] - box.lo[k]) * idx[k] / (per_dim - 1);
    }
    best = std::max(best, density(sys, x, t));
    int d = 0;
    while (d < S::dim && ++idx[static_cast<std::size_t>(d)] == per_dim) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == S::dim) break;
  }
  return best;
}

template <WaveSystem S>
typename S::Point propose(const Box& box, Xoshiro256ss& rng) {
  typename S::Point x;
  for (int i = 0; i < S::dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x[i] = box.lo[k] + (box.hi[k] - box.lo[k]) * rng.uniform();
  }
  return x;
}

template <WaveSystem S>
class RejectionSampler {
 public:
  RejectionSampler(const S& sys, Box box, double t, double margin) : sys_(sys), box_(std::move(box)), t_(t) {
    check_box<S>(box_);
    if (!(margin >= 1.0)) throw ConfigError("ensemble.envelope_margin", "envelope margin must be >= 1");
    envelope_ = margin * estimate_max_density(sys_, box_, t_);
    if (!(envelope_ > 0.0)) throw ConfigError("ensemble.domain", "density vanishes on the sampling domain");
  }

  double envelope() const { return envelope_; }

  typename S::Point draw(Xoshiro256ss& rng) const {
    while (true) {
      const auto x = propose<S>(box_, rng);
      const double rho = density(sys_, x, t_);
      if (rho > envelope_)
        throw ConfigError("ensemble.envelope_margin",
                          "density " + std::to_string(rho) + " exceeds envelope " + std::to_string(envelope_) + " at " +
                              FieldError::format_point(to_std_vector(x), t_));
      if (rng.uniform() * envelope_ < rho) return x;
    }
  }

 private:
  const S& sys_;
  Box box_;
  double t_;
  double envelope_ = 0.0;
};

}  // namespace detail

template <WaveSystem S>
std::vector<typename S::Point> sample_positions(const S& sys, const SamplerConfig& cfg, double t_start) {
  if (cfg.n < 1) throw ConfigError("ensemble.n", "ensemble size must be >= 1");
  const Box box = cfg.domain.value_or(default_domain(sys, t_start));
  detail::check_box<S>(box);
  std::vector<typename S::Point> out;
  out.reserve(cfg.n);
  if (cfg.mode == SamplerMode::quantile_1d) {
    if constexpr (S::dim != 1) {
      throw ConfigError("ensemble.mode", "quantile_1d sampling requires a one-dimensional system");
    } else {
      const NumericCdf cdf([&sys, t_start](double x) { return density(sys, Vec<1>{x}, t_start); }, box.lo[0], box.hi[0]);
      for (std::size_t k = 1; k <= cfg.n; ++k)
        out.push_back(Vec<1>{cdf.quantile((static_cast<double>(k) - 0.5) / static_cast<double>(cfg.n))});
    }
    return out;
  }
  const detail::RejectionSampler<S> sampler(sys, box, t_start, cfg.envelope_margin);
  Xoshiro256ss rng(cfg.seed, 0);
  for (std::size_t k = 0; k < cfg.n; ++k) out.push_back(sampler.draw(rng));
  return out;
}

// Phase-gradient velocities at each position. A position hitting the node
// guard is resampled (rejection) or nudged by the stencil step (quantile),
// at most 10 times; `positions` is updated in place.
template <WaveSystem S>
std::vector<typename S::Point> initial_velocities(const S& sys, std::vector<typename S::Point>& positions,
                                                  const SamplerConfig& cfg, double t_start,
                                                  const StencilConfig& stencil = {}) {
  constexpr int kMaxRetries = 10;
  std::vector<typename S::Point> out;
  out.reserve(positions.size());
  std::optional<detail::RejectionSampler<S>> sampler;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (int attempt = 0;; ++attempt) {
      try {
        out.push_back(guidance_velocity(sys, positions[i], t_start, stencil));
        break;
      } catch (const FieldError&) {
        if (attempt >= kMaxRetries) throw;
        if (cfg.mode == SamplerMode::rejection) {
          if (!sampler) sampler.emplace(sys, cfg.domain.value_or(default_domain(sys, t_start)), t_start, cfg.envelope_margin);
          Xoshiro256ss rng(cfg.seed, 1 + i * 16 + static_cast<std::uint64_t>(attempt));
          positions[i] = sampler->draw(rng);
        } else {
          positions[i][0] += stencil.h;
        }
      }
    }
  }
  return out;
}

}  // namespace qct
