#pragma once

// Scalar fields (rho, S, Q, V) sampled on rectangular grids. Cells where the
// field is singular or undefined hold NaN.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qctrans/fields.hpp"
#include "qctrans/scenario.hpp"

namespace qct {

struct FieldGrid {
  std::string system;
  std::string quantity;
  std::string a_label;
  std::string b_label;
  std::vector<double> a;  // columns
  std::vector<double> b;  // rows
  std::vector<double> values;  // row-major, values[j * a.size() + i] at (a[i], b[j])
  double t = 0.0;  // unused for 1D systems, where b is time

  double at(std::size_t i, std::size_t j) const { return values[j * a.size() + i]; }
  std::size_t masked_cells() const {
    std::size_t n = 0;
    for (double v : values) n += std::isnan(v) ? 1 : 0;
    return n;
  }
};

namespace detail {

// Endpoint-exact linear spacing: symmetric ranges put an exact 0 at the center.
inline std::vector<double> grid_axis(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double d = n - 1;
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * ((d - i) / d) + hi * (i / d);
  return out;
}

template <WaveSystem S>
double field_value(const S& sys, const std::string& q, const typename S::Point& x, double t, const StencilConfig& st) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    double v = nan;
    if (q == "rho") v = density(sys, x, t);
    else if (q == "S") v = std::arg(sys.psi(x, t));
    else if (q == "Q") v = quantum_potential_value(sys, x, t, st);
    else if (q == "V") v = sys.potential(x);
    else throw InvalidParameter("unknown field quantity " + q);
    return std::isfinite(v) ? v : nan;
  } catch (const FieldError&) {
    return nan;
  }
}

inline int plane_axis(const std::string& plane, int k) {
  return plane[static_cast<std::size_t>(k)] - 'x';
}

}  // namespace detail

template <WaveSystem S>
FieldGrid compute_field(const S& sys, const FieldSpec& spec, const StencilConfig& st = {}) {
  constexpr int D = S::dim;
  if (spec.grid < 2) throw InvalidParameter("field grid needs at least 2 points per axis");
  FieldGrid g;
  g.system = S::name();
  g.quantity = spec.quantity;
  g.t = spec.t;
  g.a = detail::grid_axis(spec.a_lo, spec.a_hi, spec.grid);
  g.b = detail::grid_axis(spec.b_lo, spec.b_hi, spec.grid);
  g.values.resize(g.a.size() * g.b.size());
  if constexpr (D == 1) {
    g.a_label = "x";
    g.b_label = "t";
  } else {
    g.a_label = std::string(1, spec.plane[0]);
    g.b_label = std::string(1, spec.plane[1]);
  }
  for (std::size_t j = 0; j < g.b.size(); ++j) {
    for (std::size_t i = 0; i < g.a.size(); ++i) {
      double t = spec.t;
      Vec<D> x;
      if constexpr (D == 1) {
        x[0] = g.a[i];
        t = g.b[j];
      } else if constexpr (D == 2) {
        x[detail::plane_axis(spec.plane, 0)] = g.a[i];
        x[detail::plane_axis(spec.plane, 1)] = g.b[j];
      } else {
        const int ia = detail::plane_axis(spec.plane, 0);
        const int ib = detail::plane_axis(spec.plane, 1);
        x[ia] = g.a[i];
        x[ib] = g.b[j];
        x[3 - ia - ib] = spec.offset;
      }
      g.values[j * g.a.size() + i] = detail::field_value(sys, spec.quantity, x, t, st);
    }
  }
  return g;
}

inline FieldGrid compute_field(const SystemVariant& sys, const FieldSpec& spec, const StencilConfig& st = {}) {
  return std::visit([&](const auto& s) { return compute_field(s, spec, st); }, sys);
}

}  // namespace qct
