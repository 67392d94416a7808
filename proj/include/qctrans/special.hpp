#pragma once

#include <cmath>
#include <numbers>

#include "qctrans/error.hpp"

namespace qct::special {

// Generalized Laguerre polynomial L_k^alpha(x) by the upward three-term recurrence.
inline double assoc_laguerre(int k, double alpha, double x) {
  if (k < 0) throw InvalidParameter("laguerre degree must be non-negative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Normalized associated Legendre function with the sin^m(theta) factor removed:
//   returns N_lm * P_l^m(x) / (1 - x^2)^{m/2}, N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)
// including the Condon-Shortley phase. The normalization is folded into the
// recurrence so no factorials are formed. Requires 0 <= m <= l.
inline double reduced_sph_legendre(int l, int m, double x) {
  if (m < 0 || m > l) throw InvalidParameter("legendre order must satisfy 0 <= m <= l");
  // Seed: N_mm P_m^m / sin^m = (-1)^m sqrt((2m+1)/(4 pi) / (2m)!) (2m-1)!!
  double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k));
  if (l == m) return pmm;
  double pm1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  if (l == m + 1) return pm1;
  double pm0 = pmm;
  for (int j = m + 2; j <= l; ++j) {
    const double a = std::sqrt((4.0 * j * j - 1.0) / (static_cast<double>(j * j - m * m)));
    const double b = std::sqrt(((j - 1.0) * (j - 1.0) - m * m) / (4.0 * (j - 1.0) * (j - 1.0) - 1.0));
    const double next = a * (x * pm1 - b * pm0);
    pm0 = pm1;
    pm1 = next;
  }
  return pm1;
}

}  // namespace qct::special
