#pragma once

// Environment coupling schedules. P(t) scales the quantum force: P = 1 is the
// quantum limit, P = 0 the classical limit, and lambda(t) = 1 - P(t).

#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

#include "qctrans/error.hpp"

namespace qct {

// P(t) = 1 / (1 + exp(rate * (t - midpoint)))
struct Logistic {
  double rate = 15.0;
  double midpoint = 2.0;
};

// lambda is the normal CDF with the given mean and standard deviation, so P is
// the complementary CDF.
struct GaussianCdf {
  double mean = 0.0;
  double std_dev = 1.0;
};

struct Constant {
  double p = 1.0;
};

using CouplingSchedule = std::variant<Logistic, GaussianCdf, Constant>;

inline void validate(const CouplingSchedule& schedule) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Logistic>) {
          if (!std::isfinite(s.rate) || !std::isfinite(s.midpoint))
            throw InvalidParameter("logistic coupling needs finite rate and midpoint");
        } else if constexpr (std::is_same_v<T, GaussianCdf>) {
          if (!std::isfinite(s.mean)) throw InvalidParameter("gaussian_cdf coupling needs a finite mean");
          if (!(s.std_dev > 0.0) || !std::isfinite(s.std_dev))
            throw InvalidParameter("gaussian_cdf coupling needs sigma > 0");
        } else {
          if (!(s.p >= 0.0 && s.p <= 1.0)) throw InvalidParameter("constant coupling needs 0 <= p <= 1");
        }
      },
      schedule);
}

namespace detail {

// 1 / (1 + e^x) without overflow for large |x|.
inline double logistic_complement(double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace detail

inline double eval_P(const CouplingSchedule& schedule, double t) {
  if (!std::isfinite(t)) throw InvalidParameter("coupling evaluated at non-finite time");
  validate(schedule);
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Logistic>) {
          return detail::logistic_complement(s.rate * (t - s.midpoint));
        } else if constexpr (std::is_same_v<T, GaussianCdf>) {
          return 0.5 * std::erfc((t - s.mean) / (s.std_dev * std::sqrt(2.0)));
        } else {
          return s.p;
        }
      },
      schedule);
}

inline double eval_lambda(const CouplingSchedule& schedule, double t) { return 1.0 - eval_P(schedule, t); }

inline std::string describe(const CouplingSchedule& schedule) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        auto num = [](double v) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%g", v);
          return std::string(buf);
        };
        if constexpr (std::is_same_v<T, Logistic>)
          return "b=" + num(s.rate) + " t0=" + num(s.midpoint);
        else if constexpr (std::is_same_v<T, GaussianCdf>)
          return "mu=" + num(s.mean) + " sigma=" + num(s.std_dev);
        else
          return "P=" + num(s.p);
      },
      schedule);
}

}  // namespace qct
