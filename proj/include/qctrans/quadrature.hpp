#pragma once

// One-dimensional quadrature and numerically integrated distribution functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qctrans/error.hpp"

namespace qct {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm, double whole, double tol,
                    int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  // Pairwise sums keep the rule bitwise mirror-symmetric.
  const double left = (m - a) / 6.0 * ((fa + fm) + 4.0 * flm);
  const double right = (b - m) / 6.0 * ((fm + fb) + 4.0 * frm);
  const double delta = left + right - whole;
  // The relative floor stops refinement once rounding dominates.
  if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, 1e-15 * std::abs(left + right)))
    return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * ((fa + fb) + 4.0 * fm);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Composite adaptive Simpson over `panels` equal panels; robust for peaked integrands.
template <class F>
double integrate(F&& f, double a, double b, int panels = 64, double tol = 1e-12) {
  double acc = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) acc += adaptive_simpson(f, a + k * w, a + (k + 1) * w, tol / panels);
  return acc;
}

// Normalized CDF of a non-negative density on [lo, hi], tabulated per panel
// from both ends so that each half keeps full relative precision and a
// symmetric density gives exactly 1/2 at the centre. operator() interpolates
// with cubic Hermite (density as slope); exact() integrates the partial panel
// adaptively.
class NumericCdf {
 public:
  NumericCdf(std::function<double(double)> density, double lo, double hi, int panels = 2000, double tol = 1e-13)
      : f_(std::move(density)), lo_(lo), hi_(hi), tol_(tol) {
    if (!(hi > lo) || panels < 1) throw InvalidParameter("CDF interval must have hi > lo");
    nodes_.resize(static_cast<std::size_t>(panels) + 1);
    cum_.assign(nodes_.size(), 0.0);
    tail_.assign(nodes_.size(), 0.0);
    dens_.resize(nodes_.size());
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      nodes_[k] = mid + half * (2.0 * static_cast<double>(k) - panels) / panels;
      dens_[k] = f_(nodes_[k]);
    }
    nodes_.front() = lo;
    nodes_.back() = hi;
    dens_.front() = f_(lo);
    dens_.back() = f_(hi);
    std::vector<double> piece(static_cast<std::size_t>(panels));
    for (std::size_t k = 0; k < piece.size(); ++k) piece[k] = adaptive_simpson(f_, nodes_[k], nodes_[k + 1], tol / panels);
    for (std::size_t k = 1; k < nodes_.size(); ++k) cum_[k] = cum_[k - 1] + piece[k - 1];
    for (std::size_t k = piece.size(); k-- > 0;) tail_[k] = tail_[k + 1] + piece[k];
    split_ = static_cast<std::size_t>(panels) / 2;
    total_ = cum_[split_] + tail_[split_];
    for (std::size_t k = split_ + 1; k < nodes_.size(); ++k) cum_[k] = total_ - tail_[k];
    if (!(total_ > 0.0) || !std::isfinite(total_)) throw InvalidParameter("density integrates to zero on interval");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double total_mass() const { return total_; }
  double density(double x) const { return f_(x) / total_; }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const std::size_t k = panel_of(x);
    const double x0 = nodes_[k], x1 = nodes_[k + 1], h = x1 - x0;
    const double s = (x - x0) / h, s2 = s * s, s3 = s2 * s;
    const double v = (2 * s3 - 3 * s2 + 1) * cum_[k] + (s3 - 2 * s2 + s) * h * dens_[k] + (-2 * s3 + 3 * s2) * cum_[k + 1] +
                     (s3 - s2) * h * dens_[k + 1];
    return std::clamp(v / total_, 0.0, 1.0);
  }

  double exact(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const std::size_t k = panel_of(x);
    const double tol = tol_ / static_cast<double>(nodes_.size());
    if (k < split_ || (k == split_ && x == nodes_[k]))
      return (cum_[k] + adaptive_simpson(f_, nodes_[k], x, tol)) / total_;
    return 1.0 - (tail_[k + 1] + adaptive_simpson(f_, x, nodes_[k + 1], tol)) / total_;
  }

  // Smallest x with exact(x) >= level, by bisection to width `xtol`.
  double quantile(double level, double xtol = 1e-10) const {
    if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("quantile level must lie in (0, 1)");
    // Locate the panel from the table first, then bisect inside it.
    const double target = level * total_;
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
    const std::size_t k = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
    double a = nodes_[k], b = nodes_[std::min(k + 1, nodes_.size() - 1)];
    while (b - a > xtol) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (exact(m) < level)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  }

  // Raw moment E[g(X)] by quadrature over the interval.
  template <class G>
  double moment(G&& g, int panels = 400) const {
    return integrate([&](double x) { return g(x) * f_(x); }, lo_, hi_, panels, 1e-13) / total_;
  }

 private:
  std::size_t panel_of(double x) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, nodes_.size() - 2);
  }

  std::function<double(double)> f_;
  double lo_, hi_, tol_;
  std::vector<double> nodes_, cum_, tail_, dens_;
  std::size_t split_ = 0;
  double total_ = 0.0;
};

}  // namespace qct
