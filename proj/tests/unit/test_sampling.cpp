#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "qctrans/ensemble.hpp"
#include "qctrans/sampling.hpp"

using namespace qct;

namespace {

// Flat background with a narrow spike that falls between the envelope grid points.
struct SpikeSystem {
  static constexpr int dim = 1;
  using Point = Vec<1>;
  static std::string name() { return "spike"; }
  std::complex<double> psi(const Point& x, double) const {
    const double d = (x[0] - 0.00025) / 5e-5;
    return 0.1 + 10.0 * std::exp(-d * d);
  }
  double potential(const Point&) const { return 0.0; }
  Point potential_gradient(const Point&) const { return Point{0.0}; }
};

Box default_domain(const SpikeSystem&, double) { return {{-1.0}, {1.0}}; }

SamplerConfig quantile(std::size_t n) {
  SamplerConfig cfg;
  cfg.mode = SamplerMode::quantile_1d;
  cfg.n = n;
  return cfg;
}

}  // namespace

TEST(Sampling, QuantileMiddleSampleAtOrigin) {
  const auto xs = sample_positions(DoubleSlit{}, quantile(51), 0.0);
  ASSERT_EQ(xs.size(), 51u);
  EXPECT_NEAR(xs[25][0], 0.0, 1e-9);
}

TEST(Sampling, QuantileSplitsEvenly) {
  const auto xs = sample_positions(DoubleSlit{}, quantile(50), 0.0);
  ASSERT_EQ(xs.size(), 50u);
  EXPECT_EQ(std::count_if(xs.begin(), xs.end(), [](const Vec<1>& x) { return x[0] < 0.0; }), 25);
  for (std::size_t k = 0; k < 25; ++k) EXPECT_NEAR(xs[k][0], -xs[49 - k][0], 1e-9);
  for (std::size_t k = 1; k < xs.size(); ++k) EXPECT_GT(xs[k][0], xs[k - 1][0]);
}

TEST(Sampling, QuantileCoverage) {
  const DoubleSlit ds;
  for (std::size_t n : {7u, 50u, 400u}) {
    const auto xs = sample_positions(ds, quantile(n), 0.0);
    const NumericCdf cdf = marginal_cdf(ds, "x", 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double level = (k + 0.5) / static_cast<double>(n);
      EXPECT_NEAR(cdf.exact(xs[k][0]), level, 1e-9);
    }
    std::vector<double> v;
    for (const auto& x : xs) v.push_back(x[0]);
    EXPECT_LT(ks_distance(v, [&](double x) { return cdf.exact(x); }), 0.5 / static_cast<double>(n) + 1e-9);
  }
}

TEST(Sampling, QuantileRequiresOneDimension) {
  EXPECT_THROW(sample_positions(Oscillator2D{}, quantile(5), 0.0), ConfigError);
}

TEST(Sampling, RejectionIsDeterministic) {
  SamplerConfig cfg;
  cfg.n = 200;
  cfg.seed = 42;
  const auto a = sample_positions(Oscillator2D{}, cfg, 0.0);
  const auto b = sample_positions(Oscillator2D{}, cfg, 0.0);
  ASSERT_EQ(a.size(), 200u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
  cfg.seed = 43;
  const auto c = sample_positions(Oscillator2D{}, cfg, 0.0);
  EXPECT_FALSE(a[0] == c[0]);
}

TEST(Sampling, RejectionMeanRadiusMatchesQuadrature) {
  const Oscillator2D osc;
  SamplerConfig cfg;
  cfg.n = 100000;
  cfg.seed = 2024;
  const auto xs = sample_positions(osc, cfg, 0.0);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& x : xs) {
    sum += norm(x);
    sum2 += norm(x) * norm(x);
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  // Radial density 2 r^3 e^{-r^2}: E[r] = 3 sqrt(pi) / 4.
  const NumericCdf cdf = marginal_cdf(osc, "radius", 0.0);
  const double ref = cdf.moment([](double r) { return r; });
  EXPECT_NEAR(ref, 3.0 * std::sqrt(std::numbers::pi) / 4.0, 1e-9);
  EXPECT_LT(std::abs(mean - ref), 3.0 * se);
}

namespace {

template <class S>
int ks_passes(const S& sys, const std::string& marginal, double (*project)(const typename S::Point&), int reps,
              std::size_t n) {
  const NumericCdf cdf = marginal_cdf(sys, marginal, 0.0);
  int pass = 0;
  for (int r = 0; r < reps; ++r) {
    SamplerConfig cfg;
    cfg.n = n;
    cfg.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto xs = sample_positions(sys, cfg, 0.0);
    std::vector<double> v;
    for (const auto& x : xs) v.push_back(project(x));
    if (ks_distance(v, cdf) < ks_critical_value_01(n)) ++pass;
  }
  return pass;
}

}  // namespace

TEST(Sampling, RejectionKsPassRateDoubleSlit) {
  EXPECT_GE(ks_passes(DoubleSlit{}, "x", +[](const Vec<1>& x) { return x[0]; }, 100, 10000), 95);
}

TEST(Sampling, RejectionKsPassRateOscillator) {
  EXPECT_GE(ks_passes(Oscillator2D{}, "radius", +[](const Vec<2>& x) { return norm(x); }, 100, 10000), 95);
}

TEST(Sampling, RejectionKsPassRateHydrogen) {
  const Hydrogen h;
  EXPECT_GE(ks_passes(h, "z", +[](const Vec<3>& x) { return x[2]; }, 100, 10000), 95);
  EXPECT_GE(ks_passes(h, "cyl_radius", +[](const Vec<3>& x) { return std::hypot(x[0], x[1]); }, 100, 10000), 95);
}

TEST(Sampling, EnvelopeViolationIsReported) {
  SamplerConfig cfg;
  cfg.n = 200000;
  cfg.domain = Box{{-1.0}, {1.0}};
  try {
    sample_positions(SpikeSystem{}, cfg, 0.0);
    FAIL() << "expected an envelope violation";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "ensemble.envelope_margin");
    EXPECT_NE(std::string(e.what()).find("exceeds envelope"), std::string::npos);
  }
}

TEST(Sampling, DomainDimensionMismatch) {
  SamplerConfig cfg;
  cfg.domain = Box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  try {
    sample_positions(Oscillator2D{}, cfg, 0.0);
    FAIL() << "expected a dimension mismatch";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "ensemble.domain");
  }
}

TEST(Sampling, DefaultDomainsHoldTheMass) {
  const Oscillator2D osc;
  const Box ob = default_domain(osc, 0.0);
  EXPECT_EQ(ob.hi[0], 6.0);
  const NumericCdf r = marginal_cdf(osc, "radius", 0.0);
  EXPECT_GT(r.exact(6.0), 1.0 - 1e-8);
  const Box hb = default_domain(Hydrogen{}, 0.0);
  EXPECT_EQ(hb.hi[2], 20.0);
  const Box db = default_domain(DoubleSlit{}, 0.0);
  EXPECT_DOUBLE_EQ(db.hi[0], 4.0 * 2.5 + 6.0 * 0.625);
}

TEST(Sampling, InitialVelocitySignPattern) {
  const DoubleSlit ds;
  std::vector<Vec<1>> xs;
  for (double x : {-6.0, -5.0, -4.0, -3.0, 3.0, 4.0, 5.0, 6.0}) xs.push_back(Vec<1>{x});
  const auto vs = initial_velocities(ds, xs, quantile(xs.size()), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // u = -2: velocity u on the left and -u on the right, far from the centre.
    EXPECT_EQ(vs[i][0] > 0.0, xs[i][0] > 0.0);
    if (std::abs(xs[i][0]) >= 5.0) {
      EXPECT_NEAR(std::abs(vs[i][0]), 2.0, 0.35);
    }
  }
}

TEST(Sampling, InitialVelocityExamples) {
  std::vector<Vec<2>> p2{Vec<2>{0.0, 2.0}};
  const auto v2 = initial_velocities(Oscillator2D{}, p2, SamplerConfig{}, 0.0);
  EXPECT_NEAR(v2[0][0], -0.5, 1e-15);
  EXPECT_NEAR(v2[0][1], 0.0, 1e-15);
  std::vector<Vec<3>> p3{Vec<3>{0.0, 4.0, 1.0}};
  const auto v3 = initial_velocities(Hydrogen{}, p3, SamplerConfig{}, 0.0);
  EXPECT_NEAR(v3[0][0], -0.25, 1e-15);
  EXPECT_NEAR(v3[0][1], 0.0, 1e-15);
  EXPECT_NEAR(v3[0][2], 0.0, 1e-15);
}

TEST(Sampling, NodeStartsAreResampled) {
  std::vector<Vec<2>> pts{Vec<2>{0.0, 0.0}, Vec<2>{1.0, 0.0}};
  SamplerConfig cfg;
  cfg.seed = 5;
  const auto vs = initial_velocities(Oscillator2D{}, pts, cfg, 0.0);
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_GT(norm(pts[0]), 0.0);
  EXPECT_TRUE(all_finite(vs[0]));
  EXPECT_EQ(pts[1][0], 1.0);
}

TEST(Rng, ReproducibleStreams) {
  Xoshiro256ss a(1, 0), b(1, 0), c(1, 1);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differ |= x != c();
  }
  EXPECT_TRUE(differ);
  Xoshiro256ss u(9);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Rng, HaltonSequence) {
  EXPECT_DOUBLE_EQ(halton(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(halton(2, 2), 0.25);
  EXPECT_DOUBLE_EQ(halton(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(halton(1, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(halton(4, 3), 4.0 / 9.0);
}
