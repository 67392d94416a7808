#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qctrans/config.hpp"
#include "qctrans/ensemble.hpp"

using namespace qct;

TEST(KsDistance, QuantileMidpointsOfUniform) {
  std::vector<double> v;
  for (int k = 0; k < 100; ++k) v.push_back((k + 0.5) / 100.0);
  EXPECT_NEAR(ks_distance(v, [](double x) { return x; }), 0.005, 1e-15);
}

TEST(KsDistance, DegenerateSample) {
  const std::vector<double> v(40, 0.5);
  EXPECT_GE(ks_distance(v, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5);
}

TEST(KsDistance, OrderDoesNotMatter) {
  std::vector<double> a{0.9, 0.1, 0.5, 0.3, 0.7};
  std::vector<double> b{0.1, 0.3, 0.5, 0.7, 0.9};
  auto u = [](double x) { return x; };
  EXPECT_EQ(ks_distance(a, u), ks_distance(b, u));
}

TEST(KsDistance, NeedsTwoSamples) {
  EXPECT_THROW(ks_distance(std::vector<double>{0.5}, [](double x) { return x; }), InvalidParameter);
  EXPECT_THROW(ks_distance(std::vector<double>{}, [](double x) { return x; }), InvalidParameter);
}

TEST(KsDistance, CriticalValue) {
  EXPECT_NEAR(ks_critical_value_01(10000), 0.016276, 1e-12);
  EXPECT_NEAR(ks_critical_value_01(100), 0.16276, 1e-12);
}

TEST(Marginals, CdfsAreNormalizedAndSymmetric) {
  const Hydrogen h;
  const NumericCdf z = marginal_cdf(h, "z", 0.0);
  EXPECT_NEAR(z.exact(0.0), 0.5, 1e-12);
  const NumericCdf s = marginal_cdf(h, "cyl_radius", 0.0);
  EXPECT_GT(s.exact(30.0), 1.0 - 1e-9);
  const NumericCdf x = marginal_cdf(DoubleSlit{}, "x", 0.0);
  EXPECT_DOUBLE_EQ(x.exact(0.0), 0.5);
  EXPECT_THROW(marginal_cdf(Oscillator2D{}, "z", 0.0), InvalidParameter);
}

TEST(Marginals, HydrogenZMoment) {
  // For (2,1,1): rho = (1/64pi) s^2 e^{-r}; E[z^2] = <r^2> <cos^2 theta> with <r^2> = 30, <cos^2> = 1/5.
  const NumericCdf z = marginal_cdf(Hydrogen{}, "z", 0.0);
  // Composite Simpson: the marginal density is itself a quadrature and too noisy for adaptive refinement.
  const int n = 2000;
  const double h = (z.hi() - z.lo()) / n;
  double m2 = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double v = z.lo() + k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    m2 += w * v * v * z.density(v);
  }
  EXPECT_NEAR(m2 * h / 3.0, 6.0, 1e-6);
}

TEST(Ensemble, Fig1QuantumPanelHasNoCrossings) {
  const ScenarioConfig sc = preset("fig1_quantum");
  const EnsembleResult res = run_ensemble(sc);
  ASSERT_EQ(res.trajectories.size(), 50u);
  EXPECT_EQ(res.truncation_report.completed, 50u);
  EXPECT_EQ(res.system, "double_slit");
  EXPECT_EQ(res.dim, 1);
  for (std::size_t s = 0; s < res.trajectories[0].samples.size(); ++s)
    for (std::size_t k = 1; k < res.trajectories.size(); ++k)
      ASSERT_LT(res.trajectories[k - 1].samples[s].x[0], res.trajectories[k].samples[s].x[0]) << "sample " << s;
  ASSERT_EQ(res.distribution_metrics.size(), 1u);
  EXPECT_EQ(res.distribution_metrics[0].t, 2.0);
  EXPECT_LT(res.distribution_metrics[0].statistic, res.distribution_metrics[0].critical_value);
}

TEST(Ensemble, GuidanceOnCirclesKeepsRadius) {
  ScenarioConfig sc;
  sc.system = Oscillator2D{};
  sc.mode = RunMode::guidance;
  sc.time = {0.0, 10.0, 101};
  for (int k = 0; k < 10; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 10.0 + 0.1;
    sc.initial_positions.push_back({std::cos(a), std::sin(a)});
  }
  sc.ensemble.n = 10;
  const EnsembleResult res = run_ensemble(sc);
  ASSERT_EQ(res.diagnostics.size(), 10u);
  for (const auto& d : res.diagnostics) EXPECT_LT(d.max_radius_drift, 1e-5);
}

TEST(Ensemble, ClassicalOscillatorConservesEnergy) {
  ScenarioConfig sc;
  sc.system = Oscillator2D{};
  sc.mode = RunMode::classical;
  sc.coupling = Constant{0.0};
  sc.time = {0.0, 35.0, 351};
  sc.initial_positions = {{1.0, 0.0}, {0.0, 1.5}, {-2.0, 0.0}};
  sc.initial_velocities = {{0.0, 0.5}, {-0.3, 0.0}, {0.1, -0.4}};
  sc.integrator.rtol = 1e-10;
  sc.integrator.atol = 1e-12;
  const EnsembleResult res = run_ensemble(sc);
  ASSERT_EQ(res.truncation_report.completed, 3u);
  for (const auto& d : res.diagnostics) {
    EXPECT_LT(d.max_energy_drift, 1e-6);
    EXPECT_LT(d.max_angular_momentum_drift, 1e-6);
  }
}

TEST(Ensemble, GuidancePreservesTheDistribution) {
  ScenarioConfig sc;
  sc.system = Oscillator2D{};
  sc.mode = RunMode::guidance;
  sc.ensemble.n = 1000;
  sc.ensemble.seed = 77;
  sc.time = {0.0, 3.0, 4};
  sc.output.ks_times = {0.0, 3.0};
  const EnsembleResult res = run_ensemble(sc);
  ASSERT_EQ(res.distribution_metrics.size(), 2u);
  for (const auto& m : res.distribution_metrics) {
    EXPECT_EQ(m.marginal, "radius");
    EXPECT_LT(m.statistic, m.critical_value) << "t=" << m.t;
  }
}

TEST(Ensemble, DeterministicAndAligned) {
  ScenarioConfig sc = preset("fig3_meso_b");
  sc.time.end = 5.0;
  sc.time.n_outputs = 51;
  const EnsembleResult a = run_ensemble(sc);
  const EnsembleResult b = run_ensemble(sc);
  EXPECT_TRUE(a == b);
  ASSERT_EQ(a.trajectories.size(), a.diagnostics.size());
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    EXPECT_EQ(a.trajectories[i].id, i);
    EXPECT_EQ(a.diagnostics[i].energy.size(), a.trajectories[i].samples.size());
    EXPECT_EQ(a.diagnostics[i].radius.size(), a.trajectories[i].samples.size());
  }
}

TEST(Ensemble, SampledEnsembleIsSeeded) {
  ScenarioConfig sc;
  sc.system = Hydrogen{};
  sc.mode = RunMode::guidance;
  sc.ensemble.n = 4;
  sc.time = {0.0, 1.0, 3};
  const auto a = initial_states(Hydrogen{}, sc);
  sc.ensemble.seed = 2;
  const auto b = initial_states(Hydrogen{}, sc);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_FALSE(a[0].x == b[0].x);
}

TEST(Ensemble, ExplicitVelocityCountMustMatch) {
  ScenarioConfig sc;
  sc.system = Oscillator2D{};
  sc.mode = RunMode::classical;
  sc.coupling = Constant{0.0};
  sc.initial_positions = {{1.0, 0.0}, {0.0, 1.0}};
  sc.initial_velocities = {{0.0, 1.0}};
  EXPECT_THROW(run_ensemble(sc), ConfigError);
  sc.initial_velocities = {{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
  EXPECT_THROW(run_ensemble(sc), ConfigError);
}

TEST(WorkerPool, RunsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(WorkerPool, RethrowsWorkerFailure) {
  EXPECT_THROW(parallel_for(20,
                            [](std::size_t i) {
                              if (i == 13) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(WorkerPool, EnvironmentCap) {
  ::setenv("QCTRANS_THREADS", "1", 1);
  EXPECT_EQ(worker_count(100), 1u);
  ::unsetenv("QCTRANS_THREADS");
  EXPECT_GE(worker_count(100), 1u);
  EXPECT_EQ(worker_count(0), 1u);
}
