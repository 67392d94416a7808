#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "qctrans/fields.hpp"
#include "qctrans/quadrature.hpp"
#include "qctrans/rng.hpp"
#include "qctrans/systems.hpp"

using namespace qct;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

double wrap(double a) { return std::remainder(a, 2.0 * pi); }

// Residual of i psi_t = -1/2 lap psi + V psi by fourth-order central differences, relative to |psi|.
template <class S>
double schrodinger_residual(const S& sys, const typename S::Point& x, double t) {
  const double h = 2e-3, k = 2e-4;
  const cd p0 = sys.psi(x, t);
  const cd dt = (8.0 * (sys.psi(x, t + k) - sys.psi(x, t - k)) - (sys.psi(x, t + 2.0 * k) - sys.psi(x, t - 2.0 * k))) /
                (12.0 * k);
  cd lap = 0.0;
  for (int i = 0; i < S::dim; ++i) {
    const auto e = S::Point::unit(i);
    lap += (16.0 * (sys.psi(x + h * e, t) + sys.psi(x - h * e, t)) - (sys.psi(x + 2.0 * h * e, t) + sys.psi(x - 2.0 * h * e, t)) -
            30.0 * p0) /
           (12.0 * h * h);
  }
  const cd res = cd(0.0, 1.0) * dt + 0.5 * lap - sys.potential(x) * p0;
  return std::abs(res) / std::max(std::abs(p0), 1e-300);
}

}  // namespace

// ---------------------------------------------------------------------------
// Double slit

TEST(DoubleSlitSystem, InitialValueAtOrigin) {
  const DoubleSlit ds;
  const double X = 2.5, r = 0.625, u = -2.0;
  // Both packets contribute e^{-X^2/(2 rho0^2)} e^{i u X} / sqrt(rho0) at x = 0.
  const cd expected = 2.0 * std::exp(-X * X / (2.0 * r * r)) * std::polar(1.0, u * X) / std::sqrt(r);
  const cd got = ds.psi(Vec<1>{0.0}, 0.0);
  EXPECT_NEAR(got.real(), expected.real(), 1e-15);
  EXPECT_NEAR(got.imag(), expected.imag(), 1e-15);
  EXPECT_NEAR(wrap(std::arg(got)), wrap(u * X), 1e-12);
  EXPECT_NEAR(wrap(std::arg(got)), 1.2831853071795862, 1e-12);
}

TEST(DoubleSlitSystem, SolvesFreeSchrodingerEquation) {
  const DoubleSlit ds;
  for (double t : {0.05, 0.5, 1.3, 2.0})
    for (double x = -8.0; x <= 8.0; x += 0.7) {
      if (std::norm(ds.psi(Vec<1>{x}, t)) < 1e-8) continue;
      EXPECT_LT(schrodinger_residual(ds, Vec<1>{x}, t), 1e-4) << "x=" << x << " t=" << t;
    }
}

TEST(DoubleSlitSystem, ClosedDensityEqualsModulusSquared) {
  const DoubleSlit ds;
  Xoshiro256ss rng(5);
  for (int i = 0; i < 500; ++i) {
    const double x = -10.0 + 20.0 * rng.uniform(), t = 2.5 * rng.uniform();
    const double rho = std::norm(ds.psi(Vec<1>{x}, t));
    EXPECT_NEAR(ds.closed_density(x, t), rho, 1e-12 * std::max(1.0, rho));
  }
}

TEST(DoubleSlitSystem, ClosedPhaseEqualsArgument) {
  const DoubleSlit ds;
  Xoshiro256ss rng(6);
  for (int i = 0; i < 500; ++i) {
    const double x = -6.0 + 12.0 * rng.uniform(), t = 2.5 * rng.uniform();
    const cd p = ds.psi(Vec<1>{x}, t);
    if (std::norm(p) < 1e-10) continue;
    EXPECT_NEAR(wrap(ds.closed_phase(x, t) - std::arg(p)), 0.0, 1e-9);
  }
}

TEST(DoubleSlitSystem, MassIsConserved) {
  const DoubleSlit ds;
  auto mass = [&](double t) {
    return integrate([&](double x) { return std::norm(ds.psi(Vec<1>{x}, t)); }, -40.0, 40.0, 200, 1e-13);
  };
  const double m0 = mass(0.0);
  EXPECT_GT(m0, 0.0);
  for (double t : {0.5, 1.0, 2.0, 2.5}) EXPECT_NEAR(mass(t) / m0, 1.0, 1e-9);
}

TEST(DoubleSlitSystem, SymmetricDensity) {
  const DoubleSlit ds;
  for (double t : {0.0, 1.0, 2.0})
    for (double x = 0.1; x < 8.0; x += 0.9)
      EXPECT_NEAR(ds.closed_density(x, t), ds.closed_density(-x, t), 1e-13);
}

TEST(DoubleSlitSystem, ClosedFieldsMatchFiniteDifferences) {
  const DoubleSlit ds;
  const StencilConfig st;
  Xoshiro256ss rng(9);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec<1> x{-7.0 + 14.0 * rng.uniform()};
    const double t = 0.05 + 2.0 * rng.uniform();
    if (std::norm(ds.psi(x, t)) < 1e-6) continue;
    ++checked;
    EXPECT_NEAR((*ds.closed_velocity(x, t))[0], velocity_grad_S(ds, x, t, st)[0], 1e-7);
    const double q = *ds.closed_quantum_potential(x, t);
    EXPECT_NEAR(q, quantum_potential(ds, x, t, st), 1e-5 * std::max(1.0, std::abs(q)));
    const double dq = (*ds.closed_quantum_potential_gradient(x, t))[0];
    EXPECT_NEAR(dq, quantum_potential_gradient(ds, x, t, st)[0], 1e-4 * std::max(1.0, std::abs(dq)));
  }
  EXPECT_GT(checked, 100);
}

TEST(DoubleSlitSystem, SingleGaussianQuantumPotentialAtCenter) {
  // Near the centre of one isolated packet at t = 0, Q = 1/(2 rho0^2) - (x-X)^2/(2 rho0^4).
  const DoubleSlit ds(DoubleSlitParams{0.625, -2.0, 40.0});
  const double r = 0.625;
  for (double d : {-0.3, 0.0, 0.2})
    EXPECT_NEAR(*ds.closed_quantum_potential(Vec<1>{40.0 + d}, 0.0), 0.5 / (r * r) - d * d / (2 * r * r * r * r),
                1e-10);
}

TEST(DoubleSlitSystem, RejectsInvalidParameters) {
  EXPECT_THROW(DoubleSlit(DoubleSlitParams{0.0, -2.0, 2.5}), InvalidParameter);
  EXPECT_THROW(DoubleSlit(DoubleSlitParams{0.6, -2.0, -1.0}), InvalidParameter);
  EXPECT_THROW(DoubleSlit().psi(Vec<1>{0.0}, -0.1), InvalidParameter);
}

// ---------------------------------------------------------------------------
// Oscillator

TEST(OscillatorSystem, NormalizedAndStationary) {
  const Oscillator2D osc;
  auto radial = [&](double r) {
    return integrate([&](double th) { return r * std::norm(osc.psi(Vec<2>{r * std::cos(th), r * std::sin(th)}, 0.0)); },
                     0.0, 2.0 * pi, 8, 1e-13);
  };
  EXPECT_NEAR(integrate(radial, 0.0, 10.0, 40, 1e-13), 1.0, 1e-10);
  for (double t : {0.3, 5.0})
    EXPECT_NEAR(std::norm(osc.psi(Vec<2>{0.4, -0.9}, t)), std::norm(osc.psi(Vec<2>{0.4, -0.9}, 0.0)), 1e-15);
}

TEST(OscillatorSystem, SolvesSchrodingerEquation) {
  for (double k0 : {1.0, 2.5})
    for (double alpha : {pi / 2.0, 0.7}) {
      const Oscillator2D osc(Oscillator2DParams{k0, alpha});
      Xoshiro256ss rng(13);
      for (int i = 0; i < 40; ++i) {
        const Vec<2> x{-2.0 + 4.0 * rng.uniform(), -2.0 + 4.0 * rng.uniform()};
        if (osc.node_polynomial(x) < 0.05) continue;
        EXPECT_LT(schrodinger_residual(osc, x, 0.8), 1e-4);
      }
    }
}

TEST(OscillatorSystem, ClosedDensityAndPhase) {
  const Oscillator2D osc;
  Xoshiro256ss rng(17);
  for (int i = 0; i < 300; ++i) {
    const Vec<2> x{-3.0 + 6.0 * rng.uniform(), -3.0 + 6.0 * rng.uniform()};
    const double t = 10.0 * rng.uniform();
    const cd p = osc.psi(x, t);
    EXPECT_NEAR(osc.closed_density(x), std::norm(p), 1e-14);
    if (std::norm(p) > 1e-12) { EXPECT_NEAR(wrap(osc.closed_phase(x, t) - std::arg(p)), 0.0, 1e-10); }
  }
}

TEST(OscillatorSystem, VelocityExamples) {
  const Oscillator2D osc;
  const auto v = *osc.closed_velocity(Vec<2>{0.0, 2.0}, 0.0);
  EXPECT_NEAR(v[0], -0.5, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  const auto w = *osc.closed_velocity(Vec<2>{1.0, 0.0}, 3.0);
  EXPECT_NEAR(w[0], 0.0, 1e-15);
  EXPECT_NEAR(w[1], 1.0, 1e-15);
}

TEST(OscillatorSystem, QuantumPotentialExamples) {
  const Oscillator2D osc;
  // Q = 2 - r^2/2 - 1/(2 r^2) for alpha = pi/2, omega = 1.
  EXPECT_NEAR(*osc.closed_quantum_potential(Vec<2>{1.0, 0.0}, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(*osc.closed_quantum_potential(Vec<2>{0.0, 2.0}, 0.0), -0.125, 1e-14);
  for (double r : {0.4, 1.3, 2.7}) {
    const Vec<2> x{r * std::cos(0.3), r * std::sin(0.3)};
    EXPECT_NEAR(*osc.closed_quantum_potential(x, 0.0), 2.0 - r * r / 2.0 - 0.5 / (r * r), 1e-12);
    const auto g = *osc.closed_quantum_potential_gradient(x, 0.0);
    const double dqdr = -r + 1.0 / (r * r * r);
    EXPECT_NEAR(g[0], dqdr * std::cos(0.3), 1e-12);
    EXPECT_NEAR(g[1], dqdr * std::sin(0.3), 1e-12);
  }
  EXPECT_THROW(osc.closed_quantum_potential(Vec<2>{0.0, 0.0}, 0.0), SingularityError);
}

TEST(OscillatorSystem, GeneralPhaseMatchesFiniteDifferences) {
  const Oscillator2D osc(Oscillator2DParams{2.0, 0.9});
  const StencilConfig st;
  Xoshiro256ss rng(19);
  for (int i = 0; i < 100; ++i) {
    const Vec<2> x{-2.0 + 4.0 * rng.uniform(), -2.0 + 4.0 * rng.uniform()};
    if (osc.node_polynomial(x) < 0.05) continue;
    const auto v = *osc.closed_velocity(x, 0.4);
    const auto vn = velocity_grad_S(osc, x, 0.4, st);
    EXPECT_NEAR(v[0], vn[0], 1e-7);
    EXPECT_NEAR(v[1], vn[1], 1e-7);
    const double q = *osc.closed_quantum_potential(x, 0.4);
    EXPECT_NEAR(q, quantum_potential(osc, x, 0.4, st), 1e-5 * std::max(1.0, std::abs(q)));
    const auto g = *osc.closed_quantum_potential_gradient(x, 0.4);
    const auto gn = quantum_potential_gradient(osc, x, 0.4, st);
    EXPECT_NEAR(g[0], gn[0], 1e-4 * std::max(1.0, std::abs(g[0])));
    EXPECT_NEAR(g[1], gn[1], 1e-4 * std::max(1.0, std::abs(g[1])));
  }
}

// ---------------------------------------------------------------------------
// Hydrogen

TEST(HydrogenSystem, MatchesExplicit211State) {
  const Hydrogen h;
  Xoshiro256ss rng(23);
  for (int i = 0; i < 200; ++i) {
    const Vec<3> q{-8.0 + 16.0 * rng.uniform(), -8.0 + 16.0 * rng.uniform(), -8.0 + 16.0 * rng.uniform()};
    const double t = 100.0 * rng.uniform();
    const double r = norm(q);
    // psi_211 = -(1 / (8 sqrt(pi))) (x + i y) e^{-r/2} e^{i t / 8}
    const cd ref = -1.0 / (8.0 * std::sqrt(pi)) * cd(q[0], q[1]) * std::exp(-r / 2.0) * std::polar(1.0, t / 8.0);
    const cd got = h.psi(q, t);
    EXPECT_NEAR(got.real(), ref.real(), 1e-15);
    EXPECT_NEAR(got.imag(), ref.imag(), 1e-15);
  }
  const cd at4 = h.psi(Vec<3>{4.0, 0.0, 0.0}, 0.0);
  EXPECT_NEAR(at4.real(), -std::exp(-2.0) / (2.0 * std::sqrt(pi)), 1e-15);
  EXPECT_NEAR(at4.imag(), 0.0, 1e-15);
}

TEST(HydrogenSystem, GroundStateValue) {
  const Hydrogen h(HydrogenParams{1, 0, 0});
  EXPECT_NEAR(h.psi(Vec<3>{0.0, 0.0, 0.0}, 0.0).real(), 1.0 / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(h.psi(Vec<3>{0.0, 1.0, 0.0}, 0.0).real(), std::exp(-1.0) / std::sqrt(pi), 1e-15);
}

TEST(HydrogenSystem, EigenstatesSolveSchrodingerEquation) {
  for (const auto& p : {HydrogenParams{1, 0, 0}, HydrogenParams{2, 1, 1}, HydrogenParams{2, 1, -1},
                        HydrogenParams{3, 2, 1}, HydrogenParams{3, 1, 0}, HydrogenParams{4, 3, -2}}) {
    const Hydrogen h(p);
    Xoshiro256ss rng(29);
    for (int i = 0; i < 20; ++i) {
      const Vec<3> q{-6.0 + 12.0 * rng.uniform(), -6.0 + 12.0 * rng.uniform(), -6.0 + 12.0 * rng.uniform()};
      if (std::norm(h.psi(q, 0.0)) < 1e-9 || norm(q) < 0.3) continue;
      EXPECT_LT(schrodinger_residual(h, q, 2.0), 1e-3) << "n=" << p.n << " l=" << p.l << " m=" << p.m;
    }
  }
}

TEST(HydrogenSystem, StatesAreNormalized) {
  for (const auto& p : {HydrogenParams{1, 0, 0}, HydrogenParams{2, 1, 1}, HydrogenParams{3, 2, -2}}) {
    const Hydrogen h(p);
    const double L = 20.0 * p.n;
    // Spherical quadrature: radial x polar, azimuth trivial for |psi|^2.
    auto shell = [&](double r) {
      return integrate(
          [&](double th) {
            return 2.0 * pi * r * r * std::sin(th) * std::norm(h.psi(Vec<3>{r * std::sin(th), 0.0, r * std::cos(th)}, 0.0));
          },
          0.0, pi, 8, 1e-13);
    };
    EXPECT_NEAR(integrate(shell, 0.0, L, 60, 1e-12), 1.0, 1e-8) << "n=" << p.n;
  }
}

TEST(HydrogenSystem, VelocityQuantumPotentialExamples) {
  const Hydrogen h;
  const auto v = *h.closed_velocity(Vec<3>{0.0, 4.0, 1.0}, 0.0);
  EXPECT_NEAR(v[0], -0.25, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
  const auto w = *h.closed_velocity(Vec<3>{4.0, 0.0, 0.0}, 0.0);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
  EXPECT_NEAR(*h.closed_quantum_potential(Vec<3>{4.0, 0.0, 0.0}, 0.0), 3.0 / 32.0, 1e-15);
  Xoshiro256ss rng(31);
  for (int i = 0; i < 100; ++i) {
    const Vec<3> q{-5.0 + 10.0 * rng.uniform(), -5.0 + 10.0 * rng.uniform(), -5.0 + 10.0 * rng.uniform()};
    const double s2 = q[0] * q[0] + q[1] * q[1];
    const double r = norm(q);
    EXPECT_NEAR(*h.closed_quantum_potential(q, 0.0), 1.0 / r - 0.125 - 0.5 / s2, 1e-12 * (1.0 + 1.0 / s2));
    EXPECT_NEAR(h.potential(q) + *h.closed_quantum_potential(q, 0.0), -0.125 - 0.5 / s2, 1e-12 * (1.0 + 1.0 / s2));
  }
  EXPECT_THROW(h.closed_velocity(Vec<3>{0.0, 0.0, 2.0}, 0.0), SingularityError);
  EXPECT_THROW(h.potential(Vec<3>{0.0, 0.0, 0.0}), SingularityError);
}

TEST(HydrogenSystem, CartesianPhaseOffsetByPi) {
  const Hydrogen h;
  Xoshiro256ss rng(37);
  for (int i = 0; i < 200; ++i) {
    const Vec<3> q{-5.0 + 10.0 * rng.uniform(), -5.0 + 10.0 * rng.uniform(), -5.0 + 10.0 * rng.uniform()};
    const double t = 50.0 * rng.uniform();
    EXPECT_NEAR(wrap(h.closed_phase(q, t) - std::arg(h.psi(q, t)) - pi), 0.0, 1e-10);
  }
}

TEST(HydrogenSystem, ClosedFormsOnlyFor211Family) {
  EXPECT_FALSE(Hydrogen(HydrogenParams{3, 1, 1}).closed_quantum_potential(Vec<3>{1.0, 1.0, 1.0}, 0.0).has_value());
  EXPECT_TRUE(Hydrogen(HydrogenParams{2, 1, -1}).closed_quantum_potential(Vec<3>{1.0, 1.0, 1.0}, 0.0).has_value());
  const auto v0 = *Hydrogen(HydrogenParams{3, 1, 0}).closed_velocity(Vec<3>{1.0, 1.0, 1.0}, 0.0);
  EXPECT_EQ(norm(v0), 0.0);
}

TEST(HydrogenSystem, RejectsInvalidQuantumNumbers) {
  EXPECT_THROW(Hydrogen(HydrogenParams{0, 0, 0}), InvalidParameter);
  EXPECT_THROW(Hydrogen(HydrogenParams{2, 2, 0}), InvalidParameter);
  EXPECT_THROW(Hydrogen(HydrogenParams{2, 1, 2}), InvalidParameter);
  EXPECT_NEAR(Hydrogen().energy(), -0.125, 0.0);
}
