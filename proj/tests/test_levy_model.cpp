#include "levylab/errors.hpp"
#include "levylab/levy_model.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace levylab;
using cd = std::complex<double>;

namespace {

std::vector<LevyModel> zoo() {
  return {LevyModel::symmetric_stable(1.5),
          LevyModel::symmetric_stable(1.2, 0.7),
          LevyModel::symmetric_stable(1.0),
          LevyModel::compound_poisson(3.0, {{1.0, 1.0}}),
          LevyModel::compound_poisson(2.0, {{0.5, 0.3}, {-2.0, 0.7}}, 0.4),
          LevyModel::compound_poisson_normal(2.0, 0.3, 0.5, -0.2),
          LevyModel::gaussian(2.0, 0.1),
          LevyModel::tempered_stable(1.0, 1.5, 1.0)};
}

std::vector<double> xi_grid() {
  std::vector<double> out;
  for (double x = 1e-3; x < 2e3; x *= 1.7) out.push_back(x);
  return out;
}

// Symmetric tempered stable: int (1 - cos xi z) w e^{-l|z|} |z|^{-1-a} dz.
double tempered_re_psi(double w, double a, double l, double xi) {
  return -2.0 * w * std::tgamma(-a) * (std::pow(l * l + xi * xi, a / 2) * std::cos(a * std::atan(xi / l)) - std::pow(l, a));
}

} // namespace

TEST(LevyModel, StableAtTwo) {
  const auto psi = LevyModel::symmetric_stable(1.5).psi(2.0);
  EXPECT_NEAR(psi.real(), std::pow(2.0, 1.5), 1e-14);
  EXPECT_EQ(psi.imag(), 0.0);
}

TEST(LevyModel, PsiVanishesAtZero) {
  for (const auto &m : zoo()) EXPECT_EQ(m.psi(0.0), cd(0.0, 0.0)) << m.describe();
  EXPECT_LT(std::abs(LevyModel::tempered_stable(1.0, 1.5, 1.0).psi_quadrature(0.0)), 1e-12);
}

TEST(LevyModel, CompoundPoissonAtPi) {
  const auto m = LevyModel::compound_poisson(3.0, {{1.0, 1.0}});
  const auto psi = m.psi(std::numbers::pi);
  EXPECT_NEAR(psi.real(), 6.0, 1e-14);
  EXPECT_NEAR(psi.imag(), 0.0, 1e-14);
  // 3 (1 - e^{i xi}) at a generic point.
  const double xi = 0.8;
  const cd expect = 3.0 * (1.0 - std::exp(cd(0.0, xi)));
  EXPECT_NEAR(std::abs(m.psi(xi) - expect), 0.0, 1e-14);
}

TEST(LevyModel, RealPartNonnegativeAndConjugateSymmetric) {
  for (const auto &m : zoo()) {
    for (double xi : xi_grid()) {
      const cd p = m.psi(xi), q = m.psi(-xi);
      EXPECT_GE(p.real(), 0.0) << m.describe() << " xi=" << xi;
      EXPECT_EQ(q, std::conj(p)) << m.describe() << " xi=" << xi;
    }
  }
}

TEST(LevyModel, QuadratureMatchesStableClosedForm) {
  for (double alpha : {1.2, 1.5, 1.9, 0.8}) {
    const auto m = LevyModel::symmetric_stable(alpha, 1.3);
    for (double xi : {1e-2, 0.3, 1.0, 7.0, 100.0, 3000.0}) {
      const cd exact = m.psi(xi), quad = m.psi_quadrature(xi);
      EXPECT_NEAR(quad.real() / exact.real(), 1.0, 1e-8) << alpha << " " << xi;
      EXPECT_LT(std::abs(quad.imag()), 1e-8 * exact.real());
    }
  }
}

TEST(LevyModel, QuadratureMatchesNormalJumpClosedForm) {
  const auto m = LevyModel::compound_poisson_normal(2.0, 0.3, 0.5, -0.2);
  for (double xi : {0.05, 0.5, 2.0, 10.0, 60.0}) {
    const cd exact = m.psi(xi), quad = m.psi_quadrature(xi);
    EXPECT_LT(std::abs(quad - exact), 1e-9 * std::max(1.0, std::abs(exact))) << xi;
  }
}

TEST(LevyModel, TemperedStableMatchesIndependentFormula) {
  const auto m = LevyModel::tempered_stable(1.0, 1.5, 1.0);
  for (double xi : {0.01, 0.5, 3.0, 40.0, 1000.0}) {
    const double ref = tempered_re_psi(1.0, 1.5, 1.0, xi);
    EXPECT_NEAR(m.re_psi(xi) / ref, 1.0, 1e-8) << xi;
    EXPECT_LT(std::abs(m.psi(xi).imag()), 1e-8 * ref);
  }
}

TEST(LevyModel, AsymmetricDensityAgainstDirectIntegral) {
  // One-sided exponential density on z > 0; compare with exp-sinh quadrature
  // of the Lévy–Khintchine integrand written out directly.
  DensityMeasure nu;
  nu.density = [](double z) { return z > 0 ? 2.0 * std::exp(-z) : 0.0; };
  nu.hints = {-1.0, 50.0};
  const LevyModel m(0.0, 0.0, nu);
  // Elementary antiderivatives: int_0^inf e^{-z} cos(xi z) = 1/(1+xi^2),
  // int_0^inf e^{-z} sin(xi z) = xi/(1+xi^2), int_0^1 z e^{-z} = 1 - 2/e.
  for (double xi : {0.3, 2.0, 9.0}) {
    const double re = 2.0 * (1.0 - 1.0 / (1.0 + xi * xi));
    const double im_small = 2.0 * (xi * (1.0 - 2.0 / std::exp(1.0)) - xi / (1.0 + xi * xi));
    const cd p = m.psi(xi);
    EXPECT_NEAR(p.real(), re, 1e-8 * re) << xi;
    EXPECT_NEAR(p.imag(), im_small, 1e-8 * std::max(1.0, std::abs(im_small))) << xi;
  }
}

TEST(LevyModel, CompoundPoissonWithoutClosedFormMatches) {
  const auto m = LevyModel::compound_poisson(2.0, {{0.5, 0.3}, {-2.0, 0.7}}, 0.4);
  const auto q = m.without_closed_form();
  EXPECT_EQ(q.closed_form(), ClosedForm::none);
  for (double xi : {0.1, 1.0, 5.0}) EXPECT_LT(std::abs(m.psi(xi) - q.psi(xi)), 1e-12);
}

TEST(LevyModel, SmallJumpVarianceOfStable) {
  const double alpha = 1.5, d = 1e-3;
  const auto m = LevyModel::symmetric_stable(alpha);
  const double expect = 2.0 * stable_density_constant(alpha) * std::pow(d, 2.0 - alpha) / (2.0 - alpha);
  EXPECT_NEAR(m.small_jump_variance(d) / expect, 1.0, 1e-10);
  EXPECT_NEAR(m.compensator_moment(d), 0.0, 1e-12);
}

TEST(LevyModel, StableDensityConstantMatchesExponent) {
  // C_alpha int (1 - cos z) |z|^{-1-alpha} dz = 1.
  // int_0^inf (1 - cos z) z^{-1-alpha} dz = -Gamma(-alpha) cos(pi alpha / 2), and pi/2 at alpha = 1.
  for (double alpha : {0.5, 1.5, 1.9}) {
    const double I = -2.0 * std::tgamma(-alpha) * std::cos(0.5 * std::numbers::pi * alpha);
    EXPECT_NEAR(stable_density_constant(alpha) * I, 1.0, 1e-13) << alpha;
  }
  EXPECT_NEAR(stable_density_constant(1.0) * std::numbers::pi, 1.0, 1e-15);
}

TEST(LevyModel, RejectsInvalidInput) {
  EXPECT_THROW(LevyModel(0.0, -1.0, PointMasses{}), PreconditionError);
  EXPECT_THROW(LevyModel::symmetric_stable(2.5), PreconditionError);
  EXPECT_THROW(LevyModel::compound_poisson(-1.0, {{1.0, 1.0}}), PreconditionError);
  DensityMeasure bad;
  bad.density = [](double z) { return std::pow(std::abs(z), -3.5); }; // not integrable at 0
  bad.hints = {2.5, 2.5};
  EXPECT_THROW(LevyModel(0.0, 0.0, bad), PreconditionError);
  DensityMeasure negative;
  negative.density = [](double z) { return -std::exp(-std::abs(z)); };
  EXPECT_THROW(LevyModel(0.0, 0.0, negative), PreconditionError);
}

TEST(LevyModel, ThreadSafeEvaluation) {
  const auto m = LevyModel::tempered_stable(1.0, 1.5, 1.0);
  std::vector<cd> serial(64), par(64);
  for (int i = 0; i < 64; ++i) serial[i] = m.psi(0.1 * (i + 1));
#pragma omp parallel for
  for (int i = 0; i < 64; ++i) par[i] = m.psi(0.1 * (i + 1));
  EXPECT_EQ(serial, par);
}
