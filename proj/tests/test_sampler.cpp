#include "levylab/errors.hpp"
#include "levylab/sampler.hpp"
#include "levylab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace levylab;

namespace {

std::vector<double> xi_grid(double lim = 5.0, int n = 41) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(-lim + 2 * lim * k / (n - 1));
  return out;
}

} // namespace

TEST(Sampler, DeterministicDrift) {
  RngStream rng(1, 0);
  const auto m = LevyModel::compound_poisson(0.0, {{1.0, 1.0}}, 0.7);
  EXPECT_DOUBLE_EQ(sample_increment(m, 2.0, rng), -1.4);
}

TEST(Sampler, StableEcf) {
  EcfConfig cfg;
  cfg.seed = 11;
  const auto rep = ecf_report(LevyModel::symmetric_stable(1.5), xi_grid(), cfg);
  EXPECT_LT(rep.max_deviation, 0.01);
  EXPECT_LT(rep.max_deviation, rep.reference_line);
  EXPECT_DOUBLE_EQ(rep.reference_line, 4.0 / std::sqrt(200000.0));
}

TEST(Sampler, GaussianVariance) {
  const auto m = LevyModel::gaussian(2.0);
  RngStream rng(3, 0);
  std::vector<double> v(100000);
  for (auto &x : v) x = sample_increment(m, 1.0, rng);
  EXPECT_NEAR(estimate_mean(v).variance, 2.0, 0.05);
}

TEST(Sampler, AllModelsPassEcf) {
  const std::vector<LevyModel> models{LevyModel::symmetric_stable(1.3), LevyModel::symmetric_stable(0.8, 0.5),
                                      LevyModel::compound_poisson(3.0, {{1.0, 1.0}}),
                                      LevyModel::compound_poisson(2.0, {{0.5, 0.3}, {-2.0, 0.7}}, 0.4),
                                      LevyModel::compound_poisson_normal(2.0, 0.3, 0.5, -0.2),
                                      LevyModel(0.3, 0.5, StableMeasure{1.5, 1.0})};
  for (const auto &m : models) {
    EcfConfig cfg;
    cfg.n_paths = 40000;
    cfg.t = 0.7;
    cfg.seed = 5;
    const auto rep = ecf_report(m, xi_grid(), cfg);
    EXPECT_LT(rep.max_deviation, rep.reference_line) << m.describe();
  }
}

TEST(Sampler, TruncatedDensityEcf) {
  // Low activity near 0: the dropped jumps are negligible and the plain
  // statistical line applies.
  const auto m = LevyModel::tempered_stable(1.0, 0.8, 1.0);
  const IncrementSampler s(m);
  EXPECT_FALSE(s.exact());
  EXPECT_LT(s.neglected_variance(), 1e-3);
  EcfConfig cfg;
  cfg.n_paths = 40000;
  cfg.seed = 8;
  const auto rep = ecf_report(m, xi_grid(), cfg);
  EXPECT_LT(rep.max_deviation, rep.reference_line);
}

TEST(Sampler, TruncationBiasIsCertified) {
  // High activity: dropping |z| < delta shifts the law; the deviation stays
  // within the statistical line plus the bias bound |e^{-t psi}| (e^{t xi^2 v / 2} - 1)
  // with v the neglected variance.
  const auto m = LevyModel::tempered_stable(1.0, 1.5, 1.0);
  SamplerOptions opt;
  opt.truncation = 1e-2;
  const IncrementSampler s(m, opt);
  const double v = s.neglected_variance();
  // 2 int_0^delta z^{-1/2} e^{-z} dz = 2 Gamma(1/2) P(1/2, delta).
  EXPECT_NEAR(v, 2.0 * std::sqrt(M_PI) * boost::math::gamma_p(0.5, 1e-2), 1e-9 * v);
  EcfConfig cfg;
  cfg.n_paths = 40000;
  cfg.seed = 8;
  cfg.t = 0.5;
  const auto rep = ecf_report(m, xi_grid(3.0, 25), cfg, opt);
  for (const auto &p : rep.points) {
    const double bias = std::abs(p.theory) * (std::exp(cfg.t * p.xi * p.xi * v / 2.0) - 1.0);
    EXPECT_LT(p.abs_dev, rep.reference_line + bias) << p.xi;
  }
}

TEST(Sampler, AsymmetricDensityEcf) {
  DensityMeasure nu;
  nu.density = [](double z) { return z > 0 ? 2.0 * std::exp(-z) * std::pow(z, -1.3) : 0.5 * std::exp(z); };
  nu.hints = {0.3, 50.0};
  const LevyModel m(0.2, 0.0, nu);
  EcfConfig cfg;
  cfg.n_paths = 40000;
  cfg.seed = 9;
  const auto rep = ecf_report(m, xi_grid(3.0, 25), cfg);
  EXPECT_LT(rep.max_deviation, rep.reference_line);
}

TEST(Sampler, DeterministicEcfExact) {
  EcfConfig cfg;
  cfg.n_paths = 10000;
  cfg.t = 1.3;
  const auto rep = ecf_report(LevyModel::compound_poisson(0.0, {{1.0, 1.0}}, 0.7), xi_grid(), cfg);
  EXPECT_LT(rep.max_deviation, 1e-12);
}

TEST(Sampler, EcfDeviationScalesLikeCLT) {
  // Average the deviation over a few seeds; quadrupling n should halve it.
  const auto m = LevyModel::symmetric_stable(1.7);
  double d1 = 0.0, d4 = 0.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    EcfConfig a;
    a.n_paths = 10000;
    a.seed = seed;
    EcfConfig b = a;
    b.n_paths = 40000;
    b.seed = seed + 100;
    d1 += ecf_report(m, xi_grid(), a).max_deviation;
    d4 += ecf_report(m, xi_grid(), b).max_deviation;
  }
  EXPECT_GT(d1 / d4, 2.0 * 0.5);
  EXPECT_LT(d1 / d4, 2.0 * 1.5);
}

TEST(Sampler, EcfNeedsEnoughPaths) {
  EcfConfig cfg;
  cfg.n_paths = 9999;
  EXPECT_THROW(ecf_report(LevyModel::symmetric_stable(1.5), xi_grid(), cfg), PreconditionError);
}

TEST(SamplePath, SingleIntervalIsOneDraw) {
  const auto m = LevyModel::symmetric_stable(1.5);
  RngStream a(4, 2), b(4, 2);
  const auto p = sample_path(m, {0.0, 0.8}, a);
  ASSERT_EQ(p.values.size(), 2u);
  EXPECT_EQ(p.values[0], 0.0);
  EXPECT_EQ(p.values[1], sample_increment(m, 0.8, b));
}

TEST(SamplePath, ZeroModelGivesZeroPath) {
  RngStream rng(1, 1);
  const auto p = sample_path(LevyModel::compound_poisson(0.0, {{1.0, 1.0}}), time_grid(1.0, 0.1), rng);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.kind, PathKind::levy);
}

TEST(SamplePath, MergedIncrementsMatchSingleIncrement) {
  // S_{2h} from two steps vs one step of 2h: same law by stationarity.
  const auto m = LevyModel::symmetric_stable(1.5);
  const IncrementSampler s(m);
  const auto two = sample_terminal_values(s, 0.5, 2, 10000, 21, Exec::parallel);
  const auto one = sample_terminal_values(s, 0.5, 1, 10000, 22, Exec::parallel);
  EXPECT_GT(ks_pvalue(ks_statistic(two, one), two.size(), one.size()), 0.01);
}

TEST(SamplePath, Reproducible) {
  const auto m = LevyModel::compound_poisson_normal(2.0, 0.3, 0.5);
  RngStream a(77, 5), b(77, 5);
  const auto grid = time_grid(1.0, 0.01);
  EXPECT_EQ(sample_path(m, grid, a).values, sample_path(m, grid, b).values);
}

TEST(SamplePath, StreamsIndependent) {
  const IncrementSampler s(LevyModel::gaussian(1.0));
  const auto x = sample_terminal_values(s, 1.0, 1, 100000, 1, Exec::serial);
  double sxy = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) sxy += x[i] * x[i + 1];
  const double n = static_cast<double>(x.size() / 2);
  EXPECT_LT(std::abs(sxy / n), 3.0 / std::sqrt(n));
}

TEST(SamplePath, SerialAndParallelIdentical) {
  const IncrementSampler s(LevyModel::symmetric_stable(1.5));
  EXPECT_EQ(sample_terminal_values(s, 1.0, 10, 5000, 3, Exec::serial),
            sample_terminal_values(s, 1.0, 10, 5000, 3, Exec::parallel));
}

TEST(TimeGrid, ShortLastStep) {
  const auto g = time_grid(1.0, 0.3);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_DOUBLE_EQ(g[3], 0.8999999999999999);
  EXPECT_EQ(time_grid(1.0, 1e-3).size(), 1001u);
}
