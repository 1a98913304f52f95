#pragma once

#include "levylab/drift.hpp"
#include "levylab/grid.hpp"
#include "levylab/levy_condition.hpp"
#include "levylab/parallel.hpp"
#include "levylab/sampler.hpp"
#include "levylab/test_function.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace levylab {

enum class LambdaPolicy {
  auto_lambda0_or, // lambda = max(lambda0, value)
  fixed            // lambda = value, refused if below lambda0
};

/// Constants shared by every estimate for one (model, K, lambda).
struct KrylovContext {
  LevyModel model;
  double K = 0.0;
  double lambda = 1.0;
  double lambda0 = 0.0;
  N1Result n1;
  double reference = 0.0; // 2 sqrt(N1)
  /// sqrt(N1) / (2 pi): the constant of the uncontrolled resolvent bound under
  /// the transform convention used here (reported, not used for verdicts).
  double resolvent_constant = 0.0;
};

/// Computes lambda0 for K and N1 at the chosen lambda. Throws
/// PreconditionError when the fixed lambda is below lambda0 or the condition
/// check is not satisfied.
KrylovContext make_krylov_context(const LevyModel &model, double K, LambdaPolicy policy, double lambda_value,
                                  const DyadicGrid &grid = {});

struct KrylovProbe {
  std::string id;
  TestFunction f;
  double t0 = 0.0;
  double x0 = 0.0;
};

struct McConfig {
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  /// Integration horizon; 0 picks it from the truncation rule.
  double horizon = 0.0;
  /// Target truncation_bound / (reference * ||f||).
  double truncation_tolerance = 0.01;
  Exec exec = Exec::parallel;
  SamplerOptions sampler;
};

struct KrylovReport {
  std::string experiment_id;
  double lambda = 0.0;
  double horizon = 0.0;
  double lhs_estimate = 0.0;
  double lhs_ci_halfwidth = 0.0;
  double rhs_norm = 0.0;
  double reference_constant = 0.0;
  double ratio = 0.0;
  double truncation_bound = 0.0;
  bool pass = false;
};

std::string verdict_string(const KrylovReport &r);

/// Horizon and truncation bound for one probe. The horizon ends at the time
/// support when that is reached first (truncation exactly 0).
struct Horizon {
  double T = 0.0;
  double truncation_bound = 0.0;
};
Horizon choose_horizon(const TestFunction &f, double t0, double lambda, double reference, double tolerance,
                       double fixed_horizon = 0.0);

/// Per-path discounted occupation integrals int_0^{T_j} e^{-lambda u} f_j(t0_j + u, x0_j + X_u) du
/// (trapezoid on the Euler grid, X_0 = 0) for every probe, all probes sharing
/// the same paths. Result is [probe][path].
std::vector<std::vector<double>> discounted_occupation(const IncrementSampler &sampler, const DriftSpec &a,
                                                       const std::vector<KrylovProbe> &probes, double lambda,
                                                       const std::vector<double> &horizons, const McConfig &cfg);

/// Monte Carlo check of the discounted estimate for one probe.
KrylovReport krylov_mc(const KrylovContext &ctx, const DriftSpec &a, const KrylovProbe &probe, const McConfig &cfg);

/// krylov_mc over a family of probes on one shared path set.
std::vector<KrylovReport> bound_sweep(const KrylovContext &ctx, const DriftSpec &a,
                                      const std::vector<KrylovProbe> &probes, const McConfig &cfg);

/// The ten built-in sweep functions: indicators [0,d]^2 for d in {1, 0.5, 0.25},
/// further boxes, two bumps and a box scaled by 10.
std::vector<KrylovProbe> builtin_sweep();

/// Per-path integrals int_0^{t ^ tau_m} f(u, X_u) du with X_0 = x0; the last
/// interval before the exit uses its left value so nothing at or after the
/// exit contributes.
std::vector<double> local_occupation(const IncrementSampler &sampler, const DriftSpec &a, const TestFunction &f,
                                     double m, double t, double x0, const McConfig &cfg);

/// Localized estimate without discount, compared with reference * ||f||_{2,m,t}.
KrylovReport krylov_local_mc(const KrylovContext &ctx, const DriftSpec &a, const TestFunction &f, double m, double t,
                             double x0, const McConfig &cfg, std::string id = "local");

/// Periodic (t, x) grid for the resolvent oracle.
struct OracleGrid {
  double t_lo = -10.0, t_hi = 20.0;
  std::size_t nt = 1024;
  double x_lo = -40.0, x_hi = 40.0;
  std::size_t nx = 2048;

  UniformGrid t_grid() const { return {t_lo, (t_hi - t_lo) / static_cast<double>(nt), nt}; }
  UniformGrid x_grid() const { return {x_lo, (x_hi - x_lo) / static_cast<double>(nx), nx}; }
};

struct ResolventField {
  GridFunction grid;
  double lambda = 0.0;

  /// Bilinear interpolation inside the grid.
  double at(double t, double x) const;
};

/// v0(t, x) = E int_0^inf e^{-lambda s} f(t + s, x + S_s) ds: FFT in x, then
/// exact backward integration in t per frequency. Requires
/// padding of at least twice the support diameter on every side.
ResolventField resolvent_oracle(const LevyModel &model, const TestFunction &f, double lambda, const OracleGrid &grid);

} // namespace levylab
