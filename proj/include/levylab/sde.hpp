#pragma once

#include "levylab/drift.hpp"
#include "levylab/parallel.hpp"
#include "levylab/sampler.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace levylab {

struct SolveConfig {
  double x0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 1;
  std::uint64_t seed = 1;
};

/// Euler path X_k = x0 + S_k + Y_k with Y_{k+1} = Y_k + a(t_k, X_k) (t_{k+1} - t_k).
/// The noise S and drift integral Y are accumulated separately, so a zero
/// drift reproduces x0 + S exactly and |X - x0 - S| <= K t up to rounding.
struct EulerSolution {
  SamplePath path;                  // X, kind = solution
  std::vector<double> increments;   // S_{k+1} - S_k
  std::vector<double> drift_integral; // Y_k
};

/// One path; draws the increments from rng in grid order.
EulerSolution euler_solve(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg, RngStream &rng);

/// Replays given increments (coupling of different drifts on the same noise).
EulerSolution euler_from_increments(const std::vector<double> &t_grid, const std::vector<double> &increments,
                                    const DriftSpec &a, double x0);

/// Sums groups of factor consecutive increments (the coarse-grid increments of
/// the same noise path).
std::vector<double> coarsen_increments(const std::vector<double> &fine, std::size_t factor);

/// cfg.n_paths paths; path i draws from RngStream(cfg.seed, i).
std::vector<EulerSolution> euler_batch(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg,
                                       Exec exec = Exec::parallel);

/// Terminal values X_T of cfg.n_paths paths without storing the paths.
std::vector<double> euler_terminal_values(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg,
                                          Exec exec = Exec::parallel);

/// First grid time with |X| >= m, +infinity if none.
double tau_m(const SamplePath &path, double m);

/// Streaming Euler stepper shared by the Monte Carlo kernels.
struct EulerStepper {
  double x0 = 0.0;
  double s = 0.0;
  double y = 0.0;

  double x() const { return x0 + s + y; }
  /// Advances from time t by dt with noise increment ds.
  void step(const DriftSpec &a, double t, double dt, double ds) {
    y += a(t, x()) * dt;
    s += ds;
  }
};

} // namespace levylab
