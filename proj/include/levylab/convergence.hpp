#pragma once

#include "levylab/drift.hpp"
#include "levylab/parallel.hpp"
#include "levylab/sampler.hpp"

#include <cstdint>
#include <vector>

namespace levylab {

struct AldousConfig {
  std::vector<double> l_grid{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  std::vector<double> r_ladder{0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> tau_grid{0.0, 0.25, 0.5, 0.75};
  double eps_tol = 0.1;
};

/// Tightness diagnostics for one set of paths on a common grid.
struct AldousTable {
  std::vector<double> l_grid;
  std::vector<double> sup_exceed;           // P(sup_{s<=t} |X_s| > l), per l
  std::vector<double> r_ladder;
  std::vector<double> tau_grid;
  std::vector<std::vector<double>> displacement; // [r][tau]: P(|X_{t^(tau+r)} - X_{t^tau}| > eps_tol)
  std::vector<double> max_displacement;          // per r, max over tau
};

/// Per-path summary from which an AldousTable is reduced.
struct AldousRecord {
  double sup_abs = 0.0;
  std::vector<double> start; // X at t ^ tau, per tau
  std::vector<double> end;   // X at t ^ (tau + r), [r * n_tau + tau]
};

/// Grid indices needed by the displacement statistic on time grid t_grid up
/// to horizon t: the index of t ^ tau per tau, and of t ^ (tau + r) per (r, tau).
struct AldousIndices {
  std::vector<std::size_t> start;
  std::vector<std::size_t> end;
  std::size_t last = 0; // index of t
};
AldousIndices aldous_indices(const std::vector<double> &t_grid, double t, const AldousConfig &cfg);

AldousRecord aldous_record(const std::vector<double> &values, const AldousIndices &idx);
AldousTable aldous_reduce(const std::vector<AldousRecord> &records, const AldousConfig &cfg);

/// Empirical tables for paths sharing one grid, on [0, t].
AldousTable aldous_diagnostics(const std::vector<SamplePath> &paths, double t, const AldousConfig &cfg);

struct LadderConfig {
  std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
  double x0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  /// Threshold in the drift-integral gap probability.
  double drift_tol = 0.05;
  AldousConfig aldous;
  Exec exec = Exec::parallel;
  SamplerOptions sampler;
};

struct GapQuantiles {
  double median = 0.0;
  double q90 = 0.0;
  double max = 0.0;
};

struct ConvergenceReport {
  std::vector<double> ladder;
  std::vector<GapQuantiles> pathwise_gap;   // rung k vs k+1
  std::vector<double> ks_distances;         // terminal marginals, rung k vs k+1
  std::vector<double> ks_critical;          // 95% two-sample critical value
  std::vector<double> drift_integral_gap;   // P(|Y^k_T - Y^{k+1}_T| > drift_tol)
  std::vector<AldousTable> aldous;          // per rung
  std::vector<std::vector<double>> terminal; // X_T per rung and path
};

/// Solves with the mollified drifts a_{eps_k} for every rung, all rungs of a
/// path driven by the same noise increments. Requires a strictly decreasing
/// ladder of length >= 3.
ConvergenceReport mollification_ladder(const LevyModel &model, const DriftSpec &a, const LadderConfig &cfg);

} // namespace levylab
