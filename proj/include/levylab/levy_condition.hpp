#pragma once

#include "levylab/levy_model.hpp"

#include <string>
#include <vector>

namespace levylab {

/// Dyadic frequency grid xi_k = xi_min * 2^k, k = 0, 1, ... while xi_k <= xi_max.
struct DyadicGrid {
  double xi_min = 1.0;
  double xi_max = 1048576.0; // 2^20

  std::vector<double> points() const;
};

enum class ConditionVerdict { satisfied, violated, inconclusive };

std::string to_string(ConditionVerdict v);

struct RatioSample {
  double xi;
  double re_psi;
  double ratio; // Re psi(xi) / |xi|
};

struct ConditionOptions {
  /// Minimum of the ratio over the last decade required for "satisfied".
  double ratio_threshold = 1.0;
  /// Log-log slope over the last two decades at or below which the ratio is
  /// treated as bounded ("violated").
  double slope_tolerance = 0.05;
};

/// Numerical evidence for the existence condition 1/Re psi(xi) = o(1/|xi|).
struct ConditionReport {
  ConditionVerdict verdict = ConditionVerdict::inconclusive;
  std::vector<RatioSample> samples;
  double trend_slope = 0.0;
  double last_decade_min_ratio = 0.0;
  DyadicGrid grid;
  std::string explanation;
};

/// Classifies the growth of Re psi(xi)/|xi| on the grid:
///  * satisfied: strictly increasing over the last decade with minimum above
///    the ratio threshold;
///  * violated: log-log slope over the last two decades <= slope tolerance
///    (ratio bounded or decreasing);
///  * inconclusive otherwise.
/// Requires xi_max / xi_min >= 1e3.
ConditionReport check_condition(const LevyModel &model, const DyadicGrid &grid = {},
                                const ConditionOptions &options = {});

struct Lambda0Options {
  double floor = 1e-6;
  std::size_t search_points = 400;
  double search_min = 1e-8;
};

/// Smallest discount rate making (Re psi(xi) + lambda)^2 >= 4 K^2 xi^2 for
/// every xi: max(sup_xi (2K|xi| - Re psi(xi)), floor). Log-grid search followed
/// by Brent refinement around the best bracket. Refuses with PreconditionError
/// unless check_condition reports "satisfied" (the supremum is infinite).
double lambda0(const LevyModel &model, double K, const DyadicGrid &grid = {},
               const Lambda0Options &options = {});

struct N1Result {
  double value = 0.0;          // pi * int_R dxi / (lambda + Re psi(xi))
  double core = 0.0;           // int_0^{core_limit} (one side)
  double tail = 0.0;           // int_{core_limit}^inf of the fitted power law (one side)
  double tail_fraction = 0.0;  // tail / (core + tail)
  double fitted_exponent = 0.0;
  double fitted_coefficient = 0.0;
  double core_limit = 0.0;
};

struct N1Options {
  /// Upper end of the adaptive core integral; 0 means grid.xi_max.
  double core_limit = 0.0;
  double max_tail_fraction = 0.1;
};

/// N1 = pi * int dxi / (lambda + Re psi(xi)). Adaptive quadrature on the core
/// interval plus the analytic tail of a power-law fit Re psi ~ C xi^p on the
/// last decade. Throws InconclusiveError if the tail exceeds the configured
/// fraction of the total, PreconditionError if lambda <= 0 or the condition
/// is not satisfied.
N1Result n1_constant(const LevyModel &model, double lambda, const DyadicGrid &grid = {},
                     const N1Options &options = {});

/// Reference constant of the L2 estimate, 2 * sqrt(N1).
inline double reference_constant(const N1Result &n1) { return 2.0 * std::sqrt(n1.value); }

} // namespace levylab
