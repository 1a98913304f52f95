#include "levylab/levy_condition.hpp"

#include "levylab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace levylab {

namespace {

double slope_loglog(const std::vector<RatioSample> &s, double from_xi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto &p : s) {
    if (p.xi < from_xi) continue;
    const double x = std::log(p.xi);
    const double y = std::log(std::max(p.ratio, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den > 0 ? (n * sxy - sx * sy) / den : 0.0;
}

} // namespace

std::vector<double> DyadicGrid::points() const {
  std::vector<double> pts;
  for (double xi = xi_min; xi <= xi_max * (1.0 + 1e-12); xi *= 2.0) pts.push_back(xi);
  return pts;
}

std::string to_string(ConditionVerdict v) {
  switch (v) {
  case ConditionVerdict::satisfied:
    return "satisfied";
  case ConditionVerdict::violated:
    return "violated";
  case ConditionVerdict::inconclusive:
    return "inconclusive";
  }
  return "inconclusive";
}

ConditionReport check_condition(const LevyModel &model, const DyadicGrid &grid,
                                const ConditionOptions &options) {
  if (!(grid.xi_min > 0.0) || !(grid.xi_max / grid.xi_min >= 1e3))
    throw PreconditionError("condition grid must span at least three decades (xi_max/xi_min >= 1e3)");
  ConditionReport report;
  report.grid = grid;
  for (double xi : grid.points()) {
    const double re = model.re_psi(xi);
    report.samples.push_back({xi, re, re / xi});
  }
  const double top = report.samples.back().xi;

  bool increasing = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  const RatioSample *prev = nullptr;
  for (const auto &s : report.samples) {
    if (s.xi < top / 10.0) continue;
    min_ratio = std::min(min_ratio, s.ratio);
    if (prev && !(s.ratio > prev->ratio * (1.0 + 1e-9))) increasing = false;
    prev = &s;
  }
  report.last_decade_min_ratio = min_ratio;
  report.trend_slope = slope_loglog(report.samples, top / 100.0);

  if (increasing && min_ratio > options.ratio_threshold) {
    report.verdict = ConditionVerdict::satisfied;
    report.explanation = fmt::format(
        "Re psi/|xi| strictly increasing over the last decade, minimum {:g} > {:g}, slope {:.4f}",
        min_ratio, options.ratio_threshold, report.trend_slope);
  } else if (report.trend_slope <= options.slope_tolerance) {
    report.verdict = ConditionVerdict::violated;
    report.explanation = fmt::format(
        "Re psi/|xi| bounded or decreasing over the last two decades (log-log slope {:.4f})",
        report.trend_slope);
  } else {
    report.verdict = ConditionVerdict::inconclusive;
    report.explanation = fmt::format(
        "ratio grows (slope {:.4f}) but is not monotone above {:g} on the last decade; enlarge the grid",
        report.trend_slope, options.ratio_threshold);
  }
  return report;
}

double lambda0(const LevyModel &model, double K, const DyadicGrid &grid, const Lambda0Options &options) {
  if (!(K >= 0.0)) throw PreconditionError("drift bound K must be >= 0");
  const ConditionReport cond = check_condition(model, grid);
  if (cond.verdict != ConditionVerdict::satisfied) {
    throw PreconditionError("lambda0 is infinite unless 1/Re psi = o(1/|xi|): condition " +
                            to_string(cond.verdict) + " (" + cond.explanation + ")");
  }
  if (K == 0.0) return options.floor;

  auto gap = [&](double xi) { return 2.0 * K * xi - model.re_psi(xi); };
  const std::size_t n = std::max<std::size_t>(options.search_points, 16);
  double hi = grid.xi_max;
  std::vector<double> xs, hs;
  for (int attempt = 0; attempt < 64; ++attempt) {
    xs.assign(n, 0.0);
    hs.assign(n, 0.0);
    const double ratio = std::pow(hi / options.search_min, 1.0 / static_cast<double>(n - 1));
    double xi = options.search_min;
    for (std::size_t i = 0; i < n; ++i, xi *= ratio) {
      xs[i] = xi;
      hs[i] = gap(xi);
    }
    const auto best = std::max_element(hs.begin(), hs.end()) - hs.begin();
    if (static_cast<std::size_t>(best) + 1 < n) break;
    hi *= 4.0;
    if (attempt == 63) throw InconclusiveError("lambda0 search did not find an interior maximum");
  }
  const auto best = static_cast<std::size_t>(std::max_element(hs.begin(), hs.end()) - hs.begin());
  double sup = hs[best];
  const double lo_b = best > 0 ? xs[best - 1] : 0.0;
  const double hi_b = xs[best + 1];
  const auto refined = boost::math::tools::brent_find_minima([&](double xi) { return -gap(xi); },
                                                             lo_b, hi_b, std::numeric_limits<double>::digits);
  sup = std::max(sup, -refined.second);
  // A relative margin of 1e-12 absorbs the rounding of the refined maximum so
  // that the inequality replays without violations on any grid.
  return std::max(sup * (1.0 + 1e-12), options.floor);
}

N1Result n1_constant(const LevyModel &model, double lambda, const DyadicGrid &grid, const N1Options &options) {
  if (!(lambda > 0.0)) throw PreconditionError("n1_constant needs lambda > 0");
  const ConditionReport cond = check_condition(model, grid);
  if (cond.verdict != ConditionVerdict::satisfied)
    throw PreconditionError("N1 is finite only when the existence condition holds (verdict " +
                            to_string(cond.verdict) + ")");

  N1Result r;
  r.core_limit = options.core_limit > 0.0 ? options.core_limit : grid.xi_max;
  auto integrand = [&](double xi) { return 1.0 / (lambda + model.re_psi(xi)); };

  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> partials;
  double core = 0.0;
  double a = 0.0;
  double b = std::min(1.0, r.core_limit);
  while (a < r.core_limit) {
    double err = 0.0, l1 = 0.0;
    const double piece = gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-13, &err, &l1);
    partials.push_back(piece);
    if (!std::isfinite(piece) || err > 1e-9 * std::max(l1, 1e-300))
      throw QuadratureError(fmt::format("N1 core integral did not converge on [{:g}, {:g}]", a, b), partials);
    core += piece;
    a = b;
    b = std::min(2.0 * b, r.core_limit);
  }
  r.core = core;

  // Least-squares fit of log Re psi = log C + p log xi on the last decade.
  constexpr int kFitPoints = 9;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < kFitPoints; ++i) {
    const double xi = r.core_limit * std::pow(10.0, -1.0 + static_cast<double>(i) / (kFitPoints - 1));
    const double re = model.re_psi(xi);
    if (!(re > 0.0)) throw InconclusiveError("Re psi vanishes on the last decade; cannot fit the N1 tail");
    const double x = std::log(xi), y = std::log(re);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double p = (kFitPoints * sxy - sx * sy) / (kFitPoints * sxx - sx * sx);
  const double C = std::exp((sy - p * sx) / kFitPoints);
  r.fitted_exponent = p;
  r.fitted_coefficient = C;
  if (!(p > 1.0))
    throw InconclusiveError(fmt::format("fitted growth exponent {:.4f} <= 1: N1 tail diverges", p));

  // int_X^inf dxi / (lambda + C xi^p) expanded in powers of lambda / (C xi^p).
  const double X = r.core_limit;
  const double q = lambda / (C * std::pow(X, p));
  double tail = 0.0;
  if (q <= 0.5) {
    double coef = 1.0 / C; // (-lambda)^k / C^{k+1}
    for (int k = 0; k < 200; ++k) {
      const double e = p * (k + 1) - 1.0;
      const double term = coef * std::pow(X, -e) / e;
      tail += term;
      if (std::abs(term) < 1e-17 * std::abs(tail)) break;
      coef *= -lambda / C;
    }
  } else {
    auto fit = [&](double xi) { return 1.0 / (lambda + C * std::pow(xi, p)); };
    tail = gauss_kronrod<double, 31>::integrate(fit, X, std::numeric_limits<double>::infinity(), 15, 1e-13);
  }
  r.tail = tail;
  r.tail_fraction = tail / (core + tail);
  r.value = 2.0 * M_PI * (core + tail);
  if (r.tail_fraction > options.max_tail_fraction) {
    throw InconclusiveError(fmt::format(
        "N1 tail is {:.1f}% of the total (limit {:.0f}%); enlarge the grid beyond xi={:g}",
        100.0 * r.tail_fraction, 100.0 * options.max_tail_fraction, X));
  }
  return r;
}

} // namespace levylab
