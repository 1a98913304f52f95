#include "levylab/convergence.hpp"

#include "levylab/errors.hpp"
#include "levylab/sde.hpp"
#include "levylab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace levylab {

namespace {

std::size_t index_at(const std::vector<double> &grid, double s) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), s - 1e-9 * std::max(1.0, std::abs(s)));
  if (it == grid.end()) return grid.size() - 1;
  const auto k = static_cast<std::size_t>(it - grid.begin());
  if (k > 0 && std::abs(grid[k - 1] - s) < std::abs(grid[k] - s)) return k - 1;
  return k;
}

void check_aldous(const AldousConfig &cfg) {
  if (!(cfg.eps_tol > 0.0)) throw PreconditionError("displacement threshold must be > 0");
  for (double r : cfg.r_ladder)
    if (!(r > 0.0)) throw PreconditionError("r ladder entries must be > 0");
  for (double tau : cfg.tau_grid)
    if (!(tau >= 0.0)) throw PreconditionError("tau grid entries must be >= 0");
}

} // namespace

AldousIndices aldous_indices(const std::vector<double> &t_grid, double t, const AldousConfig &cfg) {
  check_aldous(cfg);
  if (t_grid.empty()) throw PreconditionError("empty time grid");
  AldousIndices idx;
  idx.last = index_at(t_grid, t);
  for (double tau : cfg.tau_grid) idx.start.push_back(index_at(t_grid, std::min(t, tau)));
  for (double r : cfg.r_ladder)
    for (double tau : cfg.tau_grid) idx.end.push_back(index_at(t_grid, std::min(t, tau + r)));
  return idx;
}

AldousRecord aldous_record(const std::vector<double> &values, const AldousIndices &idx) {
  AldousRecord rec;
  for (std::size_t k = 0; k <= idx.last && k < values.size(); ++k) rec.sup_abs = std::max(rec.sup_abs, std::abs(values[k]));
  for (auto i : idx.start) rec.start.push_back(values[i]);
  for (auto i : idx.end) rec.end.push_back(values[i]);
  return rec;
}

AldousTable aldous_reduce(const std::vector<AldousRecord> &records, const AldousConfig &cfg) {
  AldousTable tab;
  tab.l_grid = cfg.l_grid;
  tab.r_ladder = cfg.r_ladder;
  tab.tau_grid = cfg.tau_grid;
  const double n = static_cast<double>(records.size());
  if (records.empty()) throw PreconditionError("no paths for the tightness table");
  for (double l : cfg.l_grid) {
    std::size_t count = 0;
    for (const auto &r : records) count += r.sup_abs > l;
    tab.sup_exceed.push_back(static_cast<double>(count) / n);
  }
  const std::size_t nt = cfg.tau_grid.size();
  for (std::size_t ir = 0; ir < cfg.r_ladder.size(); ++ir) {
    std::vector<double> row;
    for (std::size_t it = 0; it < nt; ++it) {
      std::size_t count = 0;
      for (const auto &r : records) count += std::abs(r.end[ir * nt + it] - r.start[it]) > cfg.eps_tol;
      row.push_back(static_cast<double>(count) / n);
    }
    tab.max_displacement.push_back(row.empty() ? 0.0 : *std::max_element(row.begin(), row.end()));
    tab.displacement.push_back(std::move(row));
  }
  return tab;
}

AldousTable aldous_diagnostics(const std::vector<SamplePath> &paths, double t, const AldousConfig &cfg) {
  if (paths.empty()) throw PreconditionError("no paths for the tightness table");
  const auto &grid = paths.front().t;
  const auto idx = aldous_indices(grid, t, cfg);
  std::vector<AldousRecord> records;
  records.reserve(paths.size());
  for (const auto &p : paths) {
    if (p.t != grid) throw PreconditionError("paths must share a common grid");
    records.push_back(aldous_record(p.values, idx));
  }
  return aldous_reduce(records, cfg);
}

ConvergenceReport mollification_ladder(const LevyModel &model, const DriftSpec &a, const LadderConfig &cfg) {
  const auto &eps = cfg.eps;
  if (eps.size() < 3) throw PreconditionError("the ladder needs at least three rungs");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw PreconditionError("ladder widths must be > 0");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw PreconditionError("ladder must be strictly decreasing");
  }
  if (cfg.n_paths < 2) throw PreconditionError("need at least two paths");
  if (!(cfg.drift_tol > 0.0)) throw PreconditionError("drift gap threshold must be > 0");

  const std::size_t R = eps.size();
  std::vector<DriftSpec> drifts;
  for (double e : eps) drifts.push_back(mollify(a, e));
  const IncrementSampler sampler(model, cfg.sampler);
  const auto grid = time_grid(cfg.t_end, cfg.dt);
  const auto idx = aldous_indices(grid, cfg.t_end, cfg.aldous);
  const std::size_t n = cfg.n_paths;

  std::vector<std::vector<double>> terminal(R, std::vector<double>(n));
  std::vector<std::vector<double>> drift_end(R, std::vector<double>(n));
  std::vector<std::vector<double>> sup_gap(R - 1, std::vector<double>(n));
  std::vector<std::vector<AldousRecord>> records(R, std::vector<AldousRecord>(n));

  for_each_index(n, cfg.exec, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    std::vector<double> inc(grid.size() - 1);
    for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = sampler.draw(grid[k + 1] - grid[k], rng);
    std::vector<double> prev;
    for (std::size_t r = 0; r < R; ++r) {
      auto sol = euler_from_increments(grid, inc, drifts[r], cfg.x0);
      terminal[r][i] = sol.path.values.back();
      drift_end[r][i] = sol.drift_integral.back();
      records[r][i] = aldous_record(sol.path.values, idx);
      if (r > 0) {
        double g = 0.0;
        for (std::size_t k = 0; k < prev.size(); ++k) g = std::max(g, std::abs(sol.path.values[k] - prev[k]));
        sup_gap[r - 1][i] = g;
      }
      prev = std::move(sol.path.values);
    }
  });

  ConvergenceReport rep;
  rep.ladder = eps;
  for (std::size_t r = 0; r + 1 < R; ++r) {
    rep.pathwise_gap.push_back({quantile(sup_gap[r], 0.5), quantile(sup_gap[r], 0.9),
                                *std::max_element(sup_gap[r].begin(), sup_gap[r].end())});
    rep.ks_distances.push_back(ks_statistic(terminal[r], terminal[r + 1]));
    rep.ks_critical.push_back(ks_critical_value(n, n, 0.05));
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += std::abs(drift_end[r][i] - drift_end[r + 1][i]) > cfg.drift_tol;
    rep.drift_integral_gap.push_back(static_cast<double>(count) / static_cast<double>(n));
  }
  for (std::size_t r = 0; r < R; ++r) rep.aldous.push_back(aldous_reduce(records[r], cfg.aldous));
  rep.terminal = std::move(terminal);
  return rep;
}

} // namespace levylab
