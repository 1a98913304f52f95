#include "levylab/sde.hpp"

#include "levylab/errors.hpp"

#include <cmath>

namespace levylab {

namespace {

void check_config(const SolveConfig &cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw PreconditionError("solver needs t_end > 0 and dt > 0");
  if (!std::isfinite(cfg.x0)) throw PreconditionError("solver needs a finite x0");
}

} // namespace

EulerSolution euler_from_increments(const std::vector<double> &t_grid, const std::vector<double> &increments,
                                    const DriftSpec &a, double x0) {
  if (t_grid.empty() || increments.size() + 1 != t_grid.size())
    throw PreconditionError("increments must have one entry per grid interval");
  EulerSolution sol;
  sol.path.t = t_grid;
  sol.path.kind = PathKind::solution;
  sol.path.values.resize(t_grid.size());
  sol.drift_integral.resize(t_grid.size());
  sol.increments = increments;
  EulerStepper st{x0};
  sol.path.values[0] = st.x();
  sol.drift_integral[0] = 0.0;
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    st.step(a, t_grid[k], t_grid[k + 1] - t_grid[k], increments[k]);
    sol.path.values[k + 1] = st.x();
    sol.drift_integral[k + 1] = st.y;
  }
  return sol;
}

EulerSolution euler_solve(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg, RngStream &rng) {
  check_config(cfg);
  const auto t = time_grid(cfg.t_end, cfg.dt);
  std::vector<double> inc(t.size() - 1);
  for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = sampler.draw(t[k + 1] - t[k], rng);
  return euler_from_increments(t, inc, a, cfg.x0);
}

std::vector<double> coarsen_increments(const std::vector<double> &fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0) throw PreconditionError("coarsening factor must divide the step count");
  std::vector<double> out(fine.size() / factor, 0.0);
  for (std::size_t i = 0; i < fine.size(); ++i) out[i / factor] += fine[i];
  return out;
}

std::vector<EulerSolution> euler_batch(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg,
                                       Exec exec) {
  check_config(cfg);
  std::vector<EulerSolution> out(cfg.n_paths);
  for_each_index(cfg.n_paths, exec, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    out[i] = euler_solve(sampler, a, cfg, rng);
  });
  return out;
}

std::vector<double> euler_terminal_values(const IncrementSampler &sampler, const DriftSpec &a, const SolveConfig &cfg,
                                          Exec exec) {
  check_config(cfg);
  const auto t = time_grid(cfg.t_end, cfg.dt);
  std::vector<double> out(cfg.n_paths);
  for_each_index(cfg.n_paths, exec, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    EulerStepper st{cfg.x0};
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const double h = t[k + 1] - t[k];
      st.step(a, t[k], h, sampler.draw(h, rng));
    }
    out[i] = st.x();
  });
  return out;
}

double tau_m(const SamplePath &path, double m) {
  for (std::size_t k = 0; k < path.values.size(); ++k)
    if (std::abs(path.values[k]) >= m) return path.t[k];
  return std::numeric_limits<double>::infinity();
}

} // namespace levylab
