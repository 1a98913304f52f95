#include "levylab/krylov.hpp"

#include "levylab/errors.hpp"
#include "levylab/fourier.hpp"
#include "levylab/sde.hpp"
#include "levylab/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace levylab {

KrylovContext make_krylov_context(const LevyModel &model, double K, LambdaPolicy policy, double lambda_value,
                                  const DyadicGrid &grid) {
  if (!(K >= 0.0) || !std::isfinite(K)) throw PreconditionError("drift bound K must be finite and >= 0");
  if (!(lambda_value > 0.0) || !std::isfinite(lambda_value)) throw PreconditionError("lambda must be finite and > 0");
  KrylovContext ctx{model, 0.0, 1.0, 0.0, {}, 0.0, 0.0};
  ctx.K = K;
  ctx.lambda0 = lambda0(model, K, grid);
  if (policy == LambdaPolicy::fixed) {
    if (lambda_value < ctx.lambda0)
      throw PreconditionError(
          fmt::format("lambda = {} is below lambda0 = {} for K = {}; the estimate is only asserted for lambda >= lambda0",
                      lambda_value, ctx.lambda0, K));
    ctx.lambda = lambda_value;
  } else {
    ctx.lambda = std::max(ctx.lambda0, lambda_value);
  }
  ctx.n1 = n1_constant(model, ctx.lambda, grid);
  ctx.reference = reference_constant(ctx.n1);
  ctx.resolvent_constant = std::sqrt(ctx.n1.value) / (2.0 * std::numbers::pi);
  return ctx;
}

std::string verdict_string(const KrylovReport &r) { return r.pass ? "pass" : "fail"; }

Horizon choose_horizon(const TestFunction &f, double t0, double lambda, double reference, double tolerance,
                       double fixed_horizon) {
  if (!(lambda > 0.0)) throw PreconditionError("horizon rule needs lambda > 0");
  const double support_end = f.support().t1 - t0;
  Horizon h;
  if (f.sup() == 0.0 || support_end <= 0.0) return h;
  if (fixed_horizon > 0.0) {
    h.T = fixed_horizon;
  } else {
    const double target = tolerance * reference * l2_norm(f);
    const double rule = target > 0.0 ? std::log(f.sup() / (lambda * target)) / lambda : support_end;
    h.T = std::min(support_end, std::max(rule, 0.0));
    if (h.T <= 0.0) h.T = std::min(support_end, 1.0 / lambda);
  }
  h.truncation_bound = h.T >= support_end ? 0.0 : f.sup() * std::exp(-lambda * h.T) / lambda;
  return h;
}

std::vector<std::vector<double>> discounted_occupation(const IncrementSampler &sampler, const DriftSpec &a,
                                                       const std::vector<KrylovProbe> &probes, double lambda,
                                                       const std::vector<double> &horizons, const McConfig &cfg) {
  if (horizons.size() != probes.size()) throw PreconditionError("one horizon per probe required");
  if (!(cfg.dt > 0.0)) throw PreconditionError("dt must be > 0");
  const std::size_t np = probes.size();
  std::vector<std::vector<double>> out(np, std::vector<double>(cfg.n_paths, 0.0));
  double t_max = 0.0;
  for (double T : horizons) t_max = std::max(t_max, T);
  if (t_max <= 0.0 || np == 0) return out;

  const auto grid = time_grid(t_max, cfg.dt);
  const std::size_t n_nodes = grid.size();
  std::vector<double> discount(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) discount[k] = std::exp(-lambda * grid[k]);
  // Last node index per probe: horizon rounded to the grid.
  std::vector<std::size_t> last(np);
  for (std::size_t j = 0; j < np; ++j) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), horizons[j] - 1e-12 * t_max);
    last[j] = horizons[j] <= 0.0 ? 0 : static_cast<std::size_t>(it - grid.begin());
  }

  for_each_index(cfg.n_paths, cfg.exec, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    EulerStepper st{0.0};
    std::vector<double> prev(np), acc(np, 0.0);
    for (std::size_t j = 0; j < np; ++j) prev[j] = probes[j].f(probes[j].t0, probes[j].x0 + st.x());
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
      const double h = grid[k + 1] - grid[k];
      st.step(a, grid[k], h, sampler.draw(h, rng));
      const double x = st.x();
      for (std::size_t j = 0; j < np; ++j) {
        if (k + 1 > last[j]) continue;
        const double g = probes[j].f(probes[j].t0 + grid[k + 1], probes[j].x0 + x);
        acc[j] += 0.5 * h * (discount[k] * prev[j] + discount[k + 1] * g);
        prev[j] = g;
      }
    }
    for (std::size_t j = 0; j < np; ++j) out[j][i] = acc[j];
  });
  return out;
}

namespace {

void finish_report(KrylovReport &r, std::span<const double> values) {
  const auto est = estimate_mean(values);
  r.lhs_estimate = est.mean;
  r.lhs_ci_halfwidth = est.ci_halfwidth;
  if (r.rhs_norm > 0.0)
    r.ratio = r.lhs_estimate / r.rhs_norm;
  else
    r.ratio = r.lhs_estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  r.pass = r.lhs_estimate - r.lhs_ci_halfwidth <= r.reference_constant * r.rhs_norm + r.truncation_bound;
}

void check_drift(const KrylovContext &ctx, const DriftSpec &a) {
  if (a.K() > ctx.K * (1.0 + 1e-12))
    throw PreconditionError(fmt::format("drift bound {} exceeds the K = {} used for lambda0", a.K(), ctx.K));
}

} // namespace

std::vector<KrylovReport> bound_sweep(const KrylovContext &ctx, const DriftSpec &a,
                                      const std::vector<KrylovProbe> &probes, const McConfig &cfg) {
  check_drift(ctx, a);
  if (ctx.lambda < ctx.lambda0) throw PreconditionError("lambda below lambda0");
  if (cfg.n_paths < 2) throw PreconditionError("need at least two paths for a confidence interval");
  std::vector<KrylovReport> reports(probes.size());
  std::vector<double> horizons(probes.size());
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const auto &p = probes[j];
    Horizon h = choose_horizon(p.f, p.t0, ctx.lambda, ctx.reference, cfg.truncation_tolerance, cfg.horizon);
    if (h.T > 0.0 && h.truncation_bound > 0.0) {
      // Round up to the grid; a longer horizon only tightens the bound.
      h.T = std::ceil(h.T / cfg.dt - 1e-9) * cfg.dt;
      h.truncation_bound = h.T >= p.f.support().t1 - p.t0 ? 0.0 : p.f.sup() * std::exp(-ctx.lambda * h.T) / ctx.lambda;
    }
    horizons[j] = h.T;
    auto &r = reports[j];
    r.experiment_id = p.id;
    r.lambda = ctx.lambda;
    r.horizon = h.T;
    r.truncation_bound = h.truncation_bound;
    r.rhs_norm = l2_norm(p.f);
    r.reference_constant = ctx.reference;
  }
  const IncrementSampler sampler(ctx.model, cfg.sampler);
  const auto values = discounted_occupation(sampler, a, probes, ctx.lambda, horizons, cfg);
  for (std::size_t j = 0; j < probes.size(); ++j) finish_report(reports[j], values[j]);
  return reports;
}

KrylovReport krylov_mc(const KrylovContext &ctx, const DriftSpec &a, const KrylovProbe &probe, const McConfig &cfg) {
  return bound_sweep(ctx, a, {probe}, cfg).front();
}

std::vector<KrylovProbe> builtin_sweep() {
  std::vector<KrylovProbe> out;
  for (double d : {1.0, 0.5, 0.25})
    out.push_back({fmt::format("box_d{}", d), TestFunction::indicator({0.0, d, 0.0, d})});
  out.push_back({"box_t1_x2", TestFunction::indicator({0.0, 1.0, -1.0, 1.0})});
  out.push_back({"box_shifted_t", TestFunction::indicator({0.5, 1.5, -0.5, 0.5})});
  out.push_back({"box_offset_x", TestFunction::indicator({0.0, 2.0, 1.0, 2.0})});
  out.push_back({"box_thin", TestFunction::indicator({0.0, 0.1, -0.1, 0.1})});
  out.push_back({"bump_centered", TestFunction::gaussian_bump(1.0, 0.0, 0.15, 0.3)});
  out.push_back({"bump_offset", TestFunction::gaussian_bump(1.5, 0.5, 0.2, 0.3)});
  out.push_back({"box_d1_x10", TestFunction::indicator({0.0, 1.0, 0.0, 1.0}).scaled(10.0)});
  return out;
}

std::vector<double> local_occupation(const IncrementSampler &sampler, const DriftSpec &a, const TestFunction &f,
                                     double m, double t, double x0, const McConfig &cfg) {
  if (!(m > 0.0) || !(t > 0.0)) throw PreconditionError("local estimate needs m > 0 and t > 0");
  std::vector<double> out(cfg.n_paths, 0.0);
  if (std::abs(x0) >= m) return out;
  const auto grid = time_grid(t, cfg.dt);
  for_each_index(cfg.n_paths, cfg.exec, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    EulerStepper st{x0};
    double prev = f(0.0, st.x());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double h = grid[k + 1] - grid[k];
      st.step(a, grid[k], h, sampler.draw(h, rng));
      const double x = st.x();
      if (std::abs(x) >= m) {
        acc += h * prev;
        break;
      }
      const double g = f(grid[k + 1], x);
      acc += 0.5 * h * (prev + g);
      prev = g;
    }
    out[i] = acc;
  });
  return out;
}

KrylovReport krylov_local_mc(const KrylovContext &ctx, const DriftSpec &a, const TestFunction &f, double m, double t,
                             double x0, const McConfig &cfg, std::string id) {
  check_drift(ctx, a);
  const IncrementSampler sampler(ctx.model, cfg.sampler);
  const auto values = local_occupation(sampler, a, f, m, t, x0, cfg);
  KrylovReport r;
  r.experiment_id = std::move(id);
  r.lambda = 0.0;
  r.horizon = t;
  r.rhs_norm = l2_norm_local(f, m, t);
  r.reference_constant = ctx.reference;
  finish_report(r, values);
  return r;
}

double ResolventField::at(double t, double x) const {
  const auto &tg = grid.t;
  const auto &xg = grid.x;
  const double ft = (t - tg.origin) / tg.step, fx = (x - xg.origin) / xg.step;
  if (ft < 0.0 || fx < 0.0 || ft > static_cast<double>(tg.size - 1) || fx > static_cast<double>(xg.size - 1))
    throw PreconditionError("resolvent field queried outside its grid");
  const auto it = std::min(static_cast<std::size_t>(ft), tg.size - 2);
  const auto ix = std::min(static_cast<std::size_t>(fx), xg.size - 2);
  const double wt = ft - static_cast<double>(it), wx = fx - static_cast<double>(ix);
  return (1 - wt) * ((1 - wx) * grid(it, ix) + wx * grid(it, ix + 1)) +
         wt * ((1 - wx) * grid(it + 1, ix) + wx * grid(it + 1, ix + 1));
}

ResolventField resolvent_oracle(const LevyModel &model, const TestFunction &f, double lambda, const OracleGrid &og) {
  if (!(lambda > 0.0)) throw PreconditionError("resolvent needs lambda > 0");
  if (og.nt < 8 || og.nx < 8) throw PreconditionError("oracle grid too small");
  const Box &b = f.support();
  const double dt = b.width_t(), dx = b.width_x();
  if (og.t_lo > b.t0 - 2 * dt || og.t_hi < b.t1 + 2 * dt || og.x_lo > b.x0 - 2 * dx || og.x_hi < b.x1 + 2 * dx)
    throw PreconditionError(fmt::format(
        "oracle grid [{}, {}] x [{}, {}] must pad the support [{}, {}] x [{}, {}] by twice its diameter", og.t_lo,
        og.t_hi, og.x_lo, og.x_hi, b.t0, b.t1, b.x0, b.x1));
  const UniformGrid tg = og.t_grid(), xg = og.x_grid();
  ResolventField field;
  field.lambda = lambda;
  field.grid = GridFunction::sample(tg, xg, [&](double t, double x) { return f(t, x); });

  // Per spatial frequency, v^(t) = int_0^inf e^{-z s} f^(t + s) ds with
  // z = lambda + psi(-xi), integrated backwards from t_hi exactly for f^
  // linear between time nodes. This avoids ringing at time jumps of f.
  const double h = tg.step;
  field.grid.values = transform_x_columns(field.grid.values, og.nt, og.nx, xg.step,
                                          [&](double xi, std::vector<std::complex<double>> &col) {
    const std::complex<double> w = (lambda + std::conj(model.psi(xi))) * h;
    const std::complex<double> decay = std::exp(-w);
    std::complex<double> i0, i1; // (1 - e^{-w}) / w and (1 - e^{-w}(1 + w)) / w^2
    if (std::abs(w) < 0.1) {
      std::complex<double> term = 1.0;
      double f0 = 1.0, f1 = 2.0; // (k+1)! and (k+2)!
      for (int k = 0; k < 10; ++k) {
        i0 += term / f0;
        i1 += term * static_cast<double>(k + 1) / f1;
        term *= -w;
        f0 *= k + 2;
        f1 *= k + 3;
      }
    } else {
      i0 = (1.0 - decay) / w;
      i1 = (1.0 - decay * (1.0 + w)) / (w * w);
    }
    const std::complex<double> wb = h * i1, wa = h * i0 - wb;
    std::complex<double> next = 0.0, f_next = col.back();
    col.back() = 0.0;
    for (std::size_t j = og.nt - 1; j-- > 0;) {
      const std::complex<double> f_here = col[j];
      next = decay * next + wa * f_here + wb * f_next;
      col[j] = next;
      f_next = f_here;
    }
  });
  return field;
}

} // namespace levylab
