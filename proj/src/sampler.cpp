#include "levylab/sampler.hpp"

#include "levylab/errors.hpp"
#include "levylab/stats.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace levylab {

namespace {

using boost::math::constants::pi;

// Inverse CDF of a density proportional to z^{-gamma} on [lo, hi].
double power_law_quantile(double lo, double hi, double gamma, double u) {
  if (!std::isfinite(gamma)) return lo + u * (hi - lo);
  const double e = 1.0 - gamma;
  if (std::abs(e) < 1e-10) return lo * std::pow(hi / lo, u);
  const double a = std::pow(lo, e), b = std::pow(hi, e);
  return std::pow(a + u * (b - a), 1.0 / e);
}

} // namespace

std::vector<double> time_grid(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw PreconditionError("time_grid needs t_end > 0 and dt > 0");
  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k < n; ++k) t[k] = static_cast<double>(k) * dt;
  t[n] = t_end;
  return t;
}

IncrementSampler::IncrementSampler(const LevyModel &model, const SamplerOptions &options)
    : model_(model), kind_(Kind::point_masses) {
  drift_per_time_ = -model.c();
  gauss_sd_per_sqrt_time_ = std::sqrt(model.Q());
  const auto &nu = model.measure();

  if (const auto *st = std::get_if<StableMeasure>(&nu)) {
    kind_ = Kind::stable;
    alpha_ = st->alpha;
    scale_ = st->scale;
    return;
  }
  if (const auto *pm = std::get_if<PointMasses>(&nu)) {
    kind_ = Kind::point_masses;
    atoms_ = pm->atoms;
    for (const auto &a : atoms_) jump_rate_ += a.weight;
    double acc = 0.0;
    for (const auto &a : atoms_) {
      acc += a.weight;
      cumulative_.push_back(acc / jump_rate_);
    }
    drift_per_time_ -= model.compensator_moment(0.0);
    return;
  }
  if (const auto &nj = model.normal_jumps()) {
    kind_ = Kind::normal_jumps;
    jump_rate_ = nj->rate;
    normal_mean_ = nj->mean;
    normal_sd_ = nj->sd;
    drift_per_time_ -= model.compensator_moment(0.0);
    return;
  }

  kind_ = Kind::truncated_density;
  const auto &d = std::get<DensityMeasure>(nu);
  const double delta = options.truncation;
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("truncation must lie in (0, 1)");
  const double p_tail = std::min(d.hints.tail_index, 50.0);
  using boost::math::quadrature::gauss_kronrod;

  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    auto side = [&](double z) { return d.density(sign * z); };
    // Extend the table until the remaining mass (estimated from the tail
    // index) is negligible.
    double cap = 10.0;
    while (cap < 1e12 && side(cap) * cap / p_tail > 1e-14) cap *= 10.0;
    const int ncells = static_cast<int>(std::ceil(std::log10(cap / delta) * options.cells_per_decade));
    const double ratio = std::pow(cap / delta, 1.0 / ncells);
    double lo = delta;
    for (int i = 0; i < ncells; ++i) {
      const double hi = (i + 1 == ncells) ? cap : lo * ratio;
      const double mass = gauss_kronrod<double, 15>::integrate(side, lo, hi, 4, 1e-11);
      if (mass > 0.0) {
        const double dl = side(lo), dh = side(hi);
        const double gamma = (dl > 0.0 && dh > 0.0) ? -std::log(dh / dl) / std::log(hi / lo)
                                                    : std::numeric_limits<double>::quiet_NaN();
        cells_.push_back({lo, hi, gamma, sign});
        total += mass;
        cumulative_.push_back(total);
      }
      lo = hi;
    }
  }
  jump_rate_ = total;
  for (auto &c : cumulative_) c /= total;
  drift_per_time_ -= model.compensator_moment(delta);
  neglected_variance_ = model.small_jump_variance(delta);
}

double IncrementSampler::stable_variate(RngStream &rng) const {
  const double v = pi<double>() * (rng.uniform() - 0.5);
  if (alpha_ == 1.0) return std::tan(v);
  const double w = rng.exponential();
  const double a = alpha_;
  return std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos(v - a * v) / w, (1.0 - a) / a);
}

double IncrementSampler::table_jump(RngStream &rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cells_.size() - 1);
  const auto &cell = cells_[idx];
  return cell.sign * power_law_quantile(cell.lo, cell.hi, cell.gamma, rng.uniform());
}

double IncrementSampler::draw(double dt, RngStream &rng) const {
  double x = drift_per_time_ * dt;
  if (gauss_sd_per_sqrt_time_ > 0.0) x += gauss_sd_per_sqrt_time_ * std::sqrt(dt) * rng.normal();
  switch (kind_) {
  case Kind::stable:
    x += scale_ * std::pow(dt, 1.0 / alpha_) * stable_variate(rng);
    break;
  case Kind::point_masses: {
    if (jump_rate_ <= 0.0) break;
    const auto n = rng.poisson(jump_rate_ * dt);
    for (std::uint64_t j = 0; j < n; ++j) {
      const double u = rng.uniform();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
      x += atoms_[idx].z;
    }
    break;
  }
  case Kind::normal_jumps: {
    const auto n = rng.poisson(jump_rate_ * dt);
    if (n > 0) {
      const double dn = static_cast<double>(n);
      x += dn * normal_mean_ + normal_sd_ * std::sqrt(dn) * rng.normal();
    }
    break;
  }
  case Kind::truncated_density: {
    const auto n = rng.poisson(jump_rate_ * dt);
    for (std::uint64_t j = 0; j < n; ++j) x += table_jump(rng);
    break;
  }
  }
  return x;
}

double sample_increment(const LevyModel &model, double dt, RngStream &rng) {
  if (!(dt > 0.0)) throw PreconditionError("sample_increment needs dt > 0");
  return IncrementSampler(model).draw(dt, rng);
}

SamplePath sample_path(const IncrementSampler &sampler, const std::vector<double> &t_grid, RngStream &rng) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw PreconditionError("time grid must start at 0");
  SamplePath path;
  path.t = t_grid;
  path.values.resize(t_grid.size());
  path.values[0] = 0.0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    if (!(dt > 0.0)) throw PreconditionError("time grid must be strictly increasing");
    path.values[k] = path.values[k - 1] + sampler.draw(dt, rng);
  }
  path.kind = PathKind::levy;
  return path;
}

SamplePath sample_path(const LevyModel &model, const std::vector<double> &t_grid, RngStream &rng) {
  return sample_path(IncrementSampler(model), t_grid, rng);
}

std::vector<double> sample_terminal_values(const IncrementSampler &sampler, double t, std::size_t steps,
                                           std::size_t n_paths, std::uint64_t seed, Exec exec) {
  if (steps == 0) throw PreconditionError("need at least one step per path");
  const double dt = t / static_cast<double>(steps);
  std::vector<double> out(n_paths);
  for_each_index(n_paths, exec, [&](std::size_t i) {
    RngStream rng(seed, i);
    double s = 0.0;
    for (std::size_t k = 0; k < steps; ++k) s += sampler.draw(dt, rng);
    out[i] = s;
  });
  return out;
}

EcfReport ecf_report(const LevyModel &model, const std::vector<double> &xi_grid, const EcfConfig &cfg,
                     const SamplerOptions &options) {
  if (cfg.n_paths < 10000) throw PreconditionError("ecf_report needs at least 1e4 paths");
  if (!(cfg.t > 0.0)) throw PreconditionError("ecf_report needs t > 0");
  const IncrementSampler sampler(model, options);
  const auto values = sample_terminal_values(sampler, cfg.t, cfg.steps, cfg.n_paths, cfg.seed, cfg.exec);

  EcfReport report;
  report.n_paths = cfg.n_paths;
  report.t = cfg.t;
  report.reference_line = 4.0 / std::sqrt(static_cast<double>(cfg.n_paths));
  std::vector<double> re(values.size()), im(values.size());
  const double n = static_cast<double>(values.size());
  for (double xi : xi_grid) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      re[i] = std::cos(xi * values[i]);
      im[i] = std::sin(xi * values[i]);
    }
    const std::complex<double> ecf(pairwise_sum(re) / n, pairwise_sum(im) / n);
    const std::complex<double> theory = std::exp(-cfg.t * model.psi(xi));
    const double dev = std::abs(ecf - theory);
    report.points.push_back({xi, ecf, theory, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

} // namespace levylab
