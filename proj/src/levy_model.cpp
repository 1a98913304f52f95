#include "levylab/levy_model.hpp"

#include "levylab/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace levylab {

namespace {

using boost::math::constants::pi;
using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-12;
// Adaptive pieces whose error estimate exceeds this are reported as failures.
constexpr double kAcceptTol = 1e-7;

// 1 - cos(u) without cancellation.
inline double one_minus_cos(double u) {
  const double s = std::sin(0.5 * u);
  return 2.0 * s * s;
}

// u - sin(u) without cancellation for small u.
inline double u_minus_sin(double u) {
  if (std::abs(u) < 0.1) {
    const double u2 = u * u;
    return u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)));
  }
  return u - std::sin(u);
}

template <class F>
double adaptive(F f, double a, double b, std::vector<double> &partials, const char *piece) {
  if (!(b > a)) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 18, kRelTol, &err, &l1);
  partials.push_back(v);
  if (!std::isfinite(v) || err > kAcceptTol * std::max(l1, 1e-300)) {
    throw QuadratureError(fmt::format("Levy-Khintchine quadrature did not converge on the {} piece "
                                      "[{:g}, {:g}] (estimate {:g}, error {:g})",
                                      piece, a, b, v, err),
                          partials);
  }
  return v;
}

// Non-adaptive Kronrod rules on pieces [z/2, z] covering [a, b]; the
// near-origin integrands behave like z^{1-beta} and span many orders of
// magnitude, which the adaptive error estimate handles poorly.
template <class F>
double adaptive_decades(F f, double a, double b, std::vector<double> &partials, const char *piece) {
  double total = 0.0, l1_total = 0.0, err_total = 0.0;
  for (double hi = b; hi > a;) {
    const double lo = std::max(a, 0.5 * hi);
    const double k = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0);
    const double g = boost::math::quadrature::gauss<double, 15>::integrate(f, lo, hi);
    total += k;
    err_total += std::abs(k - g);
    l1_total += std::abs(k);
    hi = lo;
  }
  partials.push_back(total);
  if (!std::isfinite(total) || err_total > kAcceptTol * std::max(l1_total, 1e-300))
    throw QuadratureError(fmt::format("Levy-Khintchine quadrature did not converge on the {} piece "
                                      "[{:g}, {:g}] (estimate {:g}, error {:g})",
                                      piece, a, b, total, err_total),
                          partials);
  return total;
}

struct OouraPair {
  boost::math::quadrature::ooura_fourier_cos<double> cos_{1e-12, 8};
  boost::math::quadrature::ooura_fourier_sin<double> sin_{1e-12, 8};
};

OouraPair &ooura() {
  thread_local OouraPair pair;
  return pair;
}

// Integrals over the half line z > 0 of a weight w with small-jump index beta:
//   re = int (1 - cos xi z) w(z) dz
//   im = int (xi z 1{z<1} - sin xi z) w(z) dz
// for xi > 0. Pieces: a Taylor piece [0, z0]; a non-oscillatory piece up to
// min(1, pi/xi) (and on to pi/xi when that exceeds 1); half-period panels on
// [pi/xi, 1]; an Ooura Fourier tail on [max(1, pi/xi), infinity).
template <class W>
std::pair<double, double> half_line(const W &w, double beta, double xi, bool want_im,
                                    std::vector<double> &partials) {
  const double period = pi<double>() / xi;
  const double b = std::min(1.0, period);
  const double z0 = 1e-6 * b;
  const double wz0 = w(z0);

  double re = xi * xi * wz0 * z0 * z0 * z0 / (2.0 * (2.0 - beta));
  double im = want_im ? xi * xi * xi * wz0 * z0 * z0 * z0 * z0 / (6.0 * (3.0 - beta)) : 0.0;
  partials.push_back(re);

  auto f_re = [&](double z) { return one_minus_cos(xi * z) * w(z); };
  auto f_im_inner = [&](double z) { return u_minus_sin(xi * z) * w(z); };
  auto f_im_outer = [&](double z) { return -std::sin(xi * z) * w(z); };

  re += adaptive_decades(f_re, z0, b, partials, "near-origin");
  if (want_im) im += adaptive_decades(f_im_inner, z0, b, partials, "near-origin");
  if (period > 1.0) {
    re += adaptive(f_re, 1.0, period, partials, "non-oscillatory");
    if (want_im) im += adaptive(f_im_outer, 1.0, period, partials, "non-oscillatory");
  }
  if (b < 1.0) {
    double panel_re = 0.0, panel_im = 0.0;
    for (double lo = b; lo < 1.0;) {
      const double hi = std::min(1.0, lo + period);
      panel_re += gauss_kronrod<double, 15>::integrate(f_re, lo, hi, 0, 0.0);
      if (want_im) panel_im += gauss_kronrod<double, 15>::integrate(f_im_inner, lo, hi, 0, 0.0);
      lo = hi;
    }
    partials.push_back(panel_re);
    re += panel_re;
    im += panel_im;
  }

  const double start = std::max(1.0, period);
  auto shifted = [&](double u) { return w(start + u); };
  double tail_err = 0.0, tail_l1 = 0.0;
  const double mass = boost::math::quadrature::exp_sinh<double>().integrate(w, start, kInf, kRelTol, &tail_err, &tail_l1);
  partials.push_back(mass);
  if (!std::isfinite(mass) || tail_err > kAcceptTol * std::max(tail_l1, 1e-300)) {
    throw QuadratureError(fmt::format("Levy measure tail mass beyond {:g} did not converge", start),
                          partials);
  }
  auto &oo = ooura();
  const auto [cz, cz_err] = oo.cos_.integrate(shifted, xi);
  const auto [sz, sz_err] = oo.sin_.integrate(shifted, xi);
  if (!std::isfinite(cz) || !std::isfinite(sz) || cz_err > kAcceptTol || sz_err > kAcceptTol) {
    partials.push_back(cz);
    partials.push_back(sz);
    throw QuadratureError(
        fmt::format("oscillatory tail at xi={:g} did not converge (rel. errors {:g}, {:g})", xi,
                    cz_err, sz_err),
        partials);
  }
  const double c0 = std::cos(xi * start), s0 = std::sin(xi * start);
  const double cos_tail = c0 * cz - s0 * sz;
  const double sin_tail = s0 * cz + c0 * sz;
  partials.push_back(mass - cos_tail);
  re += std::max(0.0, mass - cos_tail);
  im -= sin_tail;
  return {re, im};
}

// The integrands below vanish at the left end like z^{2-beta} but may produce
// 0 * inf there once z underflows.
template <class W> double tanh_sinh_01(const W &f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(
      [&](double z) {
        const double v = f(z);
        return std::isfinite(v) || z - a > 1e-100 ? v : 0.0;
      },
      a, b);
}

template <class W> double tail_mass(const W &w) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(w, 1.0, kInf);
}

double normal_truncated_first_moment(double mean, double sd) {
  // E[J; |J| < 1] for J ~ N(mean, sd^2).
  const double a = (-1.0 - mean) / sd, b = (1.0 - mean) / sd;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double Phi_b = 0.5 * boost::math::erfc(-b * inv_sqrt2);
  const double Phi_a = 0.5 * boost::math::erfc(-a * inv_sqrt2);
  auto dens = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * pi<double>()); };
  return mean * (Phi_b - Phi_a) + sd * (dens(a) - dens(b));
}

} // namespace

std::string to_string(ClosedForm form) {
  switch (form) {
  case ClosedForm::none:
    return "custom";
  case ClosedForm::symmetric_stable:
    return "symmetric_stable";
  case ClosedForm::compound_poisson:
    return "compound_poisson";
  }
  return "custom";
}

double stable_density_constant(double alpha) {
  return std::tgamma(1.0 + alpha) * std::sin(0.5 * pi<double>() * alpha) / pi<double>();
}

LevyModel::LevyModel(double c, double Q, LevyMeasure nu) : c_(c), Q_(Q), nu_(std::move(nu)) {
  if (std::holds_alternative<StableMeasure>(nu_)) closed_form_ = ClosedForm::symmetric_stable;
  if (std::holds_alternative<PointMasses>(nu_)) closed_form_ = ClosedForm::compound_poisson;
  validate();
}

LevyModel LevyModel::symmetric_stable(double alpha, double scale) {
  if (alpha == 2.0) {
    LevyModel m = gaussian(2.0 * scale * scale);
    m.closed_form_ = ClosedForm::symmetric_stable;
    return m;
  }
  return LevyModel(0.0, 0.0, StableMeasure{alpha, scale});
}

LevyModel LevyModel::compound_poisson(double rate, std::vector<PointMass> jump_law, double c) {
  if (!(rate >= 0.0)) throw PreconditionError("compound Poisson rate must be >= 0");
  double total = 0.0;
  for (const auto &a : jump_law) total += a.weight;
  if (!jump_law.empty() && std::abs(total - 1.0) > 1e-12)
    throw PreconditionError("compound Poisson jump probabilities must sum to 1");
  PointMasses pm;
  for (const auto &a : jump_law)
    if (rate * a.weight > 0.0) pm.atoms.push_back({a.z, rate * a.weight});
  return LevyModel(c, 0.0, std::move(pm));
}

LevyModel LevyModel::compound_poisson_normal(double rate, double mean, double sd, double c) {
  if (!(rate >= 0.0) || !(sd > 0.0))
    throw PreconditionError("compound Poisson with normal jumps needs rate >= 0 and sd > 0");
  DensityMeasure d;
  d.density = [rate, mean, sd](double z) {
    const double u = (z - mean) / sd;
    return rate * std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * pi<double>()));
  };
  d.hints = {-1.0, 50.0};
  d.symmetric = (mean == 0.0);
  LevyModel m(c, 0.0, std::move(d));
  m.closed_form_ = ClosedForm::compound_poisson;
  m.normal_jumps_ = NormalJumpLaw{rate, mean, sd};
  return m;
}

LevyModel LevyModel::gaussian(double Q, double c) { return LevyModel(c, Q, PointMasses{}); }

LevyModel LevyModel::tempered_stable(double weight, double alpha, double tempering, double c) {
  if (!(weight > 0.0) || !(alpha > 0.0 && alpha < 2.0) || !(tempering > 0.0))
    throw PreconditionError("tempered stable needs weight > 0, alpha in (0,2), tempering > 0");
  DensityMeasure d;
  d.density = [weight, alpha, tempering](double z) {
    const double a = std::abs(z);
    return weight * std::exp(-tempering * a) * std::pow(a, -1.0 - alpha);
  };
  d.hints = {alpha, 50.0};
  d.symmetric = true;
  return LevyModel(c, 0.0, std::move(d));
}

void LevyModel::validate() {
  if (!(Q_ >= 0.0) || !std::isfinite(Q_)) throw PreconditionError("Gaussian coefficient Q must be >= 0");
  if (!std::isfinite(c_)) throw PreconditionError("drift coefficient c must be finite");

  if (const auto *pm = std::get_if<PointMasses>(&nu_)) {
    double mass = 0.0;
    for (const auto &a : pm->atoms) {
      if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
        throw PreconditionError("point mass weights must be finite and >= 0");
      if (a.z == 0.0 || !std::isfinite(a.z))
        throw PreconditionError("point masses must sit at finite nonzero jump sizes");
      mass += a.weight * std::min(1.0, a.z * a.z);
    }
    integrability_mass_ = mass;
    return;
  }
  if (const auto *st = std::get_if<StableMeasure>(&nu_)) {
    if (!(st->alpha > 0.0 && st->alpha < 2.0))
      throw PreconditionError("stable index alpha must lie in (0, 2)");
    if (!(st->scale > 0.0)) throw PreconditionError("stable scale must be > 0");
    const double k = stable_density_constant(st->alpha) * std::pow(st->scale, st->alpha);
    integrability_mass_ = 2.0 * k * (1.0 / (2.0 - st->alpha) + 1.0 / st->alpha);
    return;
  }
  const auto &d = std::get<DensityMeasure>(nu_);
  if (!d.density) throw PreconditionError("density measure needs a density callable");
  if (!(d.hints.small_jump_index < 2.0))
    throw PreconditionError("density must satisfy int z^2 nu(dz) < inf near 0 (small-jump index < 2)");
  if (!(d.hints.tail_index > 0.0))
    throw PreconditionError("density must be integrable at infinity (tail index > 0)");
  for (double z = 1e-6; z < 1e6; z *= 1.7) {
    const double up = d.density(z), down = d.density(-z);
    if (!(up >= 0.0) || !(down >= 0.0))
      throw PreconditionError(fmt::format("Levy density is negative or NaN at z={:g}", up >= 0.0 ? -z : z));
  }
  auto both = [&](double z) { return d.density(z) + d.density(-z); };
  const double near = tanh_sinh_01([&](double z) { return z * z * both(z); }, 0.0, 1.0);
  const double far = tail_mass(both);
  integrability_mass_ = near + far;
  if (!std::isfinite(integrability_mass_))
    throw PreconditionError("int (1 ^ z^2) nu(dz) is not finite for the given density");
}

double LevyModel::small_jump_variance(double delta) const {
  if (!(delta > 0.0)) return 0.0;
  if (const auto *pm = std::get_if<PointMasses>(&nu_)) {
    double v = 0.0;
    for (const auto &a : pm->atoms)
      if (std::abs(a.z) < delta) v += a.z * a.z * a.weight;
    return v;
  }
  if (const auto *st = std::get_if<StableMeasure>(&nu_)) {
    const double k = stable_density_constant(st->alpha) * std::pow(st->scale, st->alpha);
    return 2.0 * k * std::pow(delta, 2.0 - st->alpha) / (2.0 - st->alpha);
  }
  const auto &d = std::get<DensityMeasure>(nu_);
  return tanh_sinh_01([&](double z) { return z * z * (d.density(z) + d.density(-z)); }, 0.0, delta);
}

double LevyModel::compensator_moment(double delta) const {
  delta = std::max(delta, 0.0);
  if (delta >= 1.0) return 0.0;
  if (const auto *pm = std::get_if<PointMasses>(&nu_)) {
    double m = 0.0;
    for (const auto &a : pm->atoms)
      if (std::abs(a.z) >= delta && std::abs(a.z) < 1.0) m += a.z * a.weight;
    return m;
  }
  if (std::holds_alternative<StableMeasure>(nu_)) return 0.0;
  const auto &d = std::get<DensityMeasure>(nu_);
  if (d.symmetric) return 0.0;
  auto odd = [&d](double z) { return z * (d.density(z) - d.density(-z)); };
  if (delta == 0.0) return tanh_sinh_01(odd, 0.0, 1.0);
  return gauss_kronrod<double, 31>::integrate(odd, delta, 1.0, 15, 1e-13);
}

std::complex<double> LevyModel::psi(double xi) const {
  if (xi == 0.0) return {0.0, 0.0};
  if (xi < 0.0) return std::conj(psi(-xi));
  const double gauss = 0.5 * Q_ * xi * xi;
  switch (closed_form_) {
  case ClosedForm::symmetric_stable: {
    if (const auto *st = std::get_if<StableMeasure>(&nu_))
      return {gauss + std::pow(st->scale * xi, st->alpha), c_ * xi};
    return {gauss, c_ * xi};
  }
  case ClosedForm::compound_poisson: {
    if (normal_jumps_) {
      const auto &n = *normal_jumps_;
      const double damp = std::exp(-0.5 * n.sd * n.sd * xi * xi);
      const double m1 = normal_truncated_first_moment(n.mean, n.sd);
      // rate * (1 - e^{i mu xi - sd^2 xi^2/2}) + i xi rate m1; 1 - damp*cos
      // computed as (1 - damp) + damp (1 - cos) to keep precision at small xi.
      const double re = n.rate * (-std::expm1(-0.5 * n.sd * n.sd * xi * xi) +
                                  damp * one_minus_cos(n.mean * xi));
      const double im = n.rate * (xi * m1 - damp * std::sin(n.mean * xi));
      return {gauss + re, c_ * xi + im};
    }
    return psi_quadrature(xi);
  }
  case ClosedForm::none:
    break;
  }
  return psi_quadrature(xi);
}

std::complex<double> LevyModel::psi_quadrature(double xi) const {
  if (xi == 0.0) return {0.0, 0.0};
  if (xi < 0.0) return std::conj(psi_quadrature(-xi));
  double re = 0.5 * Q_ * xi * xi;
  double im = c_ * xi;

  if (const auto *pm = std::get_if<PointMasses>(&nu_)) {
    for (const auto &a : pm->atoms) {
      re += a.weight * one_minus_cos(xi * a.z);
      const double comp = std::abs(a.z) < 1.0 ? xi * a.z : 0.0;
      im += a.weight * (comp - std::sin(xi * a.z));
    }
    return {re, im};
  }

  std::vector<double> partials;
  if (const auto *st = std::get_if<StableMeasure>(&nu_)) {
    const double k = stable_density_constant(st->alpha) * std::pow(st->scale, st->alpha);
    const double expo = -1.0 - st->alpha;
    auto w = [k, expo](double z) { return k * std::pow(z, expo); };
    re += 2.0 * half_line(w, st->alpha, xi, false, partials).first;
    return {re, im};
  }

  const auto &d = std::get<DensityMeasure>(nu_);
  const double beta = d.hints.small_jump_index;
  if (d.symmetric) {
    auto w = [&d](double z) { return d.density(z); };
    re += 2.0 * half_line(w, beta, xi, false, partials).first;
    return {re, im};
  }
  auto w_sum = [&d](double z) { return d.density(z) + d.density(-z); };
  auto w_diff = [&d](double z) { return d.density(z) - d.density(-z); };
  re += half_line(w_sum, beta, xi, false, partials).first;
  im += half_line(w_diff, beta, xi, true, partials).second;
  return {re, im};
}

std::string LevyModel::describe() const {
  std::string measure;
  if (const auto *st = std::get_if<StableMeasure>(&nu_)) {
    measure = fmt::format("stable(alpha={:g}, scale={:g})", st->alpha, st->scale);
  } else if (const auto *pm = std::get_if<PointMasses>(&nu_)) {
    measure = fmt::format("point_masses(n={})", pm->atoms.size());
  } else if (normal_jumps_) {
    measure = fmt::format("normal_jumps(rate={:g}, mean={:g}, sd={:g})", normal_jumps_->rate,
                          normal_jumps_->mean, normal_jumps_->sd);
  } else {
    measure = "density";
  }
  return fmt::format("LevyModel(c={:g}, Q={:g}, nu={}, closed_form={})", c_, Q_, measure,
                     to_string(closed_form_));
}

LevyModel LevyModel::without_closed_form() const {
  LevyModel m = *this;
  m.closed_form_ = ClosedForm::none;
  return m;
}

} // namespace levylab
