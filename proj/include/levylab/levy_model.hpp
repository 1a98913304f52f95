#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace levylab {

/// An atom of a Lévy measure: mass `weight` placed at jump size `z`.
struct PointMass {
  double z;
  double weight;
};

struct PointMasses {
  std::vector<PointMass> atoms;
};

/// Integrability hints for a Lévy density, used by the quadrature near the
/// origin and at infinity.
struct DensityHints {
  /// nu(z) ~ |z|^{-1-beta} as z -> 0. Bounded densities use beta = -1.
  double small_jump_index = -1.0;
  /// nu(z) = O(|z|^{-1-p}) as |z| -> infinity (use a large value for
  /// exponential decay).
  double tail_index = 1.0;
};

struct DensityMeasure {
  std::function<double(double)> density;
  DensityHints hints;
  bool symmetric = false;
};

/// nu(dz) = C_alpha * scale^alpha * |z|^{-1-alpha} dz, normalized so that the
/// exponent is (scale*|xi|)^alpha.
struct StableMeasure {
  double alpha;
  double scale = 1.0;
};

using LevyMeasure = std::variant<PointMasses, DensityMeasure, StableMeasure>;

enum class ClosedForm { none, symmetric_stable, compound_poisson };

std::string to_string(ClosedForm form);

/// Normalizing constant C_alpha of the symmetric stable Lévy density.
double stable_density_constant(double alpha);

/// A one-dimensional Lévy process given by its characteristic triple (c, Q, nu)
/// with E exp(i xi S_t) = exp(-t psi(xi)) and
///
///   psi(xi) = i c xi + Q xi^2 / 2 + int (1 - e^{i xi z} + i xi z 1{|z|<1}) nu(dz).
///
/// Immutable after construction; every member function is thread-safe.
class LevyModel {
public:
  /// Validates Q >= 0 and int (1 ^ z^2) nu(dz) < infinity.
  LevyModel(double c, double Q, LevyMeasure nu);

  static LevyModel symmetric_stable(double alpha, double scale = 1.0);
  /// Compound Poisson with the given jump law (probabilities summing to one).
  static LevyModel compound_poisson(double rate, std::vector<PointMass> jump_law, double c = 0.0);
  /// Compound Poisson with N(mean, sd^2) jumps.
  static LevyModel compound_poisson_normal(double rate, double mean, double sd, double c = 0.0);
  /// Brownian part only: psi = i c xi + Q xi^2 / 2.
  static LevyModel gaussian(double Q, double c = 0.0);
  /// Symmetric tempered stable density weight * e^{-tempering |z|} |z|^{-1-alpha};
  /// no closed form is attached, so psi goes through quadrature.
  static LevyModel tempered_stable(double weight, double alpha, double tempering, double c = 0.0);

  /// Characteristic exponent. Uses the closed form when one is attached,
  /// otherwise the Lévy–Khintchine quadrature.
  std::complex<double> psi(double xi) const;
  double re_psi(double xi) const { return psi(xi).real(); }

  /// Lévy–Khintchine integral regardless of any closed form. Throws
  /// QuadratureError when an adaptive piece misses its tolerance.
  std::complex<double> psi_quadrature(double xi) const;

  double c() const { return c_; }
  double Q() const { return Q_; }
  const LevyMeasure &measure() const { return nu_; }
  ClosedForm closed_form() const { return closed_form_; }

  struct NormalJumpLaw {
    double rate;
    double mean;
    double sd;
  };
  const std::optional<NormalJumpLaw> &normal_jumps() const { return normal_jumps_; }

  /// int (1 ^ z^2) nu(dz).
  double integrability_mass() const { return integrability_mass_; }
  /// int_{|z| < delta} z^2 nu(dz): variance of the jumps a truncated sampler drops.
  double small_jump_variance(double delta) const;
  /// int_{delta <= |z| < 1} z nu(dz): compensator of the jumps at least delta.
  double compensator_moment(double delta) const;

  /// Copy that evaluates psi by quadrature even when a closed form exists.
  LevyModel without_closed_form() const;

  std::string describe() const;

private:
  LevyModel() = default;
  void validate();

  double c_ = 0.0;
  double Q_ = 0.0;
  LevyMeasure nu_ = PointMasses{};
  ClosedForm closed_form_ = ClosedForm::none;
  std::optional<NormalJumpLaw> normal_jumps_;
  double integrability_mass_ = 0.0;
};

} // namespace levylab
