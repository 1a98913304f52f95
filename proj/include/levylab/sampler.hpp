#pragma once

#include "levylab/levy_model.hpp"
#include "levylab/parallel.hpp"
#include "levylab/rng.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace levylab {

enum class PathKind { levy, solution };

/// One realized trajectory on a time grid; values[k] is the state at t[k]
/// (right-continuous convention).
struct SamplePath {
  std::vector<double> t;
  std::vector<double> values;
  PathKind kind = PathKind::levy;
};

/// Uniform grid 0, dt, 2dt, ..., t_end (the last step is shortened if dt does
/// not divide t_end).
std::vector<double> time_grid(double t_end, double dt);

struct SamplerOptions {
  /// Jumps smaller than this are dropped by the truncated sampler for general
  /// densities; their compensator drift is kept exactly.
  double truncation = 1e-3;
  /// Cells per decade of the tabulated jump law.
  int cells_per_decade = 64;
};

/// Draws increments S_{t+dt} - S_t for a fixed model. Construction precomputes
/// whatever the model needs (jump tables for general densities), so build one
/// per model and share it: draw() is const and thread-safe.
///
///  * symmetric stable: Chambers–Mallows–Stuck transform, exact;
///  * point masses: Poisson count plus atom draws, exact;
///  * normal jumps: Poisson count N plus one N(N mean, N sd^2) draw, exact;
///  * other densities: jumps with |z| >= truncation as compound Poisson from a
///    tabulated law, plus the exact compensator drift of the retained jumps.
/// A Gaussian part Q and the linear coefficient c are added in every case.
class IncrementSampler {
public:
  explicit IncrementSampler(const LevyModel &model, const SamplerOptions &options = {});

  double draw(double dt, RngStream &rng) const;

  /// Variance of the dropped small jumps per unit time (0 for exact samplers).
  double neglected_variance() const { return neglected_variance_; }
  bool exact() const { return kind_ != Kind::truncated_density; }
  const LevyModel &model() const { return model_; }

private:
  enum class Kind { stable, point_masses, normal_jumps, truncated_density };

  struct JumpCell {
    double lo, hi;   // |z| range
    double gamma;    // local power-law exponent of the density
    double sign;     // +1 or -1
  };

  double stable_variate(RngStream &rng) const;
  double table_jump(RngStream &rng) const;

  LevyModel model_;
  Kind kind_;
  double drift_per_time_ = 0.0; // -c minus compensators of retained jumps
  double gauss_sd_per_sqrt_time_ = 0.0;
  double jump_rate_ = 0.0;
  double alpha_ = 0.0, scale_ = 0.0;
  double normal_mean_ = 0.0, normal_sd_ = 0.0;
  std::vector<PointMass> atoms_;
  std::vector<double> cumulative_; // normalized cumulative jump probabilities
  std::vector<JumpCell> cells_;
  double neglected_variance_ = 0.0;
};

/// One increment over dt; builds a sampler each call (convenient, not fast).
double sample_increment(const LevyModel &model, double dt, RngStream &rng);

/// Cumulative sum of independent increments over consecutive grid intervals,
/// starting from 0.
SamplePath sample_path(const IncrementSampler &sampler, const std::vector<double> &t_grid, RngStream &rng);
SamplePath sample_path(const LevyModel &model, const std::vector<double> &t_grid, RngStream &rng);

struct EcfPoint {
  double xi;
  std::complex<double> ecf;
  std::complex<double> theory;
  double abs_dev;
};

struct EcfReport {
  std::vector<EcfPoint> points;
  double max_deviation = 0.0;
  double reference_line = 0.0; // 4 / sqrt(n)
  std::size_t n_paths = 0;
  double t = 0.0;
};

struct EcfConfig {
  double t = 1.0;
  std::size_t n_paths = 200000;
  std::size_t steps = 1;  // increments per path
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
};

/// Compares the empirical characteristic function of S_t with exp(-t psi(xi))
/// on xi_grid. Requires n_paths >= 1e4.
EcfReport ecf_report(const LevyModel &model, const std::vector<double> &xi_grid, const EcfConfig &cfg,
                     const SamplerOptions &options = {});

/// Terminal values S_t of n independent paths (path i uses stream i).
std::vector<double> sample_terminal_values(const IncrementSampler &sampler, double t, std::size_t steps,
                                           std::size_t n_paths, std::uint64_t seed, Exec exec);

} // namespace levylab
