#pragma once

#include "levylab/grid.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levylab {

enum class DriftFamily { constant, sign_x, checkerboard, table, mollified, custom };

std::string to_string(DriftFamily f);

/// A bounded measurable drift a(t, x) with certified bound |a| <= K.
///
/// Built-in discontinuous families have their discontinuity sets on lines
/// x = const and t = const, reported by x_breaks / t_breaks so that
/// mollification can integrate each smooth piece separately. Cheap to copy
/// (shared immutable state).
class DriftSpec {
public:
  /// a = value, K = |value|.
  static DriftSpec constant(double value);
  /// a = K sign(x), with sign(0) = 0.
  static DriftSpec sign_x(double K);
  /// a = K sign(sin(pi t / period_t)) sign(sin(pi x / period_x)).
  static DriftSpec checkerboard(double K, double period_t, double period_x);
  /// Nearest-cell lookup in a (t, x) table; K = max |value|. A single t node
  /// makes the drift time independent.
  static DriftSpec table(UniformGrid t, UniformGrid x, std::vector<double> values);
  /// User-supplied drift; the caller certifies the bound K.
  static DriftSpec custom(std::function<double(double, double)> eval, double K, bool time_dependent = true,
                          std::optional<double> lipschitz = std::nullopt, std::string name = "custom");

  double operator()(double t, double x) const;

  double K() const;
  DriftFamily family() const;
  bool time_dependent() const;
  std::optional<double> lipschitz_cert() const;
  /// Mollification width for mollified drifts, 0 otherwise.
  double mollification_width() const;
  std::string describe() const;

  /// Positions of discontinuity lines x = b with lo < b < hi (appended, sorted).
  void x_breaks(double lo, double hi, std::vector<double> &out) const;
  void t_breaks(double lo, double hi, std::vector<double> &out) const;

  struct Impl;
  explicit DriftSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
  std::shared_ptr<const Impl> impl_;
};

/// Table drift from CSV rows "t,x,value" (one optional header line) on a
/// full uniform (t, x) product grid, in any row order.
DriftSpec load_drift_table(const std::string &path);

/// Product bump q(t, x) = q1(t) q1(x), q1(u) proportional to exp(-1/(1-u^2))
/// on (-1, 1), normalized to unit mass.
class MollifierKernel {
public:
  /// q1 at u (0 outside (-1, 1)).
  static double q1(double u);
  /// Normalizing constant int_{-1}^{1} exp(-1/(1-u^2)) du.
  static double normalizer();
  /// int |q1'| * int q1 = 2 q1(0).
  static double lipschitz_constant();
  /// int q1 computed by an independent high-order rule.
  static double mass();
};

/// Number of Gauss–Legendre nodes per smooth piece and axis in mollify().
inline constexpr int kMollifierNodesPerPiece = 32;

/// eps-convolution of a with the bump kernel scaled to [-eps, eps]^2:
///   a_eps(t, x) = int int a(t - eps s, x - eps y) q1(s) q1(y) ds dy.
/// Evaluated by a fixed Gauss–Legendre rule on each smooth piece (the kernel
/// support split at 0 and at the drift's discontinuity lines) with weights
/// renormalized to unit mass, so each value is a convex combination of drift
/// values: constants are reproduced and |a_eps| <= K exactly. Time-dependent
/// drifts use a tensor rule with half as many nodes per piece.
/// The result carries lipschitz_cert = K * C_q / eps.
DriftSpec mollify(const DriftSpec &a, double eps);

/// Max divided difference |a(t, x_{i+1}) - a(t, x_i)| / (x_{i+1} - x_i) over
/// adjacent grid pairs, maximized over the given times.
double lipschitz_probe(const DriftSpec &a, const UniformGrid &x_grid,
                       const std::vector<double> &t_values = {0.0});

} // namespace levylab
