#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace levylab {

/// origin + i * step for i in [0, size).
struct UniformGrid {
  double origin = 0.0;
  double step = 1.0;
  std::size_t size = 1;

  double at(std::size_t i) const { return origin + static_cast<double>(i) * step; }
  double back() const { return at(size - 1); }

  /// size points from lo with the given spacing covering [lo, hi].
  static UniformGrid covering(double lo, double hi, std::size_t size) {
    if (size < 2 || !(hi > lo)) throw std::invalid_argument("UniformGrid::covering needs size >= 2 and hi > lo");
    return {lo, (hi - lo) / static_cast<double>(size - 1), size};
  }
};

/// Samples of a function on a (t, x) product grid, stored t-major. A
/// time-independent function has a single t node.
struct GridFunction {
  UniformGrid t;
  UniformGrid x;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(UniformGrid t_grid, UniformGrid x_grid)
      : t(t_grid), x(x_grid), values(t_grid.size * x_grid.size, 0.0) {}
  /// One-dimensional function of x.
  explicit GridFunction(UniformGrid x_grid) : GridFunction(UniformGrid{0.0, 1.0, 1}, x_grid) {}

  bool is_1d() const { return t.size == 1; }
  double &operator()(std::size_t it, std::size_t ix) { return values[it * x.size + ix]; }
  double operator()(std::size_t it, std::size_t ix) const { return values[it * x.size + ix]; }

  template <class F> static GridFunction sample_1d(UniformGrid x_grid, F f) {
    GridFunction g(x_grid);
    for (std::size_t i = 0; i < x_grid.size; ++i) g.values[i] = f(x_grid.at(i));
    return g;
  }
  template <class F> static GridFunction sample(UniformGrid t_grid, UniformGrid x_grid, F f) {
    GridFunction g(t_grid, x_grid);
    for (std::size_t it = 0; it < t_grid.size; ++it)
      for (std::size_t ix = 0; ix < x_grid.size; ++ix) g(it, ix) = f(t_grid.at(it), x_grid.at(ix));
    return g;
  }
};

} // namespace levylab
