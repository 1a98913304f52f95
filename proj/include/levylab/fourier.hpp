#pragma once

#include "levylab/grid.hpp"
#include "levylab/levy_model.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace levylab {

// Transforms follow the convention g^(xi) = int e^{i z xi} g(z) dz, under which
// the generator L of S acts as the multiplier -psi(-xi).

/// Signed angular frequency of DFT bin k on a grid of n points with spacing h.
double dft_frequency(std::size_t k, std::size_t n, double h);

/// Applies precomputed multiplier values, one per DFT bin in FFTW order.
std::vector<double> apply_symbol_1d(const std::vector<double> &g,
                                    const std::vector<std::complex<double>> &symbol);

/// Applies the Fourier multiplier m to a real sample vector on a uniform grid
/// (forward transform, multiply, inverse) and returns the real part.
std::vector<double> apply_multiplier_1d(const std::vector<double> &g, double h,
                                        const std::function<std::complex<double>(double)> &m);

/// Same on a t-major 2-D grid; m takes (zeta, xi) dual to (t, x).
std::vector<double>
apply_multiplier_2d(const std::vector<double> &g, std::size_t nt, std::size_t nx, double ht, double hx,
                    const std::function<std::complex<double>(double, double)> &m);

/// Transforms every row of a t-major (nt x nx) grid in x, passes each
/// frequency column (nt values) with its frequency to op, and transforms back.
std::vector<double>
transform_x_columns(const std::vector<double> &g, std::size_t nt, std::size_t nx, double hx,
                    const std::function<void(double xi, std::vector<std::complex<double>> &column)> &op);

/// Generator of S applied to a 1-D grid function through its Fourier symbol.
/// Requires the samples to vanish at the boundary (|g| < 1e-8 max|g| at both
/// ends), otherwise wrap-around would alias; throws PreconditionError.
GridFunction apply_generator(const LevyModel &model, const GridFunction &g);

} // namespace levylab
