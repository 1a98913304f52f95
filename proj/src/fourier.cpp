#include "levylab/fourier.hpp"

#include "levylab/errors.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace levylab {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer &) = delete;
  FftwBuffer &operator=(const FftwBuffer &) = delete;
  fftw_complex *data;
};

struct Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
  void execute() const { fftw_execute(plan); }
};

// FFTW_BACKWARD computes sum_j g_j e^{+2 pi i jk/n}, the discrete form of
// int e^{i x xi} g(x) dx; FFTW_FORWARD is its (unnormalized) inverse.
void make_plans(Plan &fwd, Plan &inv, FftwBuffer &buf, int rank, const int *dims) {
  std::lock_guard lock(planner_mutex());
  fwd.plan = fftw_plan_dft(rank, dims, buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  inv.plan = fftw_plan_dft(rank, dims, buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
}

} // namespace

double dft_frequency(std::size_t k, std::size_t n, double h) {
  const auto sk = static_cast<long long>(k);
  const auto sn = static_cast<long long>(n);
  const long long signed_k = (2 * sk < sn) ? sk : sk - sn;
  return 2.0 * M_PI * static_cast<double>(signed_k) / (static_cast<double>(n) * h);
}

std::vector<double> apply_symbol_1d(const std::vector<double> &g,
                                    const std::vector<std::complex<double>> &symbol) {
  const std::size_t n = g.size();
  if (symbol.size() != n) throw std::invalid_argument("apply_symbol_1d: size mismatch");
  if (n == 0) return {};
  FftwBuffer buf(n);
  Plan fwd, inv;
  const int dims[1] = {static_cast<int>(n)};
  make_plans(fwd, inv, buf, 1, dims);
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = g[i];
    buf.data[i][1] = 0.0;
  }
  fwd.execute();
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> r = std::complex<double>(buf.data[k][0], buf.data[k][1]) * symbol[k];
    buf.data[k][0] = r.real();
    buf.data[k][1] = r.imag();
  }
  inv.execute();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf.data[i][0] / static_cast<double>(n);
  return out;
}

std::vector<double> apply_multiplier_1d(const std::vector<double> &g, double h,
                                        const std::function<std::complex<double>(double)> &m) {
  std::vector<std::complex<double>> symbol(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) symbol[k] = m(dft_frequency(k, g.size(), h));
  return apply_symbol_1d(g, symbol);
}

std::vector<double>
apply_multiplier_2d(const std::vector<double> &g, std::size_t nt, std::size_t nx, double ht, double hx,
                    const std::function<std::complex<double>(double, double)> &m) {
  const std::size_t n = nt * nx;
  if (g.size() != n) throw std::invalid_argument("apply_multiplier_2d: size mismatch");
  FftwBuffer buf(n);
  Plan fwd, inv;
  const int dims[2] = {static_cast<int>(nt), static_cast<int>(nx)};
  make_plans(fwd, inv, buf, 2, dims);
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = g[i];
    buf.data[i][1] = 0.0;
  }
  fwd.execute();
  std::vector<double> xi(nx);
  for (std::size_t kx = 0; kx < nx; ++kx) xi[kx] = dft_frequency(kx, nx, hx);
  for (std::size_t kt = 0; kt < nt; ++kt) {
    const double zeta = dft_frequency(kt, nt, ht);
    for (std::size_t kx = 0; kx < nx; ++kx) {
      auto &cell = buf.data[kt * nx + kx];
      const std::complex<double> r = std::complex<double>(cell[0], cell[1]) * m(zeta, xi[kx]);
      cell[0] = r.real();
      cell[1] = r.imag();
    }
  }
  inv.execute();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf.data[i][0] / static_cast<double>(n);
  return out;
}

std::vector<double>
transform_x_columns(const std::vector<double> &g, std::size_t nt, std::size_t nx, double hx,
                    const std::function<void(double xi, std::vector<std::complex<double>> &column)> &op) {
  const std::size_t n = nt * nx;
  if (g.size() != n) throw std::invalid_argument("transform_x_columns: size mismatch");
  FftwBuffer buf(n);
  Plan fwd, inv;
  {
    std::lock_guard lock(planner_mutex());
    const int len[1] = {static_cast<int>(nx)};
    const int rows = static_cast<int>(nt), dist = static_cast<int>(nx);
    fwd.plan = fftw_plan_many_dft(1, len, rows, buf.data, nullptr, 1, dist, buf.data, nullptr, 1, dist,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
    inv.plan = fftw_plan_many_dft(1, len, rows, buf.data, nullptr, 1, dist, buf.data, nullptr, 1, dist,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = g[i];
    buf.data[i][1] = 0.0;
  }
  fwd.execute();
  std::vector<std::complex<double>> column(nt);
  for (std::size_t kx = 0; kx < nx; ++kx) {
    for (std::size_t kt = 0; kt < nt; ++kt) column[kt] = {buf.data[kt * nx + kx][0], buf.data[kt * nx + kx][1]};
    op(dft_frequency(kx, nx, hx), column);
    for (std::size_t kt = 0; kt < nt; ++kt) {
      buf.data[kt * nx + kx][0] = column[kt].real();
      buf.data[kt * nx + kx][1] = column[kt].imag();
    }
  }
  inv.execute();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf.data[i][0] / static_cast<double>(nx);
  return out;
}

GridFunction apply_generator(const LevyModel &model, const GridFunction &g) {
  if (!g.is_1d()) throw PreconditionError("apply_generator expects a one-dimensional grid function");
  if (g.x.size < 4) throw PreconditionError("apply_generator needs at least four grid points");
  double peak = 0.0;
  for (double v : g.values) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(g.values.front()), std::abs(g.values.back()));
  if (edge > 1e-8 * peak) {
    throw PreconditionError(fmt::format(
        "grid function does not decay at the boundary (|g| = {:g} vs max {:g}); wrap-around would alias",
        edge, peak));
  }
  GridFunction out(g.x);
  out.values = apply_multiplier_1d(g.values, g.x.step, [&](double xi) { return -model.psi(-xi); });
  return out;
}

} // namespace levylab
