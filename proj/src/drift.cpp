#include "levylab/drift.hpp"

#include "levylab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <numbers>

namespace levylab {

std::string to_string(DriftFamily f) {
  switch (f) {
  case DriftFamily::constant: return "constant";
  case DriftFamily::sign_x: return "sign_x";
  case DriftFamily::checkerboard: return "checkerboard";
  case DriftFamily::table: return "table";
  case DriftFamily::mollified: return "mollified";
  case DriftFamily::custom: return "custom";
  }
  return "unknown";
}

struct DriftSpec::Impl {
  DriftFamily family = DriftFamily::custom;
  std::function<double(double, double)> eval;
  double K = 0.0;
  bool time_dependent = false;
  std::optional<double> lipschitz;
  double eps = 0.0;
  std::string name;
  // Discontinuity lines: b in {offset + k * period} when period > 0, plus a
  // finite list.
  double x_period = 0.0, x_offset = 0.0;
  double t_period = 0.0, t_offset = 0.0;
  std::vector<double> x_fixed, t_fixed;
};

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void periodic_breaks(double period, double offset, const std::vector<double> &fixed, double lo, double hi,
                     std::vector<double> &out) {
  const auto first = out.size();
  if (period > 0.0) {
    for (double k = std::floor((lo - offset) / period); ; k += 1.0) {
      const double b = offset + k * period;
      if (b >= hi) break;
      if (b > lo) out.push_back(b);
    }
  }
  for (double b : fixed)
    if (b > lo && b < hi) out.push_back(b);
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

void check_K(double K) {
  if (!std::isfinite(K) || K < 0.0) throw PreconditionError(fmt::format("drift bound K must be finite and >= 0, got {}", K));
}

} // namespace

DriftSpec DriftSpec::constant(double value) {
  if (!std::isfinite(value)) throw PreconditionError("constant drift must be finite");
  auto p = std::make_shared<Impl>();
  p->family = DriftFamily::constant;
  p->eval = [value](double, double) { return value; };
  p->K = std::abs(value);
  p->lipschitz = 0.0;
  p->name = fmt::format("constant({})", value);
  return DriftSpec(p);
}

DriftSpec DriftSpec::sign_x(double K) {
  check_K(K);
  auto p = std::make_shared<Impl>();
  p->family = DriftFamily::sign_x;
  p->eval = [K](double, double x) { return K * sign(x); };
  p->K = K;
  p->x_fixed = {0.0};
  p->name = fmt::format("{} sign(x)", K);
  return DriftSpec(p);
}

DriftSpec DriftSpec::checkerboard(double K, double period_t, double period_x) {
  check_K(K);
  if (!(period_t > 0.0) || !(period_x > 0.0)) throw PreconditionError("checkerboard periods must be positive");
  auto p = std::make_shared<Impl>();
  p->family = DriftFamily::checkerboard;
  const double pi = std::numbers::pi;
  p->eval = [=](double t, double x) { return K * sign(std::sin(pi * t / period_t)) * sign(std::sin(pi * x / period_x)); };
  p->K = K;
  p->time_dependent = true;
  p->x_period = period_x;
  p->t_period = period_t;
  p->name = fmt::format("checkerboard(K={}, pt={}, px={})", K, period_t, period_x);
  return DriftSpec(p);
}

DriftSpec DriftSpec::table(UniformGrid t, UniformGrid x, std::vector<double> values) {
  if (t.size == 0 || x.size == 0 || values.size() != t.size * x.size)
    throw PreconditionError("drift table size does not match its grids");
  if (!(x.step > 0.0) || (t.size > 1 && !(t.step > 0.0))) throw PreconditionError("drift table steps must be positive");
  double K = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("drift table contains a non-finite value");
    K = std::max(K, std::abs(v));
  }
  auto p = std::make_shared<Impl>();
  p->family = DriftFamily::table;
  p->K = K;
  p->time_dependent = t.size > 1;
  auto cell = [](const UniformGrid &g, double v) -> std::size_t {
    if (g.size == 1) return 0;
    const double r = std::round((v - g.origin) / g.step);
    if (r <= 0.0) return 0;
    return std::min(g.size - 1, static_cast<std::size_t>(r));
  };
  auto data = std::make_shared<const std::vector<double>>(std::move(values));
  p->eval = [t, x, data, cell](double tt, double xx) { return (*data)[cell(t, tt) * x.size + cell(x, xx)]; };
  // Cell boundaries sit halfway between nodes.
  for (std::size_t i = 0; i + 1 < x.size; ++i) p->x_fixed.push_back(x.at(i) + 0.5 * x.step);
  for (std::size_t i = 0; i + 1 < t.size; ++i) p->t_fixed.push_back(t.at(i) + 0.5 * t.step);
  p->name = fmt::format("table({}x{})", t.size, x.size);
  return DriftSpec(p);
}

DriftSpec DriftSpec::custom(std::function<double(double, double)> eval, double K, bool time_dependent,
                            std::optional<double> lipschitz, std::string name) {
  check_K(K);
  if (!eval) throw PreconditionError("custom drift needs a callable");
  auto p = std::make_shared<Impl>();
  p->family = DriftFamily::custom;
  p->eval = std::move(eval);
  p->K = K;
  p->time_dependent = time_dependent;
  p->lipschitz = lipschitz;
  p->name = std::move(name);
  return DriftSpec(p);
}

double DriftSpec::operator()(double t, double x) const { return impl_->eval(t, x); }
double DriftSpec::K() const { return impl_->K; }
DriftFamily DriftSpec::family() const { return impl_->family; }
bool DriftSpec::time_dependent() const { return impl_->time_dependent; }
std::optional<double> DriftSpec::lipschitz_cert() const { return impl_->lipschitz; }
double DriftSpec::mollification_width() const { return impl_->eps; }
std::string DriftSpec::describe() const { return impl_->name; }

void DriftSpec::x_breaks(double lo, double hi, std::vector<double> &out) const {
  periodic_breaks(impl_->x_period, impl_->x_offset, impl_->x_fixed, lo, hi, out);
}
void DriftSpec::t_breaks(double lo, double hi, std::vector<double> &out) const {
  periodic_breaks(impl_->t_period, impl_->t_offset, impl_->t_fixed, lo, hi, out);
}

namespace {

UniformGrid uniform_from_nodes(const std::vector<double> &nodes, const std::string &what) {
  if (nodes.size() == 1) return {nodes.front(), 1.0, 1};
  const double step = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(nodes[i] - (nodes.front() + static_cast<double>(i) * step)) > 1e-9 * std::max(1.0, std::abs(step) * nodes.size()))
      throw PreconditionError(fmt::format("drift table {} nodes are not uniformly spaced", what));
  return {nodes.front(), step, nodes.size()};
}

} // namespace

DriftSpec load_drift_table(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(fmt::format("cannot open drift table {}", path));
  std::map<std::pair<double, double>, double> cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t, x, v;
    if (!(ss >> t >> x >> v)) {
      if (cells.empty() && lineno == 1) continue; // header
      throw PreconditionError(fmt::format("{}:{}: expected t,x,value", path, lineno));
    }
    cells[{t, x}] = v;
  }
  std::vector<double> ts, xs;
  for (const auto &[k, v] : cells) {
    ts.push_back(k.first);
    xs.push_back(k.second);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (cells.empty() || cells.size() != ts.size() * xs.size())
    throw PreconditionError(fmt::format("{}: rows do not form a full t-x product grid", path));
  if (xs.size() < 2) throw PreconditionError(fmt::format("{}: need at least two x nodes", path));
  std::vector<double> values;
  values.reserve(cells.size());
  for (double t : ts)
    for (double x : xs) values.push_back(cells.at({t, x}));
  return DriftSpec::table(uniform_from_nodes(ts, "t"), uniform_from_nodes(xs, "x"), std::move(values));
}

// ---------------------------------------------------------------------------
// Kernel

namespace {

double bump(double u) {
  const double s = 1.0 - u * u;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

constexpr double kBumpNormalizer = 0.44399381616807943;

template <int N> struct GaussRule {
  std::array<double, N> x{}, w{};
  GaussRule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto &a = G::abscissa();
    const auto &wt = G::weights();
    int k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        x[k] = 0.0;
        w[k++] = wt[i];
        continue;
      }
      x[k] = -a[i];
      w[k++] = wt[i];
      x[k] = a[i];
      w[k++] = wt[i];
    }
  }
};

// Nodes (in kernel units u in [-1, 1]) and unnormalized weights q1(u) du for
// the pieces between consecutive cut points.
template <int N>
void piece_rule(const std::vector<double> &cuts, std::vector<double> &nodes, std::vector<double> &weights) {
  static const GaussRule<N> rule;
  nodes.clear();
  weights.clear();
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    if (!(half > 0.0)) continue;
    for (int i = 0; i < N; ++i) {
      const double u = mid + half * rule.x[i];
      const double q = bump(u);
      if (q == 0.0) continue;
      nodes.push_back(u);
      weights.push_back(half * rule.w[i] * q);
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double &w : weights) w /= total;
}

// Cut points in kernel units for the shifted argument center - eps*u: a break
// at b corresponds to u = (center - b) / eps.
std::vector<double> kernel_cuts(const std::vector<double> &breaks, double center, double eps) {
  std::vector<double> cuts{-1.0, 0.0, 1.0};
  for (double b : breaks) {
    const double u = (center - b) / eps;
    if (u > -1.0 && u < 1.0 && u != 0.0) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

struct FixedRule {
  std::vector<double> nodes, weights;
};

template <int N> const FixedRule &default_rule() {
  static const FixedRule r = [] {
    FixedRule f;
    piece_rule<N>({-1.0, 0.0, 1.0}, f.nodes, f.weights);
    return f;
  }();
  return r;
}

} // namespace

double MollifierKernel::q1(double u) { return bump(u) / kBumpNormalizer; }
double MollifierKernel::normalizer() { return kBumpNormalizer; }
double MollifierKernel::lipschitz_constant() { return 2.0 * q1(0.0); }
double MollifierKernel::mass() {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([](double u) { return q1(u); }, -1.0, 1.0);
}

DriftSpec mollify(const DriftSpec &a, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError(fmt::format("mollification width must be > 0, got {}", eps));
  auto p = std::make_shared<DriftSpec::Impl>();
  p->family = DriftFamily::mollified;
  p->K = a.K();
  p->time_dependent = a.time_dependent();
  p->eps = eps;
  p->lipschitz = a.K() * MollifierKernel::lipschitz_constant() / eps;
  p->name = fmt::format("mollified[{}]({})", eps, a.describe());

  if (!a.time_dependent()) {
    constexpr int N = kMollifierNodesPerPiece;
    p->eval = [a, eps](double t, double x) {
      thread_local std::vector<double> breaks, nodes, weights;
      breaks.clear();
      a.x_breaks(x - eps, x + eps, breaks);
      const std::vector<double> *xs, *ws;
      if (breaks.empty()) {
        const auto &r = default_rule<N>();
        xs = &r.nodes;
        ws = &r.weights;
      } else {
        piece_rule<N>(kernel_cuts(breaks, x, eps), nodes, weights);
        xs = &nodes;
        ws = &weights;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < xs->size(); ++i) s += (*ws)[i] * a(t, x - eps * (*xs)[i]);
      return s;
    };
  } else {
    constexpr int N = kMollifierNodesPerPiece / 2;
    p->eval = [a, eps](double t, double x) {
      thread_local std::vector<double> breaks, xn, xw, tn, tw;
      breaks.clear();
      a.x_breaks(x - eps, x + eps, breaks);
      piece_rule<N>(kernel_cuts(breaks, x, eps), xn, xw);
      breaks.clear();
      a.t_breaks(t - eps, t + eps, breaks);
      piece_rule<N>(kernel_cuts(breaks, t, eps), tn, tw);
      double s = 0.0;
      for (std::size_t i = 0; i < tn.size(); ++i) {
        const double ti = t - eps * tn[i];
        double row = 0.0;
        for (std::size_t j = 0; j < xn.size(); ++j) row += xw[j] * a(ti, x - eps * xn[j]);
        s += tw[i] * row;
      }
      return s;
    };
  }
  return DriftSpec(p);
}

double lipschitz_probe(const DriftSpec &a, const UniformGrid &x_grid, const std::vector<double> &t_values) {
  if (x_grid.size < 2) throw PreconditionError("lipschitz_probe needs at least two x nodes");
  double best = 0.0;
  for (double t : t_values) {
    double prev = a(t, x_grid.at(0));
    for (std::size_t i = 1; i < x_grid.size; ++i) {
      const double cur = a(t, x_grid.at(i));
      best = std::max(best, std::abs(cur - prev) / (x_grid.at(i) - x_grid.at(i - 1)));
      prev = cur;
    }
  }
  return best;
}

} // namespace levylab
