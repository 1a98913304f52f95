// Acceptance run: one PASS/FAIL line per criterion. Every criterion writes its
// numbers as CSV under --out; criterion 10 reruns the others into a second
// directory and compares the files byte for byte.

#include "levylab/convergence.hpp"
#include "levylab/csv.hpp"
#include "levylab/krylov.hpp"
#include "levylab/levy_condition.hpp"
#include "levylab/sampler.hpp"
#include "levylab/sde.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace levylab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::uint64_t kSeed = 20240611;

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

double lambda0_closed(double alpha, double K) {
  return 2 * K * (1 - 1 / alpha) * std::pow(2 * K / alpha, 1 / (alpha - 1));
}

double n1_closed(double alpha, double lambda) {
  const double pi = std::numbers::pi;
  return 2 * pi * std::pow(lambda, 1 / alpha - 1) * (pi / alpha) / std::sin(pi / alpha);
}

std::vector<double> symmetric_grid(double lim, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(-lim + 2 * lim * k / (n - 1));
  return out;
}

const LevyModel &stable15() {
  static const LevyModel m = LevyModel::symmetric_stable(1.5);
  return m;
}

Outcome c1_condition(const fs::path &dir) {
  struct Case {
    std::string name;
    LevyModel model;
    ConditionVerdict expect;
  };
  const std::vector<Case> cases{
      {"stable_1.2", LevyModel::symmetric_stable(1.2), ConditionVerdict::satisfied},
      {"stable_1.5", LevyModel::symmetric_stable(1.5), ConditionVerdict::satisfied},
      {"stable_1.9", LevyModel::symmetric_stable(1.9), ConditionVerdict::satisfied},
      {"stable_1.0", LevyModel::symmetric_stable(1.0), ConditionVerdict::violated},
      {"compound_poisson_3_z1", LevyModel::compound_poisson(3.0, {{1.0, 1.0}}), ConditionVerdict::violated}};
  CsvWriter w(dir / "condition.csv");
  w.header({"model", "verdict", "expected", "trend_slope", "last_decade_min_ratio"});
  bool ok = true;
  std::string detail;
  for (const auto &c : cases) {
    const auto rep = check_condition(c.model);
    w.row({c.name, to_string(rep.verdict), to_string(c.expect), rep.trend_slope, rep.last_decade_min_ratio});
    ok = ok && rep.verdict == c.expect;
    detail += fmt::format("{}={} ", c.name, to_string(rep.verdict));
  }
  return {ok, detail};
}

Outcome c2_lambda0(const fs::path &dir) {
  CsvWriter w(dir / "lambda0.csv");
  w.header({"alpha", "K", "lambda0", "closed_form", "rel_err"});
  double worst = 0.0;
  for (double alpha : {1.2, 1.5, 1.9})
    for (double K : {0.5, 1.0, 2.0}) {
      const double got = lambda0(LevyModel::symmetric_stable(alpha), K), exact = lambda0_closed(alpha, K);
      worst = std::max(worst, rel_err(got, exact));
      w.row({alpha, K, got, exact, rel_err(got, exact)});
    }
  return {worst <= 1e-6, fmt::format("worst relative error {:.3g} (tol 1e-6)", worst)};
}

Outcome c3_n1(const fs::path &dir) {
  CsvWriter w(dir / "n1.csv");
  w.header({"alpha", "lambda", "N1", "closed_form", "rel_err", "tail_fraction"});
  double worst = 0.0;
  const double l0 = lambda0(stable15(), 1.0);
  for (double lambda : {1.0, l0}) {
    const auto n1 = n1_constant(stable15(), lambda);
    const double exact = n1_closed(1.5, lambda);
    worst = std::max(worst, rel_err(n1.value, exact));
    w.row({1.5, lambda, n1.value, exact, rel_err(n1.value, exact), n1.tail_fraction});
  }
  return {worst <= 1e-6, fmt::format("worst relative error {:.3g} (tol 1e-6), lambda0={:.6g}", worst, l0)};
}

Outcome c4_sampler(const fs::path &dir) {
  const std::vector<std::pair<std::string, LevyModel>> models{
      {"stable_1.3", LevyModel::symmetric_stable(1.3)},
      {"stable_1.7", LevyModel::symmetric_stable(1.7)},
      {"compound_poisson_3_z1", LevyModel::compound_poisson(3.0, {{1.0, 1.0}})}};
  EcfConfig cfg;
  cfg.t = 1.0;
  cfg.n_paths = 200000;
  cfg.seed = kSeed;
  CsvWriter w(dir / "ecf.csv");
  w.header({"model", "xi", "ecf_re", "ecf_im", "theory_re", "theory_im", "abs_dev"});
  bool ok = true;
  std::string detail;
  for (const auto &[name, m] : models) {
    const auto rep = ecf_report(m, symmetric_grid(5.0, 101), cfg);
    for (const auto &p : rep.points)
      w.row({name, p.xi, p.ecf.real(), p.ecf.imag(), p.theory.real(), p.theory.imag(), p.abs_dev});
    ok = ok && rep.max_deviation < 0.01;
    detail += fmt::format("{} max_dev={:.4f} ", name, rep.max_deviation);
  }
  return {ok, detail + "(tol 0.01)"};
}

Outcome c5_oracle(const fs::path &dir) {
  const auto ctx = make_krylov_context(stable15(), 0.0, LambdaPolicy::auto_lambda0_or, 1.0);
  const auto f = TestFunction::gaussian_bump(1.0, 0.0, 0.15, 0.3);
  const std::vector<std::pair<double, double>> points{{0.0, 0.0}, {0.0, 0.5}, {0.0, -1.0}, {0.5, 0.2}, {0.8, 0.0}};
  std::vector<KrylovProbe> probes;
  for (std::size_t i = 0; i < points.size(); ++i)
    probes.push_back({fmt::format("probe_{}", i), f, points[i].first, points[i].second});
  McConfig mc;
  mc.dt = 1e-3;
  mc.n_paths = 100000;
  mc.seed = kSeed;
  const auto reps = bound_sweep(ctx, DriftSpec::constant(0.0), probes, mc);
  const auto field = resolvent_oracle(stable15(), f, ctx.lambda, OracleGrid{});
  CsvWriter w(dir / "oracle.csv");
  w.comment(fmt::format("lambda={}", csv_number(ctx.lambda)));
  w.header({"probe", "t0", "x0", "mc", "mc_ci_halfwidth", "oracle", "rel_diff"});
  double worst = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double v = field.at(probes[i].t0, probes[i].x0);
    const double rd = rel_err(reps[i].lhs_estimate, v);
    worst = std::max(worst, rd);
    w.row({probes[i].id, probes[i].t0, probes[i].x0, reps[i].lhs_estimate, reps[i].lhs_ci_halfwidth, v, rd});
  }
  return {worst <= 0.05, fmt::format("worst relative difference {:.4f} over 5 probes (tol 0.05)", worst)};
}

KrylovContext sign_drift_context() {
  return make_krylov_context(stable15(), 1.0, LambdaPolicy::auto_lambda0_or, 1.0);
}

McConfig sweep_mc() {
  McConfig mc;
  mc.dt = 1e-3;
  mc.n_paths = 10000;
  mc.seed = kSeed;
  return mc;
}

void write_reports(CsvWriter &w, const std::vector<KrylovReport> &reps) {
  w.header({"experiment_id", "lambda", "horizon", "lhs_estimate", "lhs_ci_halfwidth", "rhs_norm",
            "reference_constant", "ratio", "truncation_bound", "verdict"});
  for (const auto &r : reps)
    w.row({r.experiment_id, r.lambda, r.horizon, r.lhs_estimate, r.lhs_ci_halfwidth, r.rhs_norm,
           r.reference_constant, r.ratio, r.truncation_bound, verdict_string(r)});
}

Outcome c6_krylov(const fs::path &dir) {
  const auto ctx = sign_drift_context();
  const auto reps = bound_sweep(ctx, DriftSpec::sign_x(1.0), builtin_sweep(), sweep_mc());
  CsvWriter w(dir / "krylov.csv");
  w.comment(fmt::format("lambda0={} N1={}", csv_number(ctx.lambda0), csv_number(ctx.n1.value)));
  write_reports(w, reps);
  std::size_t passed = 0;
  double worst = 0.0;
  for (const auto &r : reps) {
    passed += r.pass;
    worst = std::max(worst, r.ratio);
  }
  return {passed == reps.size(),
          fmt::format("{}/{} pass, lambda={:.4f}, largest lhs/(2 sqrt(N1) |f|) = {:.4f}", passed, reps.size(),
                      ctx.lambda, worst)};
}

Outcome c7_local(const fs::path &dir) {
  const auto ctx = sign_drift_context();
  const auto a = DriftSpec::sign_x(1.0);
  const auto sweep = builtin_sweep();
  std::vector<KrylovReport> reps;
  for (std::size_t i : {0u, 2u, 7u, 8u}) reps.push_back(krylov_local_mc(ctx, a, sweep[i].f, 5.0, 1.0, 0.0, sweep_mc(), sweep[i].id));
  const auto outside = krylov_local_mc(ctx, a, TestFunction::indicator({0.0, 1.0, 6.0, 7.0}), 5.0, 1.0, 0.0,
                                       sweep_mc(), "outside_m");
  reps.push_back(outside);
  CsvWriter w(dir / "local.csv");
  write_reports(w, reps);
  bool ok = outside.lhs_estimate == 0.0;
  for (const auto &r : reps) ok = ok && r.pass;
  return {ok, fmt::format("{} local checks, outside-[-m,m] estimate = {}", reps.size(), outside.lhs_estimate)};
}

// Criteria 8 and 9 share one ladder run.
ConvergenceReport run_ladder(const fs::path &dir) {
  LadderConfig cfg;
  cfg.n_paths = 10000;
  cfg.seed = kSeed;
  const auto rep = mollification_ladder(stable15(), DriftSpec::sign_x(1.0), cfg);
  CsvWriter w(dir / "ladder.csv");
  w.section("LADDER");
  w.header({"eps_coarse", "eps_fine", "gap_median", "gap_q90", "gap_max", "ks", "ks_critical", "drift_gap"});
  for (std::size_t k = 0; k + 1 < rep.ladder.size(); ++k)
    w.row({rep.ladder[k], rep.ladder[k + 1], rep.pathwise_gap[k].median, rep.pathwise_gap[k].q90,
           rep.pathwise_gap[k].max, rep.ks_distances[k], rep.ks_critical[k], rep.drift_integral_gap[k]});
  w.section("ALDOUS_SUP");
  w.header({"eps", "l", "p_sup_exceeds"});
  for (std::size_t k = 0; k < rep.ladder.size(); ++k)
    for (std::size_t j = 0; j < rep.aldous[k].l_grid.size(); ++j)
      w.row({rep.ladder[k], rep.aldous[k].l_grid[j], rep.aldous[k].sup_exceed[j]});
  w.section("ALDOUS_DISPLACEMENT");
  w.header({"eps", "r", "tau", "p_displacement"});
  for (std::size_t k = 0; k < rep.ladder.size(); ++k) {
    const auto &tab = rep.aldous[k];
    for (std::size_t r = 0; r < tab.r_ladder.size(); ++r)
      for (std::size_t q = 0; q < tab.tau_grid.size(); ++q)
        w.row({rep.ladder[k], tab.r_ladder[r], tab.tau_grid[q], tab.displacement[r][q]});
  }
  return rep;
}

Outcome c8_ladder(const ConvergenceReport &rep) {
  const double first = rep.pathwise_gap.front().median, last = rep.pathwise_gap.back().median;
  bool ks_ok = true;
  for (std::size_t k = 1; k < rep.ks_distances.size(); ++k)
    ks_ok = ks_ok && rep.ks_distances[k] <= rep.ks_distances[k - 1] + rep.ks_critical[k];
  std::string ks;
  for (double d : rep.ks_distances) ks += fmt::format("{:.4f} ", d);
  return {first >= 2.0 * last && ks_ok,
          fmt::format("median gap {:.4f} -> {:.4f} ({:.1f}x, need 2x); KS {}(critical {:.4f})", first, last,
                      first / last, ks, rep.ks_critical.front())};
}

Outcome c9_aldous(const ConvergenceReport &rep) {
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < rep.aldous.size(); ++k) {
    const auto &p = rep.aldous[k].sup_exceed;
    bool mono = true, small = false;
    double first_small = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j > 0) mono = mono && p[j] <= p[j - 1];
      if (!small && p[j] < 0.05) {
        small = true;
        first_small = rep.aldous[k].l_grid[j];
      }
    }
    ok = ok && mono && small;
    detail += fmt::format("eps={}: {}{} ", rep.ladder[k], mono ? "monotone" : "NOT monotone",
                          small ? fmt::format(", <0.05 from l={}", first_small) : ", never <0.05");
  }
  return {ok, detail};
}

bool same_bytes(const fs::path &a, const fs::path &b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

Outcome c10_zero_drift() {
  const IncrementSampler s(stable15());
  SolveConfig cfg{0.7, 1.0, 1e-3, 200, kSeed};
  const auto sols = euler_batch(s, DriftSpec::constant(0.0), cfg, Exec::parallel);
  const auto grid = time_grid(cfg.t_end, cfg.dt);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    RngStream rng(cfg.seed, i);
    const auto path = sample_path(s, grid, rng);
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (sols[i].path.values[k] != cfg.x0 + path.values[k]) return {false, fmt::format("path {} step {}", i, k)};
  }
  return {true, "200 paths bit-exact"};
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out = "acceptance_out";
  bool skip_rerun = false;
  app.add_option("--out", out, "Output directory");
  app.add_flag("--skip-rerun", skip_rerun, "Skip the determinism reruns");
  CLI11_PARSE(app, argc, argv);

  const fs::path first = fs::path(out) / "run1", second = fs::path(out) / "run2";
  fs::remove_all(out);

  // Criteria 1-9 write into one run directory; limit in seconds (0 = none).
  struct Step {
    int id;
    double limit;
    std::function<Outcome(const fs::path &)> run;
  };
  std::optional<ConvergenceReport> ladder;
  const std::vector<Step> steps{
      {1, 5.0, c1_condition},
      {2, 5.0, c2_lambda0},
      {3, 5.0, c3_n1},
      {4, 60.0, c4_sampler},
      {5, 300.0, c5_oracle},
      {6, 600.0, c6_krylov},
      {7, 0.0, c7_local},
      {8, 600.0,
       [&](const fs::path &d) {
         ladder = run_ladder(d);
         return c8_ladder(*ladder);
       }},
      {9, 0.0, [&](const fs::path &) { return c9_aldous(*ladder); }},
  };

  int failures = 0;
  auto report = [&](int id, bool pass, const std::string &detail) {
    failures += !pass;
    std::cout << fmt::format("criterion {:2d}: {} {}", id, pass ? "PASS" : "FAIL", detail) << std::endl;
  };

  for (const auto &step : steps) {
    const fs::path dir = first / fmt::format("c{}", step.id);
    fs::create_directories(dir);
    Timer t;
    Outcome o;
    try {
      o = step.run(dir);
    } catch (const std::exception &e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = t.seconds();
    const bool in_time = step.limit <= 0.0 || secs < step.limit;
    report(step.id, o.pass && in_time,
           fmt::format("{} [{:.1f} s{}]", o.detail, secs,
                       step.limit > 0.0 ? fmt::format(", limit {:.0f} s", step.limit) : ""));
  }

  Outcome det = c10_zero_drift();
  if (det.pass && !skip_rerun) {
    std::size_t files = 0;
    for (const auto &step : steps) {
      const fs::path dir = second / fmt::format("c{}", step.id);
      fs::create_directories(dir);
      try {
        step.run(dir);
      } catch (const std::exception &e) {
        det = {false, fmt::format("rerun of criterion {} threw: {}", step.id, e.what())};
        break;
      }
    }
    for (const auto &e : fs::recursive_directory_iterator(first)) {
      if (!e.is_regular_file()) continue;
      const auto other = second / fs::relative(e.path(), first);
      ++files;
      if (!same_bytes(e.path(), other)) {
        det = {false, fmt::format("{} differs between runs", fs::relative(e.path(), first).string())};
        break;
      }
    }
    if (det.pass) det.detail += fmt::format("; {} CSV files byte-identical on rerun", files);
  } else if (skip_rerun) {
    det.detail += "; rerun skipped";
  }
  report(10, det.pass && !skip_rerun, det.detail);

  std::cout << fmt::format("{} of 10 criteria failed", failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
