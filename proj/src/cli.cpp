#include "levylab/cli.hpp"

#include "levylab/config.hpp"
#include "levylab/convergence.hpp"
#include "levylab/csv.hpp"
#include "levylab/errors.hpp"
#include "levylab/krylov.hpp"
#include "levylab/levy_condition.hpp"
#include "levylab/sampler.hpp"
#include "levylab/sde.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

namespace levylab {

namespace fs = std::filesystem;

namespace {

struct Summary {
  struct Row {
    std::string check, verdict, metrics;
  };
  std::vector<Row> rows;
  bool all_pass = true;

  void add(std::string check, std::string verdict, std::string metrics, bool pass = true) {
    rows.push_back({std::move(check), std::move(verdict), std::move(metrics)});
    all_pass = all_pass && pass;
  }
  void write(const fs::path &dir, const std::string &id) const {
    CsvWriter w(dir / "SUMMARY.csv");
    w.header({"experiment_id", "check", "verdict", "metrics"});
    for (const auto &r : rows) w.row({id, r.check, r.verdict, r.metrics});
  }
};

std::string num(double v) { return csv_number(v); }

LambdaPolicy policy_of(const LambdaConfig &l) {
  return l.policy == "fixed" ? LambdaPolicy::fixed : LambdaPolicy::auto_lambda0_or;
}

McConfig mc_config(const ExperimentConfig &cfg) {
  McConfig mc;
  mc.dt = cfg.solver.dt;
  mc.n_paths = cfg.solver.n_paths;
  mc.seed = cfg.seed;
  mc.horizon = cfg.krylov.horizon;
  mc.truncation_tolerance = cfg.krylov.truncation_tolerance;
  mc.sampler.truncation = cfg.sample.truncation;
  return mc;
}

void check_psi(const ExperimentConfig &cfg, const fs::path &dir, Summary &sum, std::ostream &log) {
  const LevyModel model = build_model(cfg.model);
  const auto rep = check_condition(model, cfg.grid, cfg.condition);
  {
    CsvWriter w(dir / "condition.csv");
    w.comment(fmt::format("model: {}", model.describe()));
    w.header({"xi", "re_psi", "ratio"});
    for (const auto &s : rep.samples) w.row({s.xi, s.re_psi, s.ratio});
    w.comment(fmt::format("verdict={} trend_slope={} last_decade_min_ratio={}", to_string(rep.verdict),
                          num(rep.trend_slope), num(rep.last_decade_min_ratio)));
  }
  log << "condition: " << to_string(rep.verdict) << " (" << rep.explanation << ")\n";
  sum.add("condition", to_string(rep.verdict),
          fmt::format("trend_slope={};last_decade_min_ratio={}", num(rep.trend_slope), num(rep.last_decade_min_ratio)));
  if (rep.verdict != ConditionVerdict::satisfied) return;
  const double K = build_drift(cfg.drift).K();
  const double l0 = lambda0(model, K, cfg.grid);
  const double lambda = policy_of(cfg.lambda) == LambdaPolicy::fixed ? cfg.lambda.value : std::max(l0, cfg.lambda.value);
  const auto n1 = n1_constant(model, lambda, cfg.grid);
  CsvWriter w(dir / "constants.csv");
  w.header({"K", "lambda0", "lambda", "N1", "reference_constant", "tail_fraction", "fitted_exponent"});
  w.row({K, l0, lambda, n1.value, reference_constant(n1), n1.tail_fraction, n1.fitted_exponent});
  sum.add("constants", "computed",
          fmt::format("K={};lambda0={};lambda={};N1={};reference_constant={}", num(K), num(l0), num(lambda),
                      num(n1.value), num(reference_constant(n1))));
}

void sample(const ExperimentConfig &cfg, const fs::path &dir, Summary &sum, std::ostream &log) {
  const LevyModel model = build_model(cfg.model);
  const auto &s = cfg.sample;
  SamplerOptions opts;
  opts.truncation = s.truncation;
  const IncrementSampler sampler(model, opts);
  std::vector<double> xi(s.xi_count);
  for (std::size_t k = 0; k < s.xi_count; ++k)
    xi[k] = -s.xi_max + 2.0 * s.xi_max * static_cast<double>(k) / static_cast<double>(s.xi_count - 1);
  EcfConfig ec;
  ec.t = s.t;
  ec.n_paths = s.n_paths;
  ec.steps = s.steps;
  ec.seed = cfg.seed;
  const auto rep = ecf_report(model, xi, ec, opts);
  // The truncated sampler for general densities drops the jumps below the
  // cutoff; their law shifts the ECF by at most |theory| (e^{t xi^2 v / 2} - 1)
  // with v the neglected variance, added to the statistical line.
  const double v = sampler.neglected_variance();
  bool pass = true;
  {
    CsvWriter w(dir / "ecf.csv");
    w.header({"xi", "ecf_re", "ecf_im", "theory_re", "theory_im", "abs_dev", "truncation_bias"});
    for (const auto &p : rep.points) {
      const double bias = std::abs(p.theory) * std::expm1(s.t * p.xi * p.xi * v / 2.0);
      pass = pass && p.abs_dev < rep.reference_line + bias;
      w.row({p.xi, p.ecf.real(), p.ecf.imag(), p.theory.real(), p.theory.imag(), p.abs_dev, bias});
    }
  }
  sum.add("ecf", pass ? "pass" : "fail",
          fmt::format("max_deviation={};reference_line={};neglected_variance={};n_paths={}", num(rep.max_deviation),
                      num(rep.reference_line), num(v), rep.n_paths),
          pass);
  log << fmt::format("ecf max deviation {:.3g} (line {:.3g})\n", rep.max_deviation, rep.reference_line);

  // Exported trajectories: streams above the ECF batch.
  const auto grid = time_grid(s.t, s.dt);
  for (std::uint64_t i = 0; i < s.export_paths; ++i) {
    RngStream rng(cfg.seed, (1ull << 40) + i);
    const auto path = sample_path(sampler, grid, rng);
    CsvWriter w(dir / fmt::format("path_{}.csv", i));
    w.header({"t", "value"});
    for (std::size_t k = 0; k < path.t.size(); ++k) w.row({path.t[k], path.values[k]});
  }
  SolveConfig sc{cfg.solver.x0, cfg.solver.t_end, cfg.solver.dt, s.export_paths, cfg.seed};
  const auto sols = euler_batch(sampler, build_drift(cfg.drift), sc, Exec::parallel);
  CsvWriter w(dir / "solutions.csv");
  w.header({"path_id", "t", "value"});
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t k = 0; k < sols[i].path.t.size(); ++k)
      w.row({static_cast<std::uint64_t>(i), sols[i].path.t[k], sols[i].path.values[k]});
}

void write_krylov(CsvWriter &w, const KrylovReport &r) {
  w.row({r.experiment_id, r.lhs_estimate, r.lhs_ci_halfwidth, r.rhs_norm, r.reference_constant, r.ratio,
         r.truncation_bound, verdict_string(r)});
}

void krylov(const ExperimentConfig &cfg, const fs::path &dir, Summary &sum, std::ostream &log) {
  const LevyModel model = build_model(cfg.model);
  const DriftSpec a = build_drift(cfg.drift);
  const auto ctx = make_krylov_context(model, a.K(), policy_of(cfg.lambda), cfg.lambda.value, cfg.grid);
  log << fmt::format("lambda0 = {:.6g}, lambda = {:.6g}, N1 = {:.6g}, reference = {:.6g}\n", ctx.lambda0, ctx.lambda,
                     ctx.n1.value, ctx.reference);
  std::vector<KrylovProbe> probes;
  if (cfg.krylov.builtin_sweep) probes = builtin_sweep();
  for (const auto &f : cfg.test_functions) probes.push_back({f.id, build_test_function(f), f.t0, f.x0});
  if (probes.empty()) throw ConfigError("krylov: no test functions (enable krylov.builtin_sweep or list test_functions)");
  const McConfig mc = mc_config(cfg);
  const auto reports = bound_sweep(ctx, a, probes, mc);

  CsvWriter w(dir / "krylov.csv");
  w.comment(fmt::format("model={} drift={} lambda0={} lambda={} N1={} n_paths={} dt={} seed={}", model.describe(),
                        a.describe(), num(ctx.lambda0), num(ctx.lambda), num(ctx.n1.value), mc.n_paths, num(mc.dt),
                        mc.seed));
  w.header({"experiment_id", "lhs", "ci", "rhs_norm", "ref_const", "ratio", "truncation_bound", "verdict"});
  for (const auto &r : reports) {
    write_krylov(w, r);
    sum.add("krylov:" + r.experiment_id, verdict_string(r),
            fmt::format("lhs={};ci={};rhs_norm={};ratio={}", num(r.lhs_estimate), num(r.lhs_ci_halfwidth),
                        num(r.rhs_norm), num(r.ratio)),
            r.pass);
  }
  if (cfg.krylov.local) {
    std::vector<std::pair<std::string, TestFunction>> fs_local;
    for (const auto &f : cfg.test_functions) fs_local.emplace_back(f.id, build_test_function(f));
    if (fs_local.empty()) fs_local.emplace_back("box_t1_x2", TestFunction::indicator({0.0, 1.0, -1.0, 1.0}));
    for (const auto &[id, f] : fs_local) {
      const auto r = krylov_local_mc(ctx, a, f, cfg.krylov.local_m, cfg.krylov.local_t, cfg.krylov.local_x0, mc,
                                     "local:" + id);
      write_krylov(w, r);
      sum.add("krylov:" + r.experiment_id, verdict_string(r),
              fmt::format("lhs={};ci={};rhs_norm={};ratio={}", num(r.lhs_estimate), num(r.lhs_ci_halfwidth),
                          num(r.rhs_norm), num(r.ratio)),
              r.pass);
    }
  }
}

void resolvent(const ExperimentConfig &cfg, const fs::path &dir, Summary &sum, std::ostream &log) {
  if (cfg.test_functions.empty()) throw ConfigError("resolvent: test_functions must list the function to transform");
  const LevyModel model = build_model(cfg.model);
  const auto ctx = make_krylov_context(model, 0.0, policy_of(cfg.lambda), cfg.lambda.value, cfg.grid);
  const auto &fc = cfg.test_functions.front();
  const TestFunction f = build_test_function(fc);
  const auto &r = cfg.resolvent;
  OracleGrid og{r.t_range[0], r.t_range[1], r.nt, r.x_range[0], r.x_range[1], r.nx};
  const auto field = resolvent_oracle(model, f, ctx.lambda, og);
  double vmax = 0.0;
  {
    CsvWriter w(dir / "resolvent.csv");
    w.header({"t", "x", "v"});
    const auto &g = field.grid;
    for (std::size_t it = 0; it < g.t.size; ++it)
      for (std::size_t ix = 0; ix < g.x.size; ++ix) {
        vmax = std::max(vmax, g(it, ix));
        if (it % r.dump_stride == 0 && ix % r.dump_stride == 0) w.row({g.t.at(it), g.x.at(ix), g(it, ix)});
      }
  }
  const double bound = ctx.reference * l2_norm(f);
  sum.add("oracle_bound", vmax <= bound ? "pass" : "fail",
          fmt::format("sup_v={};reference_times_norm={};resolvent_constant={}", num(vmax), num(bound),
                      num(ctx.resolvent_constant)),
          vmax <= bound);

  McConfig mc = mc_config(cfg);
  mc.n_paths = r.mc_paths;
  std::vector<KrylovProbe> probes;
  for (const auto &p : r.probes) probes.push_back({fmt::format("probe({},{})", p[0], p[1]), f, p[0], p[1]});
  const auto reports = bound_sweep(ctx, DriftSpec::constant(0.0), probes, mc);
  CsvWriter w(dir / "probes.csv");
  w.header({"t0", "x0", "oracle", "mc", "ci", "rel_err", "verdict"});
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double oracle = field.at(probes[i].t0, probes[i].x0);
    const double mcv = reports[i].lhs_estimate;
    const double rel = std::abs(mcv - oracle) / std::abs(oracle);
    const bool pass = rel <= r.tolerance;
    w.row({probes[i].t0, probes[i].x0, oracle, mcv, reports[i].lhs_ci_halfwidth, rel, pass ? "pass" : "fail"});
    sum.add("oracle:" + probes[i].id, pass ? "pass" : "fail",
            fmt::format("oracle={};mc={};rel_err={}", num(oracle), num(mcv), num(rel)), pass);
    log << fmt::format("{}: oracle {:.6g}, mc {:.6g}, rel err {:.3g}\n", probes[i].id, oracle, mcv, rel);
  }
}

void converge(const ExperimentConfig &cfg, const fs::path &dir, Summary &sum, std::ostream &log) {
  const LevyModel model = build_model(cfg.model);
  DriftConfig base_cfg = cfg.drift;
  base_cfg.mollify = 0.0;
  const DriftSpec a = build_drift(base_cfg);
  LadderConfig lc;
  lc.eps = cfg.ladder.eps;
  lc.x0 = cfg.solver.x0;
  lc.t_end = cfg.solver.t_end;
  lc.dt = cfg.solver.dt;
  lc.n_paths = cfg.solver.n_paths;
  lc.seed = cfg.seed;
  lc.drift_tol = cfg.ladder.drift_tol;
  lc.aldous = {cfg.ladder.l_grid, cfg.ladder.r_ladder, cfg.ladder.tau_grid, cfg.ladder.eps_tol};
  lc.sampler.truncation = cfg.sample.truncation;
  const auto rep = mollification_ladder(model, a, lc);

  CsvWriter w(dir / "convergence.csv");
  w.comment(fmt::format("model={} drift={} n_paths={} dt={} t_end={} seed={} drift_tol={} eps_tol={}",
                        model.describe(), a.describe(), lc.n_paths, num(lc.dt), num(lc.t_end), lc.seed,
                        num(lc.drift_tol), num(lc.aldous.eps_tol)));
  w.section("LADDER");
  w.header({"rung", "eps", "eps_next", "gap_median", "gap_q90", "gap_max"});
  for (std::size_t k = 0; k < rep.pathwise_gap.size(); ++k)
    w.row({static_cast<std::uint64_t>(k), rep.ladder[k], rep.ladder[k + 1], rep.pathwise_gap[k].median,
           rep.pathwise_gap[k].q90, rep.pathwise_gap[k].max});
  w.section("KS");
  w.header({"rung", "ks_distance", "critical_95"});
  for (std::size_t k = 0; k < rep.ks_distances.size(); ++k)
    w.row({static_cast<std::uint64_t>(k), rep.ks_distances[k], rep.ks_critical[k]});
  w.section("ALDOUS");
  w.header({"rung", "kind", "l_or_r", "tau", "probability"});
  for (std::size_t k = 0; k < rep.aldous.size(); ++k) {
    const auto &tab = rep.aldous[k];
    for (std::size_t i = 0; i < tab.l_grid.size(); ++i)
      w.row({static_cast<std::uint64_t>(k), "sup_exceed", tab.l_grid[i], "", tab.sup_exceed[i]});
    for (std::size_t ir = 0; ir < tab.r_ladder.size(); ++ir)
      for (std::size_t it = 0; it < tab.tau_grid.size(); ++it)
        w.row({static_cast<std::uint64_t>(k), "displacement", tab.r_ladder[ir], tab.tau_grid[it],
               tab.displacement[ir][it]});
  }
  w.section("DRIFT_GAP");
  w.header({"rung", "probability"});
  for (std::size_t k = 0; k < rep.drift_integral_gap.size(); ++k)
    w.row({static_cast<std::uint64_t>(k), rep.drift_integral_gap[k]});

  const double first = rep.pathwise_gap.front().median, last = rep.pathwise_gap.back().median;
  const bool gap_ok = first >= 2.0 * last;
  sum.add("gap_reduction", gap_ok ? "pass" : "fail",
          fmt::format("median_first={};median_last={}", num(first), num(last)), gap_ok);
  bool ks_ok = true;
  for (std::size_t k = 1; k < rep.ks_distances.size(); ++k)
    ks_ok = ks_ok && rep.ks_distances[k] <= rep.ks_distances[k - 1] + rep.ks_critical[k];
  sum.add("ks_monotone", ks_ok ? "pass" : "fail", fmt::format("critical_95={}", num(rep.ks_critical.front())), ks_ok);
  bool tight = true;
  for (const auto &tab : rep.aldous) {
    bool below = false;
    for (std::size_t i = 0; i < tab.sup_exceed.size(); ++i) {
      if (i > 0 && tab.sup_exceed[i] > tab.sup_exceed[i - 1]) tight = false;
      below = below || tab.sup_exceed[i] < 0.05;
    }
    tight = tight && below;
  }
  sum.add("aldous", tight ? "pass" : "fail", fmt::format("rungs={}", rep.aldous.size()), tight);
  log << fmt::format("median gap {:.4g} -> {:.4g}\n", first, last);
}

} // namespace

int run(const CliRequest &req, std::ostream &log, std::ostream &err) {
  try {
    ExperimentConfig cfg = load_config(req.config_path, req.overrides);
    if (req.seed) cfg.seed = *req.seed;
    if (req.out_dir) cfg.output_dir = *req.out_dir;
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    Summary sum;
    if (req.subcommand == "check-psi")
      check_psi(cfg, dir, sum, log);
    else if (req.subcommand == "sample")
      sample(cfg, dir, sum, log);
    else if (req.subcommand == "krylov")
      krylov(cfg, dir, sum, log);
    else if (req.subcommand == "resolvent")
      resolvent(cfg, dir, sum, log);
    else if (req.subcommand == "converge")
      converge(cfg, dir, sum, log);
    else {
      err << "unknown subcommand: " << req.subcommand << "\n";
      return 2;
    }
    sum.write(dir, cfg.experiment_id);
    return sum.all_pass ? 0 : 1;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError &e) {
    err << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char **argv) {
  CLI::App app{"Lévy-driven SDE experiments"};
  CliRequest req;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("--config", req.config_path, "experiment JSON file")->required();
  app.add_option("--set", req.overrides, "dotted.key=value override (repeatable)");
  auto *out_opt = app.add_option("--out", out, "output directory");
  auto *seed_opt = app.add_option("--seed", seed, "master seed");
  app.require_subcommand(1);
  for (const char *name : {"check-psi", "sample", "krylov", "resolvent", "converge"})
    app.add_subcommand(name)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }
  req.subcommand = app.get_subcommands().front()->get_name();
  if (out_opt->count()) req.out_dir = out;
  if (seed_opt->count()) req.seed = seed;
  return run(req, std::cout, std::cerr);
}

} // namespace levylab
