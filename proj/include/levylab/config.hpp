#pragma once

#include "levylab/convergence.hpp"
#include "levylab/drift.hpp"
#include "levylab/krylov.hpp"
#include "levylab/levy_condition.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/test_function.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace levylab {

struct ModelConfig {
  double c = 0.0;
  double Q = 0.0;
  /// stable_density | point_masses | density | gaussian
  std::string variant = "stable_density";
  double alpha = 1.5;
  double scale = 1.0;
  std::vector<std::array<double, 2>> atoms; // (z, weight)
  /// For variant density: tempered_stable | normal_jumps
  std::string density_family = "tempered_stable";
  double weight = 1.0;
  double tempering = 1.0;
  double rate = 1.0;
  double mean = 0.0;
  double sd = 1.0;
  /// auto | symmetric_stable | compound_poisson | custom (quadrature only)
  std::string closed_form = "auto";

  bool operator==(const ModelConfig &) const = default;
};

struct DriftConfig {
  /// constant | sign_x | checkerboard | table
  std::string family = "sign_x";
  double K = 1.0;
  double value = 0.0;
  double period_t = 1.0;
  double period_x = 1.0;
  std::array<double, 3> table_t{0.0, 1.0, 1.0}; // origin, step, size
  std::array<double, 3> table_x{0.0, 1.0, 1.0};
  std::vector<double> table_values;
  /// CSV file (t, x, value) used instead of the inline table when set.
  std::string table_csv;
  /// Mollification width applied to the drift (0 = none).
  double mollify = 0.0;

  bool operator==(const DriftConfig &) const = default;
};

struct TestFunctionConfig {
  std::string id = "f";
  /// indicator_box | gaussian_bump
  std::string family = "indicator_box";
  std::array<double, 4> box{0.0, 1.0, 0.0, 1.0}; // t0, t1, x0, x1
  double height = 1.0;
  double center_t = 0.0, center_x = 0.0;
  double sd_t = 1.0, sd_x = 1.0;
  double amplitude = 1.0;
  double truncation = 6.0;
  double scale = 1.0;
  /// Start point of the discounted functional.
  double t0 = 0.0, x0 = 0.0;

  bool operator==(const TestFunctionConfig &) const = default;
};

struct LambdaConfig {
  /// auto_lambda0_or (value acts as floor) | fixed
  std::string policy = "auto_lambda0_or";
  double value = 1.0;

  bool operator==(const LambdaConfig &) const = default;
};

struct SolverConfig {
  double x0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::uint64_t n_paths = 10000;

  bool operator==(const SolverConfig &) const = default;
};

struct KrylovSection {
  bool builtin_sweep = true;
  double horizon = 0.0;
  double truncation_tolerance = 0.01;
  bool local = true;
  double local_m = 5.0;
  double local_t = 1.0;
  double local_x0 = 0.0;

  bool operator==(const KrylovSection &) const = default;
};

struct LadderSection {
  std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
  double drift_tol = 0.05;
  std::vector<double> l_grid{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  std::vector<double> r_ladder{0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> tau_grid{0.0, 0.25, 0.5, 0.75};
  double eps_tol = 0.1;

  bool operator==(const LadderSection &) const = default;
};

struct SampleSection {
  double t = 1.0;
  std::uint64_t n_paths = 200000;
  std::uint64_t steps = 1;
  double xi_max = 5.0;
  std::uint64_t xi_count = 41;
  std::uint64_t export_paths = 5;
  double dt = 1e-2;
  double truncation = 1e-3;

  bool operator==(const SampleSection &) const = default;
};

struct ResolventSection {
  std::array<double, 2> t_range{-10.0, 20.0};
  std::uint64_t nt = 1024;
  std::array<double, 2> x_range{-40.0, 40.0};
  std::uint64_t nx = 2048;
  std::vector<std::array<double, 2>> probes{{0.0, 0.0}};
  std::uint64_t mc_paths = 100000;
  double tolerance = 0.05;
  std::uint64_t dump_stride = 8;

  bool operator==(const ResolventSection &) const = default;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  ModelConfig model;
  DyadicGrid grid;
  ConditionOptions condition;
  DriftConfig drift;
  std::vector<TestFunctionConfig> test_functions;
  LambdaConfig lambda;
  SolverConfig solver;
  KrylovSection krylov;
  LadderSection ladder;
  SampleSection sample;
  ResolventSection resolvent;

  bool operator==(const ExperimentConfig &other) const;
};

/// Parses JSON text. source names the origin in error messages, which have
/// the form "source:line: message". overrides are "dotted.key=value" pairs
/// applied before validation; values are read as JSON, falling back to a
/// plain string.
ExperimentConfig parse_config(const std::string &text, const std::string &source = "<config>",
                              const std::vector<std::string> &overrides = {});
ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &overrides = {});

/// Canonical JSON text (two-space indentation, stable key order).
std::string serialize_config(const ExperimentConfig &cfg);

LevyModel build_model(const ModelConfig &m);
DriftSpec build_drift(const DriftConfig &d);
TestFunction build_test_function(const TestFunctionConfig &f);

} // namespace levylab
