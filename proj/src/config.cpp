#include "levylab/config.hpp"

#include "levylab/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace levylab {

using json = nlohmann::ordered_json;

bool ExperimentConfig::operator==(const ExperimentConfig &o) const {
  return experiment_id == o.experiment_id && seed == o.seed && output_dir == o.output_dir && model == o.model &&
         grid.xi_min == o.grid.xi_min && grid.xi_max == o.grid.xi_max &&
         condition.ratio_threshold == o.condition.ratio_threshold &&
         condition.slope_tolerance == o.condition.slope_tolerance && drift == o.drift &&
         test_functions == o.test_functions && lambda == o.lambda && solver == o.solver && krylov == o.krylov &&
         ladder == o.ladder && sample == o.sample && resolvent == o.resolvent;
}

namespace {

// Thrown while reading; translated into a line-anchored ConfigError.
struct KeyError {
  std::string path;
  std::string message;
};

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

void read(const json &j, double &out, const std::string &path) {
  if (!j.is_number()) throw KeyError{path, "expected a number"};
  out = j.get<double>();
  if (!std::isfinite(out)) throw KeyError{path, "must be finite"};
}

void read(const json &j, std::uint64_t &out, const std::string &path) {
  if (j.is_number_unsigned()) {
    out = j.get<std::uint64_t>();
    return;
  }
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    out = static_cast<std::uint64_t>(j.get<std::int64_t>());
    return;
  }
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) {
      out = static_cast<std::uint64_t>(d);
      return;
    }
  }
  throw KeyError{path, "expected a nonnegative integer"};
}

void read(const json &j, bool &out, const std::string &path) {
  if (!j.is_boolean()) throw KeyError{path, "expected true or false"};
  out = j.get<bool>();
}

void read(const json &j, std::string &out, const std::string &path) {
  if (!j.is_string()) throw KeyError{path, "expected a string"};
  out = j.get<std::string>();
}

template <std::size_t N> void read(const json &j, std::array<double, N> &out, const std::string &path) {
  if (!j.is_array() || j.size() != N) throw KeyError{path, fmt::format("expected an array of {} numbers", N)};
  for (std::size_t i = 0; i < N; ++i) read(j[i], out[i], join(path, std::to_string(i)));
}

void read(const json &j, TestFunctionConfig &f, const std::string &path);

template <class T> void read(const json &j, std::vector<T> &out, const std::string &path) {
  if (!j.is_array()) throw KeyError{path, "expected an array"};
  out.assign(j.size(), T{});
  for (std::size_t i = 0; i < j.size(); ++i) read(j[i], out[i], join(path, std::to_string(i)));
}

/// Strict object reader: every key must be consumed.
class Obj {
public:
  Obj(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw KeyError{path_, "expected an object"};
  }
  template <class T> Obj &opt(const char *key, T &out) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) read(*it, out, join(path_, key));
    return *this;
  }
  bool has(const char *key) const { return j_.contains(key); }
  const json *child(const char *key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string path(const char *key) const { return join(path_, key); }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw KeyError{join(path_, it.key()), "unknown key"};
  }

private:
  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string &path, const std::string &message) {
  if (!ok) throw KeyError{path, message};
}

void read(const json &j, TestFunctionConfig &f, const std::string &path) {
  Obj o(j, path);
  o.opt("id", f.id).opt("family", f.family).opt("box", f.box).opt("height", f.height).opt("center_t", f.center_t);
  o.opt("center_x", f.center_x).opt("sd_t", f.sd_t).opt("sd_x", f.sd_x).opt("amplitude", f.amplitude);
  o.opt("truncation", f.truncation).opt("scale", f.scale).opt("t0", f.t0).opt("x0", f.x0);
  o.done();
  require(f.family == "indicator_box" || f.family == "gaussian_bump", join(path, "family"),
          "must be indicator_box or gaussian_bump");
  require(f.scale >= 0.0, join(path, "scale"), "must be >= 0");
}

ExperimentConfig from_json(const json &root) {
  ExperimentConfig c;
  Obj top(root, "");
  top.opt("experiment_id", c.experiment_id).opt("seed", c.seed).opt("output_dir", c.output_dir);

  if (const json *j = top.child("model")) {
    auto &m = c.model;
    Obj o(*j, "model");
    o.opt("c", m.c).opt("Q", m.Q).opt("closed_form", m.closed_form);
    if (const json *nu = o.child("nu")) {
      Obj n(*nu, "model.nu");
      n.opt("variant", m.variant).opt("alpha", m.alpha).opt("scale", m.scale).opt("atoms", m.atoms);
      n.opt("family", m.density_family).opt("weight", m.weight).opt("tempering", m.tempering).opt("rate", m.rate);
      n.opt("mean", m.mean).opt("sd", m.sd);
      n.done();
    }
    o.done();
    const std::set<std::string> variants{"stable_density", "point_masses", "density", "gaussian"};
    require(variants.count(m.variant), "model.nu.variant", "must be stable_density, point_masses, density or gaussian");
    require(m.density_family == "tempered_stable" || m.density_family == "normal_jumps", "model.nu.family",
            "must be tempered_stable or normal_jumps");
    const std::set<std::string> forms{"auto", "symmetric_stable", "compound_poisson", "custom"};
    require(forms.count(m.closed_form), "model.closed_form",
            "must be auto, symmetric_stable, compound_poisson or custom");
  }
  if (const json *j = top.child("grid")) {
    Obj o(*j, "grid");
    o.opt("xi_min", c.grid.xi_min).opt("xi_max", c.grid.xi_max);
    o.done();
  }
  if (const json *j = top.child("condition")) {
    Obj o(*j, "condition");
    o.opt("ratio_threshold", c.condition.ratio_threshold).opt("slope_tolerance", c.condition.slope_tolerance);
    o.done();
  }
  if (const json *j = top.child("drift")) {
    auto &d = c.drift;
    Obj o(*j, "drift");
    o.opt("family", d.family).opt("K", d.K).opt("value", d.value).opt("period_t", d.period_t);
    o.opt("period_x", d.period_x).opt("table_t", d.table_t).opt("table_x", d.table_x);
    o.opt("table_values", d.table_values).opt("table_csv", d.table_csv).opt("mollify", d.mollify);
    o.done();
    const std::set<std::string> fams{"constant", "sign_x", "checkerboard", "table"};
    require(fams.count(d.family), "drift.family", "must be constant, sign_x, checkerboard or table");
    require(d.K >= 0.0, "drift.K", "must be >= 0");
    require(d.mollify >= 0.0, "drift.mollify", "must be >= 0");
  }
  if (const json *j = top.child("test_functions")) read(*j, c.test_functions, "test_functions");
  if (const json *j = top.child("lambda")) {
    Obj o(*j, "lambda");
    o.opt("policy", c.lambda.policy);
    if (o.has("floor")) o.opt("floor", c.lambda.value);
    o.opt("value", c.lambda.value);
    o.done();
    require(c.lambda.policy == "auto_lambda0_or" || c.lambda.policy == "fixed", "lambda.policy",
            "must be auto_lambda0_or or fixed");
    require(c.lambda.value > 0.0, "lambda.value", "must be > 0");
  }
  if (const json *j = top.child("solver")) {
    auto &s = c.solver;
    Obj o(*j, "solver");
    o.opt("x0", s.x0).opt("t_end", s.t_end).opt("dt", s.dt).opt("n_paths", s.n_paths);
    o.done();
    require(s.dt > 0.0, "solver.dt", "must be > 0");
    require(s.t_end > 0.0, "solver.t_end", "must be > 0");
    require(s.n_paths >= 2, "solver.n_paths", "must be >= 2");
  }
  if (const json *j = top.child("krylov")) {
    auto &k = c.krylov;
    Obj o(*j, "krylov");
    o.opt("builtin_sweep", k.builtin_sweep).opt("horizon", k.horizon).opt("truncation_tolerance", k.truncation_tolerance);
    o.opt("local", k.local).opt("local_m", k.local_m).opt("local_t", k.local_t).opt("local_x0", k.local_x0);
    o.done();
    require(k.local_m > 0.0, "krylov.local_m", "must be > 0");
    require(k.local_t > 0.0, "krylov.local_t", "must be > 0");
  }
  if (const json *j = top.child("ladder")) {
    auto &l = c.ladder;
    Obj o(*j, "ladder");
    o.opt("eps", l.eps).opt("drift_tol", l.drift_tol).opt("l_grid", l.l_grid).opt("r_ladder", l.r_ladder);
    o.opt("tau_grid", l.tau_grid).opt("eps_tol", l.eps_tol);
    o.done();
    require(l.eps.size() >= 3, "ladder.eps", "needs at least three rungs");
    for (std::size_t i = 1; i < l.eps.size(); ++i)
      require(l.eps[i] < l.eps[i - 1] && l.eps[i] > 0.0, "ladder.eps", "must be positive and strictly decreasing");
  }
  if (const json *j = top.child("sample")) {
    auto &s = c.sample;
    Obj o(*j, "sample");
    o.opt("t", s.t).opt("n_paths", s.n_paths).opt("steps", s.steps).opt("xi_max", s.xi_max);
    o.opt("xi_count", s.xi_count).opt("export_paths", s.export_paths).opt("dt", s.dt).opt("truncation", s.truncation);
    o.done();
    require(s.n_paths >= 10000, "sample.n_paths", "must be >= 10000");
    require(s.steps >= 1, "sample.steps", "must be >= 1");
    require(s.xi_count >= 2, "sample.xi_count", "must be >= 2");
  }
  if (const json *j = top.child("resolvent")) {
    auto &r = c.resolvent;
    Obj o(*j, "resolvent");
    o.opt("t_range", r.t_range).opt("nt", r.nt).opt("x_range", r.x_range).opt("nx", r.nx).opt("probes", r.probes);
    o.opt("mc_paths", r.mc_paths).opt("tolerance", r.tolerance).opt("dump_stride", r.dump_stride);
    o.done();
    require(r.dump_stride >= 1, "resolvent.dump_stride", "must be >= 1");
    require(r.mc_paths >= 2, "resolvent.mc_paths", "must be >= 2");
  }
  top.done();
  return c;
}

json to_json(const TestFunctionConfig &f) {
  json j;
  j["id"] = f.id;
  j["family"] = f.family;
  if (f.family == "indicator_box") {
    j["box"] = f.box;
    j["height"] = f.height;
  } else {
    j["center_t"] = f.center_t;
    j["center_x"] = f.center_x;
    j["sd_t"] = f.sd_t;
    j["sd_x"] = f.sd_x;
    j["amplitude"] = f.amplitude;
    j["truncation"] = f.truncation;
  }
  j["scale"] = f.scale;
  j["t0"] = f.t0;
  j["x0"] = f.x0;
  return j;
}

json to_json(const ExperimentConfig &c) {
  json j;
  j["experiment_id"] = c.experiment_id;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  const auto &m = c.model;
  json nu;
  nu["variant"] = m.variant;
  if (m.variant == "stable_density") {
    nu["alpha"] = m.alpha;
    nu["scale"] = m.scale;
  } else if (m.variant == "point_masses") {
    nu["atoms"] = m.atoms;
  } else if (m.variant == "density") {
    nu["family"] = m.density_family;
    if (m.density_family == "tempered_stable") {
      nu["weight"] = m.weight;
      nu["alpha"] = m.alpha;
      nu["tempering"] = m.tempering;
    } else {
      nu["rate"] = m.rate;
      nu["mean"] = m.mean;
      nu["sd"] = m.sd;
    }
  }
  j["model"] = {{"c", m.c}, {"Q", m.Q}, {"nu", nu}, {"closed_form", m.closed_form}};
  j["grid"] = {{"xi_min", c.grid.xi_min}, {"xi_max", c.grid.xi_max}};
  j["condition"] = {{"ratio_threshold", c.condition.ratio_threshold},
                    {"slope_tolerance", c.condition.slope_tolerance}};
  const auto &d = c.drift;
  json dj{{"family", d.family}};
  if (d.family == "constant") dj["value"] = d.value;
  if (d.family == "sign_x" || d.family == "checkerboard") dj["K"] = d.K;
  if (d.family == "checkerboard") {
    dj["period_t"] = d.period_t;
    dj["period_x"] = d.period_x;
  }
  if (d.family == "table" && !d.table_csv.empty()) {
    dj["table_csv"] = d.table_csv;
  } else if (d.family == "table") {
    dj["table_t"] = d.table_t;
    dj["table_x"] = d.table_x;
    dj["table_values"] = d.table_values;
  }
  dj["mollify"] = d.mollify;
  j["drift"] = dj;
  j["test_functions"] = json::array();
  for (const auto &f : c.test_functions) j["test_functions"].push_back(to_json(f));
  j["lambda"] = {{"policy", c.lambda.policy}, {c.lambda.policy == "fixed" ? "value" : "floor", c.lambda.value}};
  const auto &s = c.solver;
  j["solver"] = {{"x0", s.x0}, {"t_end", s.t_end}, {"dt", s.dt}, {"n_paths", s.n_paths}};
  const auto &k = c.krylov;
  j["krylov"] = {{"builtin_sweep", k.builtin_sweep}, {"horizon", k.horizon},
                 {"truncation_tolerance", k.truncation_tolerance}, {"local", k.local}, {"local_m", k.local_m},
                 {"local_t", k.local_t}, {"local_x0", k.local_x0}};
  const auto &l = c.ladder;
  j["ladder"] = {{"eps", l.eps},           {"drift_tol", l.drift_tol}, {"l_grid", l.l_grid},
                 {"r_ladder", l.r_ladder}, {"tau_grid", l.tau_grid},   {"eps_tol", l.eps_tol}};
  const auto &sa = c.sample;
  j["sample"] = {{"t", sa.t},           {"n_paths", sa.n_paths},       {"steps", sa.steps},
                 {"xi_max", sa.xi_max}, {"xi_count", sa.xi_count},     {"export_paths", sa.export_paths},
                 {"dt", sa.dt},         {"truncation", sa.truncation}};
  const auto &r = c.resolvent;
  j["resolvent"] = {{"t_range", r.t_range},   {"nt", r.nt},
                    {"x_range", r.x_range},   {"nx", r.nx},
                    {"probes", r.probes},     {"mc_paths", r.mc_paths},
                    {"tolerance", r.tolerance}, {"dump_stride", r.dump_stride}};
  return j;
}

std::size_t line_of(const std::string &text, std::size_t pos) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Line of the deepest key of a dotted path found in order in the text.
std::size_t locate(const std::string &text, const std::string &path) {
  std::size_t pos = 0, found = std::string::npos;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty() || std::all_of(part.begin(), part.end(), ::isdigit)) continue;
    const auto p = text.find("\"" + part + "\"", pos);
    if (p == std::string::npos) break;
    found = pos = p;
  }
  return found == std::string::npos ? 1 : line_of(text, found);
}

json::json_pointer pointer_of(const std::string &dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError(fmt::format("--set {}: empty key component", dotted));
    p += "/" + part;
  }
  return json::json_pointer(p);
}

} // namespace

ExperimentConfig parse_config(const std::string &text, const std::string &source,
                              const std::vector<std::string> &overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    const auto pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    throw ConfigError(fmt::format("{}:{}: malformed JSON: {}", source, line_of(text, pos), e.what()));
  }
  std::vector<std::string> overridden;
  for (const auto &o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("--set {}: expected key=value", o));
    const std::string key = o.substr(0, eq), raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error &) {
      value = raw;
    }
    try {
      root[pointer_of(key)] = value;
    } catch (const json::exception &e) {
      throw ConfigError(fmt::format("--set {}: {}", o, e.what()));
    }
    overridden.push_back(key);
  }
  try {
    return from_json(root);
  } catch (const KeyError &e) {
    for (const auto &k : overridden)
      if (e.path == k || e.path.rfind(k + ".", 0) == 0)
        throw ConfigError(fmt::format("--set {}: {}: {}", k, e.path, e.message));
    throw ConfigError(fmt::format("{}:{}: {}: {}", source, locate(text, e.path), e.path.empty() ? "<root>" : e.path,
                                  e.message));
  }
}

ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, overrides);
}

std::string serialize_config(const ExperimentConfig &cfg) { return to_json(cfg).dump(2) + "\n"; }

LevyModel build_model(const ModelConfig &m) {
  LevyModel model = [&] {
    if (m.variant == "stable_density") {
      if (m.c != 0.0 || m.Q != 0.0) {
        if (!(m.alpha > 0.0 && m.alpha < 2.0)) throw ConfigError("model.nu.alpha must lie in (0, 2) with c or Q set");
        return LevyModel(m.c, m.Q, StableMeasure{m.alpha, m.scale});
      }
      return LevyModel::symmetric_stable(m.alpha, m.scale);
    }
    if (m.variant == "point_masses") {
      std::vector<PointMass> atoms;
      for (const auto &a : m.atoms) atoms.push_back({a[0], a[1]});
      return LevyModel(m.c, m.Q, PointMasses{atoms});
    }
    if (m.variant == "gaussian") return LevyModel::gaussian(m.Q, m.c);
    if (m.density_family == "normal_jumps") {
      if (m.Q != 0.0) throw ConfigError("model.Q must be 0 for normal_jumps");
      return LevyModel::compound_poisson_normal(m.rate, m.mean, m.sd, m.c);
    }
    if (m.Q != 0.0) throw ConfigError("model.Q must be 0 for tempered_stable");
    return LevyModel::tempered_stable(m.weight, m.alpha, m.tempering, m.c);
  }();
  if (m.closed_form == "custom") return model.without_closed_form();
  if (m.closed_form != "auto" && m.closed_form != to_string(model.closed_form()))
    throw ConfigError(fmt::format("model.closed_form: {} does not match the measure (has {})", m.closed_form,
                                  to_string(model.closed_form())));
  return model;
}

DriftSpec build_drift(const DriftConfig &d) {
  DriftSpec base = [&] {
    if (d.family == "constant") return DriftSpec::constant(d.value);
    if (d.family == "sign_x") return DriftSpec::sign_x(d.K);
    if (d.family == "checkerboard") return DriftSpec::checkerboard(d.K, d.period_t, d.period_x);
    if (!d.table_csv.empty()) return load_drift_table(d.table_csv);
    auto grid = [](const std::array<double, 3> &g) {
      if (g[2] < 1.0 || g[2] != std::floor(g[2])) throw ConfigError("drift table sizes must be positive integers");
      return UniformGrid{g[0], g[1], static_cast<std::size_t>(g[2])};
    };
    return DriftSpec::table(grid(d.table_t), grid(d.table_x), d.table_values);
  }();
  return d.mollify > 0.0 ? mollify(base, d.mollify) : base;
}

TestFunction build_test_function(const TestFunctionConfig &f) {
  TestFunction base = f.family == "indicator_box"
                          ? TestFunction::indicator({f.box[0], f.box[1], f.box[2], f.box[3]}, f.height)
                          : TestFunction::gaussian_bump(f.center_t, f.center_x, f.sd_t, f.sd_x, f.amplitude,
                                                        f.truncation);
  return f.scale == 1.0 ? base : base.scaled(f.scale);
}

} // namespace levylab
