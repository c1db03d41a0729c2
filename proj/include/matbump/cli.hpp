#pragma once

// Command-line front end. A run is described by a RunConfig built from an
// optional JSON file, then global flags, then --set overrides; later sources
// win. Every output is a pure function of the config and the input files.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/operators.hpp"
#include "matbump/random.hpp"
#include "matbump/serialize.hpp"
#include "matbump/suites.hpp"
#include "matbump/svg.hpp"
#include "matbump/verify.hpp"
#include "matbump/weights.hpp"

namespace matbump {

struct GeneratorConfig {
  std::string kind = "identity";  // identity | power | random | scalar
  std::vector<double> gamma{0.0};
  std::vector<double> center{0.5};
  double angle = 0.0;
  double kappa = 6.0;
  double lambda = 0.5;
  std::vector<double> values;  // scalar: one value per cell
};

struct SparseConfig {
  std::string kind = "random";  // random | tower
  int depth = 3;
  double continue_prob = 0.7;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  int workers = 1;
  Census census = Census::dyadic;
  std::string out;

  // verify / report
  std::string suite = "all";
  int trials = 0;
  int budget = 0;
  int level = 0;
  bool experimental = false;
  std::vector<std::string> inputs;

  // geometry and generation
  int d = 1;
  int L = 6;
  double side = 1.0;
  int n = 1;
  GeneratorConfig generator;
  std::string name = "w";

  // constants and operators
  std::string w, u, v, f;
  std::vector<double> f_values;
  double p = 2.0, q = 2.0, alpha = 0.0;
  std::optional<YoungFn> phi, psi;
  std::string constant = "apq";  // ap | apq | bump
  std::string variant = "maximal";
  bool literal_inner_exponent = false;
  bool override_b_class = false;
  std::string method = "definitional";  // definitional | reducing | both
  std::string op = "averaging";
  std::vector<Cube> cubes;
  SparseConfig sparse;
  double t = 0.1;
  bool weak = false;
  bool compare = false;
};

namespace detail {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline GeneratorConfig generator_from_json(const json& j) {
  reject_unknown(j, {"kind", "gamma", "center", "angle", "kappa", "lambda", "values"}, "generator");
  GeneratorConfig g;
  take(j, "kind", g.kind);
  if (j.contains("gamma")) g.gamma = j.at("gamma").is_array() ? j.at("gamma").get<std::vector<double>>()
                                                               : std::vector<double>{j.at("gamma").get<double>()};
  take(j, "center", g.center);
  take(j, "angle", g.angle);
  take(j, "kappa", g.kappa);
  take(j, "lambda", g.lambda);
  take(j, "values", g.values);
  static const std::vector<std::string> kinds{"identity", "power", "random", "scalar"};
  if (std::find(kinds.begin(), kinds.end(), g.kind) == kinds.end())
    throw std::invalid_argument("unknown generator kind '" + g.kind + "'");
  return g;
}

inline SparseConfig sparse_from_json(const json& j) {
  reject_unknown(j, {"kind", "depth", "continue_prob"}, "sparse");
  SparseConfig s;
  take(j, "kind", s.kind);
  take(j, "depth", s.depth);
  take(j, "continue_prob", s.continue_prob);
  if (s.kind != "random" && s.kind != "tower") throw std::invalid_argument("unknown sparse family kind '" + s.kind + "'");
  return s;
}

inline void check_choice(const std::string& what, const std::string& v, const std::vector<std::string>& allowed) {
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
    throw std::invalid_argument("unknown " + what + " '" + v + "'");
}

}  // namespace detail

inline const std::vector<std::string>& operator_names() {
  static const std::vector<std::string> names{"identity", "averaging", "maximal",       "maximal_shifted",
                                              "aux_maximal", "sparse",  "frac_integral", "mollifier"};
  return names;
}

/// Schema check plus conversion; unknown keys are errors.
inline RunConfig run_config_from_json(const json& j) {
  using detail::take;
  detail::reject_unknown(j,
                         {"command", "seed", "workers", "census", "out", "suite", "trials", "budget", "level",
                          "experimental", "inputs", "d", "L", "side", "n", "generator", "name", "w", "u", "v", "f",
                          "f_values", "p", "q", "alpha", "phi", "psi", "constant", "variant",
                          "literal_inner_exponent", "override_b_class", "method", "operator", "cubes", "sparse", "t",
                          "weak", "compare"},
                         "config");
  RunConfig c;
  take(j, "command", c.command);
  take(j, "seed", c.seed);
  take(j, "workers", c.workers);
  if (j.contains("census")) c.census = census_from_string(j.at("census").get<std::string>());
  take(j, "out", c.out);
  take(j, "suite", c.suite);
  take(j, "trials", c.trials);
  take(j, "budget", c.budget);
  take(j, "level", c.level);
  take(j, "experimental", c.experimental);
  take(j, "inputs", c.inputs);
  take(j, "d", c.d);
  take(j, "L", c.L);
  take(j, "side", c.side);
  take(j, "n", c.n);
  if (j.contains("generator")) c.generator = detail::generator_from_json(j.at("generator"));
  take(j, "name", c.name);
  take(j, "w", c.w);
  take(j, "u", c.u);
  take(j, "v", c.v);
  take(j, "f", c.f);
  take(j, "f_values", c.f_values);
  take(j, "p", c.p);
  take(j, "q", c.q);
  take(j, "alpha", c.alpha);
  if (j.contains("phi")) c.phi = young_from_json(j.at("phi"));
  if (j.contains("psi")) c.psi = young_from_json(j.at("psi"));
  take(j, "constant", c.constant);
  take(j, "variant", c.variant);
  take(j, "literal_inner_exponent", c.literal_inner_exponent);
  take(j, "override_b_class", c.override_b_class);
  take(j, "method", c.method);
  take(j, "operator", c.op);
  if (j.contains("cubes"))
    for (const auto& q : j.at("cubes")) c.cubes.push_back(cube_from_json(q, c.d));
  if (j.contains("sparse")) c.sparse = detail::sparse_from_json(j.at("sparse"));
  take(j, "t", c.t);
  take(j, "weak", c.weak);
  take(j, "compare", c.compare);

  if (c.workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (c.trials < 0 || c.budget < 0 || c.level < 0) throw std::invalid_argument("trials, budget and level must be >= 0");
  if (c.n < 1 || c.n > 4) throw std::invalid_argument("n must be in [1, 4]");
  Grid(c.d, c.L, c.side).validate();
  detail::check_choice("constant", c.constant, {"ap", "apq", "bump"});
  detail::check_choice("method", c.method, {"definitional", "reducing", "both"});
  detail::check_choice("operator", c.op, operator_names());
  if (c.suite != "all") {
    const auto& names = suite_names();
    detail::check_choice("suite", c.suite, names);
  }
  bump_variant_from_string(c.variant);
  return c;
}

namespace detail {

struct CliContext {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

inline std::filesystem::path out_dir(const RunConfig& c, const char* fallback = nullptr) {
  std::string dir = c.out.empty() && fallback ? fallback : c.out;
  if (dir.empty()) return {};
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

inline WeightField load_field(const std::string& path, const char* role) {
  if (path.empty()) throw std::invalid_argument(std::string("config needs a weight file for '") + role + "'");
  return load_mwf1(path);
}

inline std::pair<WeightField, WeightField> load_pair(const RunConfig& c) {
  WeightField u = load_field(c.u.empty() ? c.w : c.u, "u");
  WeightField v = c.v.empty() ? u : load_field(c.v, "v");
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("dimension mismatch between u and v");
  return {std::move(u), std::move(v)};
}


// -------------------------------------------------------------------- gen

inline int cmd_gen(CliContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const Grid g(c.d, c.L, c.side);
  const GeneratorConfig& gc = c.generator;
  WeightField w;
  json prov = {{"generator", gc.kind}, {"d", c.d}, {"L", c.L}, {"side", c.side}, {"n", c.n}};
  if (gc.kind == "identity") {
    w = identity_field(g, c.n);
  } else if (gc.kind == "power") {
    std::array<double, kMaxSpaceDim> center{};
    if (gc.center.size() != 1 && static_cast<int>(gc.center.size()) != c.d)
      throw std::invalid_argument("center must have 1 or d entries");
    for (int i = 0; i < c.d; ++i) center[i] = gc.center.size() == 1 ? gc.center[0] : gc.center[i];
    w = gen_power_weight(g, c.n, gc.gamma, center, gc.angle);
    prov["gamma"] = gc.gamma;
    prov["center"] = std::vector<double>(center.begin(), center.begin() + c.d);
    prov["angle"] = gc.angle;
  } else if (gc.kind == "random") {
    w = gen_random_field(g, c.n, c.seed, gc.kappa, gc.lambda);
    prov["seed"] = c.seed;
    prov["kappa"] = gc.kappa;
    prov["lambda"] = gc.lambda;
  } else {
    if (c.n != 1) throw std::invalid_argument("scalar generator needs n = 1");
    if (gc.values.size() != g.cells()) throw std::invalid_argument("scalar generator needs one value per cell");
    w = scalar_field(g, gc.values);
    prov["values"] = gc.values;
  }
  const auto dir = out_dir(c, ".");
  const auto path = dir / (c.name + ".mwf");
  save_mwf1(path.string(), w);
  prov["file"] = (c.name + ".mwf");
  write_text(dir / (c.name + ".json"), canonical(prov));
  ctx.out << canonical(prov);
  return 0;
}

// --------------------------------------------------------------- constant

inline BumpParams bump_params(const RunConfig& c) {
  BumpParams bp;
  bp.p = c.p;
  bp.q = c.q;
  bp.alpha = c.alpha;
  bp.variant = bump_variant_from_string(c.variant);
  if (!c.phi) throw std::invalid_argument("bump constant needs 'phi'");
  bp.phi = *c.phi;
  bp.psi = c.psi;
  if (bp.variant != BumpVariant::maximal && !bp.psi) throw std::invalid_argument("this bump variant needs 'psi'");
  bp.literal_inner_exponent = c.literal_inner_exponent;
  bp.override_b_class = c.override_b_class;
  return bp;
}

inline std::vector<ConstantReport> compute_constants(const RunConfig& c) {
  std::vector<ConstantReport> rows;
  const bool def = c.method != "reducing", red = c.method != "definitional";
  const ScanOptions scan{c.workers};
  if (c.constant == "ap") {
    const WeightField w = load_field(c.w.empty() ? c.u : c.w, "w");
    const CubeCensus census = make_census(w.grid, c.census);
    if (red) throw std::invalid_argument("the matrix A_p constant has no reducing form here; use constant=apq");
    rows.push_back(matrix_ap(w, c.p, census, scan));
    return rows;
  }
  const auto [u, v] = load_pair(c);
  const CubeCensus census = make_census(u.grid, c.census);
  if (c.constant == "apq") {
    if (def) rows.push_back(two_weight_apq(u, v, c.p, c.q, c.alpha, census, scan));
    if (red) rows.push_back(two_weight_apq_reducing(u, v, c.p, c.q, c.alpha, census, scan));
  } else {
    const BumpParams bp = bump_params(c);
    if (def) rows.push_back(bump_constant(u, v, bp, census, scan));
    if (red) rows.push_back(bump_constant_reducing(u, v, bp, census, scan));
  }
  return rows;
}

inline void emit_rows(CliContext& ctx, const std::vector<ConstantReport>& rows, const std::string& stem) {
  std::string csv = csv_header() + "\n";
  json arr = json::array();
  for (const auto& r : rows) {
    csv += csv_row(r) + "\n";
    arr.push_back(report_to_json(r));
  }
  ctx.out << csv;
  for (const auto& r : rows)
    for (const auto& w : r.warnings) ctx.err << "warning: " << w << "\n";
  const auto dir = out_dir(ctx.cfg);
  if (!dir.empty()) {
    write_text(dir / (stem + ".csv"), csv);
    write_text(dir / (stem + ".json"), canonical(arr));
  }
}

inline int cmd_constant(CliContext& ctx) {
  emit_rows(ctx, compute_constants(ctx.cfg), "constants");
  return 0;
}

// ------------------------------------------------------------ apply / norm

inline SparseFamily sparse_family_for(const RunConfig& c, const Grid& g) {
  if (c.sparse.kind == "tower") return tower_family(g, c.sparse.depth);
  Rng rng(c.seed);
  return random_sparse_family(g, rng, c.sparse.continue_prob);
}

inline OperatorSpec build_operator(const RunConfig& c, const WeightField& u, const WeightField& v) {
  const Grid& g = u.grid;
  if (c.op == "identity") return make_identity(g, u.n);
  if (c.op == "averaging") {
    std::vector<Cube> fam = c.cubes;
    if (fam.empty()) fam.push_back(root_cube(g.d));
    return make_averaging(u, v, c.p, c.q, c.alpha, fam);
  }
  if (c.op == "maximal") return make_matrix_maximal(u, v, c.alpha, c.p, c.q, MaximalMode::single_grid, c.census);
  if (c.op == "maximal_shifted") return make_matrix_maximal(u, v, c.alpha, c.p, c.q, MaximalMode::shifted_union);
  if (c.op == "aux_maximal") return make_aux_maximal(u, v, c.alpha, c.p, c.q, c.census);
  if (c.op == "sparse") return make_sparse(u, v, c.p, c.q, c.alpha, sparse_family_for(c, g));
  if (c.op == "frac_integral") return make_frac_integral(u, v, c.p, c.q, c.alpha);
  return make_mollifier(u, v, c.p, c.t);
}

inline VecField input_function(const RunConfig& c, const Grid& g, int n) {
  if (!c.f.empty()) {
    std::ifstream is(c.f, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + c.f);
    ScalarOutput s = read_mws1(is);
    if (!(s.grid == g) || s.components != n) throw std::invalid_argument("dimension mismatch between f and the weights");
    VecField f(g, n);
    f.data = std::move(s.values);
    return f;
  }
  VecField f(g, n);
  if (!c.f_values.empty()) {
    if (c.f_values.size() != f.data.size()) throw std::invalid_argument("f_values needs cells * n entries");
    f.data = c.f_values;
    return f;
  }
  for (std::size_t x = 0; x < g.cells(); ++x) f.set(x, SmallVec::basis(n, 0));
  return f;
}

inline ConstantReport value_row(const RunConfig& c, std::string name, double value, std::string cube,
                                std::string method) {
  ConstantReport r;
  r.name = std::move(name);
  r.value = value;
  r.cube = std::move(cube);
  r.method = std::move(method);
  r.p = c.p;
  r.q = c.q;
  r.alpha = c.alpha;
  if (c.phi) r.phi = c.phi->label();
  if (c.psi) r.psi = c.psi->label();
  r.census = to_string(c.census);
  return r;
}

inline int cmd_apply(CliContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto [u, v] = load_pair(c);
  const OperatorSpec op = build_operator(c, u, v);
  const VecField f = input_function(c, u.grid, u.n);
  const std::vector<double> out = op.apply(f);
  std::vector<ConstantReport> rows{
      value_row(c, "input_norm", lp_norm(f, c.p), "", "definitional"),
      value_row(c, "apply_" + op.name, lp_norm(out, u.grid, c.q), "", "definitional"),
  };
  emit_rows(ctx, rows, "apply");
  const auto dir = out_dir(c);
  if (!dir.empty()) {
    std::ofstream os(dir / "apply.mws", std::ios::binary);
    write_mws1(os, u.grid, 1, out);
  }
  return 0;
}

inline int cmd_norm(CliContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto [u, v] = load_pair(c);
  const OperatorSpec op = build_operator(c, u, v);
  EstimateOptions opt;
  if (c.budget > 0) opt.budget = c.budget;
  opt.seed = c.seed;
  opt.workers = c.workers;
  const NormEstimate est = c.weak ? weak_norm_estimate(op, c.p, c.q, opt) : estimate_norm(op, c.p, c.q, opt);
  std::vector<ConstantReport> rows{
      value_row(c, std::string(c.weak ? "weak_norm_" : "norm_") + op.name, est.value, est.test_id, "estimated")};
  if (c.compare) {
    const ConstantReport k = two_weight_apq(u, v, c.p, c.q, c.alpha, make_census(u.grid, c.census));
    rows.push_back(k);
    rows.push_back(value_row(c, "ratio_norm_over_A_pq", est.value / k.value, k.cube, "estimated"));
  }
  emit_rows(ctx, rows, "norm");
  const auto dir = out_dir(c);
  if (!dir.empty()) write_text(dir / "norm_estimate.json", canonical(estimate_to_json(est)));
  return 0;
}

// --------------------------------------------------------- verify / report

inline std::string summary_line(const CheckResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS " : "FAIL ") << r.name << ": measured " << num(r.measured) << " " << r.relation << " "
     << num(r.bound);
  return os.str();
}

inline void write_plots(const std::filesystem::path& dir, const SuiteReport& rep) {
  if (rep.series.empty()) return;
  PlotSpec spec;
  spec.title = rep.suite;
  if (rep.suite == "sharpconst") {
    spec.style = PlotStyle::scatter;
    spec.x_label = "log constant";
    spec.y_label = "log measured norm";
  } else if (rep.suite == "poincare") {
    spec.x_label = "level";
    spec.y_label = "ratio";
  } else {
    return;
  }
  write_text(dir / (rep.suite + ".svg"), svg_plot(rep.series, spec));
}

inline int cmd_verify(CliContext& ctx) {
  const RunConfig& c = ctx.cfg;
  SuiteConfig sc;
  sc.seed = c.seed;
  sc.workers = c.workers;
  sc.trials = c.trials;
  sc.budget = c.budget;
  sc.level = c.level;
  sc.census = c.census;
  sc.experimental = c.experimental;
  const std::vector<std::string> names = c.suite == "all" ? suite_names() : std::vector<std::string>{c.suite};
  const auto dir = out_dir(c);
  bool all = true;
  for (const auto& name : names) {
    const SuiteReport rep = run_suite(name, sc);
    ctx.out << "suite " << name << "\n";
    for (const auto& chk : rep.checks) ctx.out << "  " << summary_line(chk) << "\n";
    for (const auto& note : rep.notes) ctx.out << "  note: " << note << "\n";
    if (!dir.empty()) {
      write_text(dir / (name + ".json"), canonical(suite_to_json(rep)));
      write_plots(dir, rep);
    }
    if (!rep.passed()) {
      all = false;
      ctx.err << "reproduce with: " << rep.reproducer() << "\n";
    }
  }
  ctx.out << (all ? "all checks passed" : "some checks failed") << "\n";
  return all ? 0 : 1;
}

/// Collects suite JSON files into one CSV table and regenerates plots.
inline int cmd_report(CliContext& ctx) {
  const RunConfig& c = ctx.cfg;
  std::vector<std::filesystem::path> files;
  for (const auto& s : c.inputs) files.emplace_back(s);
  if (files.empty()) {
    if (c.out.empty()) throw std::invalid_argument("report needs 'inputs' or --out pointing at suite reports");
    for (const auto& e : std::filesystem::directory_iterator(c.out))
      if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string csv = "suite,check,measured,relation,bound,pass,method\n";
  bool all = true;
  int suites = 0;
  for (const auto& path : files) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    const json j = json::parse(is);
    if (!j.is_object() || !j.contains("suite") || !j.contains("checks")) continue;
    ++suites;
    for (const auto& chk : j.at("checks")) {
      const bool pass = chk.at("pass").get<bool>();
      all = all && pass;
      csv += csv_field(j.at("suite").get<std::string>()) + "," + csv_field(chk.at("name").get<std::string>()) + "," +
             num(chk.at("measured").get<double>()) + "," + csv_field(chk.at("relation").get<std::string>()) + "," +
             num(chk.at("bound").get<double>()) + "," + (pass ? "true" : "false") + ",estimated\n";
    }
  }
  if (suites == 0) throw std::invalid_argument("no suite reports found");
  ctx.out << csv;
  const auto dir = out_dir(c);
  if (!dir.empty()) write_text(dir / "report.csv", csv);
  ctx.out << suites << " suite reports, " << (all ? "all checks passed" : "some checks failed") << "\n";
  return 0;
}

}  // namespace detail

/// Runs the CLI on argv-style arguments (without the program name). Returns
/// the process exit code: 0 on success, 1 on suite failure, 2 on bad input.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Matrix-weight constants, operators and verification suites", "matbump"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  int workers = 1, trials = 0, budget = 0, level = 0;
  std::string census, out_path, suite;
  bool experimental = false;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON run config");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads");
  auto* o_census = app.add_option("--census", census, "cube census")->check(CLI::IsMember({"dyadic", "shifted", "brute"}));
  auto* o_out = app.add_option("--out", out_path, "output directory");
  auto* o_suite = app.add_option("--suite", suite, "suite name or 'all'");
  auto* o_trials = app.add_option("--trials", trials, "trials per suite check");
  auto* o_budget = app.add_option("--budget", budget, "test functions per norm estimate");
  auto* o_level = app.add_option("--level", level, "grid level for suites");
  auto* o_exp = app.add_flag("--experimental", experimental, "run conjectured cases without asserting");
  app.add_option("--set", sets, "override a config key: key=value (value parsed as JSON when possible)");

  const std::vector<std::string> commands{"gen", "constant", "apply", "norm", "verify", "report"};
  const std::map<std::string, std::string> help{{"gen", "generate a weight field"},
                                                {"constant", "compute A_p, A_pq or bump constants"},
                                                {"apply", "apply an operator to a function"},
                                                {"norm", "estimate an operator norm"},
                                                {"verify", "run verification suites"},
                                                {"report", "tabulate suite reports"}};
  for (const auto& cmd : commands) app.add_subcommand(cmd, help.at(cmd));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::runtime_error("cannot read " + config_path);
      j = json::parse(is);
      if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    }
    if (o_seed->count()) j["seed"] = seed;
    if (o_workers->count()) j["workers"] = workers;
    if (o_census->count()) j["census"] = census;
    if (o_out->count()) j["out"] = out_path;
    if (o_suite->count()) j["suite"] = suite;
    if (o_trials->count()) j["trials"] = trials;
    if (o_budget->count()) j["budget"] = budget;
    if (o_level->count()) j["level"] = level;
    if (o_exp->count()) j["experimental"] = experimental;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
      const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
      const json parsed = json::parse(val, nullptr, false);
      j[key] = parsed.is_discarded() ? json(val) : parsed;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (j.contains("command") && j.at("command").get<std::string>() != cmd)
      throw std::invalid_argument("config is for command '" + j.at("command").get<std::string>() + "'");
    j["command"] = cmd;
    detail::CliContext ctx{run_config_from_json(j), out, err};
    if (cmd == "gen") return detail::cmd_gen(ctx);
    if (cmd == "constant") return detail::cmd_constant(ctx);
    if (cmd == "apply") return detail::cmd_apply(ctx);
    if (cmd == "norm") return detail::cmd_norm(ctx);
    if (cmd == "verify") return detail::cmd_verify(ctx);
    return detail::cmd_report(ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}

}  // namespace matbump
