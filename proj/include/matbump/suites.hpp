#pragma once

// Property suites: each runs a family of seeded checks and reports the
// measured constants against fixed ceilings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/operators.hpp"
#include "matbump/parallel.hpp"
#include "matbump/random.hpp"
#include "matbump/reducing.hpp"
#include "matbump/verify.hpp"
#include "matbump/weights.hpp"
#include "matbump/young.hpp"

namespace matbump {

struct SuiteConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  int trials = 0;  // 0: suite default
  int budget = 0;  // 0: suite default
  int level = 0;   // 0: suite default
  Census census = Census::dyadic;
  bool experimental = false;
};

struct CheckResult {
  std::string name;
  std::string anchor;    // the statement being checked
  std::string relation;  // "<=" or ">="
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  int trials = 0;
  std::string detail;
};

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  std::map<std::string, std::vector<SeriesPoint>> series;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  /// Command line that reruns the suite, empty when everything passed.
  std::string reproducer() const {
    if (passed()) return {};
    std::ostringstream os;
    os << "matbump verify --suite " << suite << " --seed " << config.seed << " --census " << to_string(config.census);
    if (config.trials) os << " --trials " << config.trials;
    if (config.budget) os << " --budget " << config.budget;
    if (config.level) os << " --level " << config.level;
    for (const auto& c : checks)
      if (!c.pass) os << "  # failed: " << c.name << " (" << c.detail << ")";
    return os.str();
  }
};

namespace detail::suite {

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t t) {
  return splitmix(splitmix(seed ^ (salt * 0x100000001b3ULL)) + t);
}

inline int pick(int configured, int fallback) { return configured > 0 ? configured : fallback; }

inline CheckResult upper(std::string name, std::string anchor, double measured, double bound, int trials,
                         std::string detail = {}) {
  return {std::move(name), std::move(anchor), "<=", measured, bound, measured <= bound, trials, std::move(detail)};
}

inline CheckResult lower(std::string name, std::string anchor, double measured, double bound, int trials,
                         std::string detail = {}) {
  return {std::move(name), std::move(anchor), ">=", measured, bound, measured >= bound, trials, std::move(detail)};
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Random weight pair: U = V = W, or U = W^{1/2} E W^{1/2} with a second field E.
inline std::pair<WeightField, WeightField> random_pair(const Grid& g, int n, std::uint64_t seed, double kappa = 6.0,
                                                       double lambda = 0.5) {
  const WeightField w = gen_random_field(g, n, seed, kappa, lambda);
  if (seed % 2 == 0) return {w, w};
  const WeightField e = gen_random_field(g, n, splitmix(seed), 3.0, 0.3);
  WeightField u(g, n);
  const WeightField h = matrix_power(w, 0.5);
  for (std::size_t c = 0; c < g.cells(); ++c) u.cells[c] = symmetrized(h[c] * e[c] * h[c]);
  return {u, w};
}

/// Disjoint cubes from a random top-down walk: keep, drop or split.
inline std::vector<Cube> random_disjoint_family(const Grid& g, Rng& rng) {
  std::vector<Cube> out, stack{root_cube(g.d)};
  while (!stack.empty()) {
    const Cube q = stack.back();
    stack.pop_back();
    const double u = rng.uniform();
    if (q.k < g.L && u < 0.45) {
      for (const Cube& c : q.children()) stack.push_back(c);
    } else if (u < 0.85 || out.empty()) {
      out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Exponents {
  double p, q, alpha;
};

inline std::string label(const Exponents& e) {
  return "p=" + fmt(e.p) + " q=" + fmt(e.q) + " alpha=" + fmt(e.alpha);
}

/// Bumps with Φ̄ ∈ B_{p,q} and Ψ̄ ∈ B_{q'}: t^{p'} log(e+t)^{2p'} and t^q log(e+t)^{2q}.
inline YoungFn phi_bump(double p) {
  const double pp = conjugate_exponent(p);
  return YoungFn::power_log(pp, 2.0 * pp);
}
inline YoungFn psi_bump(double q) { return YoungFn::power_log(q, 2.0 * q); }

/// Largest cube of a census whose label matches.
inline Cube find_cube(const CubeCensus& census, const std::string& label) {
  for (const auto& cc : census.cubes)
    if (cc.label() == label && cc.cube) return *cc.cube;
  throw std::logic_error("attaining cube not found: " + label);
}

/// Reducing operators inside cube-wide sweeps: a looser ellipsoid tolerance.
/// The two-sided band does not move measurably below 1e-3.
inline ReducingOptions sweep_reducing() {
  ReducingOptions r;
  r.epsilon = 1e-4;
  return r;
}

inline EstimateOptions estimate_options(const SuiteConfig& cfg, int budget, std::uint64_t seed,
                                        int refine = 2000) {
  EstimateOptions opt;
  opt.budget = pick(cfg.budget, budget);
  opt.seed = seed;
  opt.refine_evaluations = refine;
  return opt;
}

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::string where;
  void upper(double v, const std::string& w) {
    if (v > value) {
      value = v;
      where = w;
    }
  }
};

struct Least {
  double value = std::numeric_limits<double>::infinity();
  std::string where;
  void lower(double v, const std::string& w) {
    if (v < value) {
      value = v;
      where = w;
    }
  }
};

}  // namespace detail::suite

// ---------------------------------------------------------------------------

inline SuiteReport suite_holder(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"holder", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 200);
  struct Row {
    double ratio = 0.0;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Rng rng(trial_seed(cfg.seed, 1, t));
    YoungFn phi = YoungFn::power(2.0);
    switch (t % 3) {
      case 0:
        phi = YoungFn::power(rng.uniform(1.1, 4.0));
        break;
      case 1:
        phi = YoungFn::power_log(rng.uniform(1.2, 3.0), rng.uniform(0.2, 2.0));
        break;
      default:
        phi = YoungFn::power(rng.uniform(1.1, 3.0), rng.uniform(0.5, 2.0));
        break;
    }
    const YoungFn phi_bar = associate(phi);
    const std::size_t m = 1 + rng.below(48);
    std::vector<double> w(m), f(m), g(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = rng.uniform(0.1, 1.0);
      total += w[i];
      f[i] = rng.coin(0.2) ? 0.0 : std::exp(2.0 * rng.normal());
      g[i] = rng.coin(0.2) ? 0.0 : std::exp(2.0 * rng.normal());
    }
    double lhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] /= total;
      lhs += w[i] * f[i] * g[i];
    }
    const double nf = luxemburg_norm_weighted(f, w, phi);
    const double ng = luxemburg_norm_weighted(g, w, phi_bar);
    rows[t].ratio = nf > 0.0 && ng > 0.0 ? lhs / (nf * ng) : 0.0;
    rows[t].label = "trial " + std::to_string(t) + " " + phi.label();
  });
  Worst worst;
  int ok = 0;
  for (const Row& r : rows) {
    worst.upper(r.ratio, r.label);
    ok += r.ratio <= 2.0 ? 1 : 0;
  }
  rep.checks.push_back(upper("generalized_holder", "avg(fg) <= 2 |f|_Phi |g|_Phibar", worst.value, 2.0, trials,
                             std::to_string(ok) + "/" + std::to_string(trials) + " pass; worst " + worst.where));

  const int lux_trials = pick(cfg.trials / 2, 100);
  std::vector<double> errs(static_cast<std::size_t>(lux_trials));
  parallel_for(errs.size(), cfg.workers, [&](std::size_t t) {
    Rng rng(trial_seed(cfg.seed, 2, t));
    const double r = rng.uniform(1.0, 5.0);
    const std::size_t m = 1 + rng.below(64);
    std::vector<double> v(m), w(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = std::exp(rng.normal());
      w[i] = rng.uniform(0.1, 1.0);
      total += w[i];
    }
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] /= total;
      s += w[i] * std::pow(v[i], r);
    }
    const double exact = std::pow(s, 1.0 / r);
    errs[t] = std::abs(luxemburg_norm_weighted(v, w, YoungFn::power(r)) - exact) / exact;
  });
  rep.checks.push_back(upper("luxemburg_power", "|v|_{t^r} = (avg v^r)^{1/r}",
                             *std::max_element(errs.begin(), errs.end()), 1e-9, lux_trials));
  return rep;
}

inline SuiteReport suite_reducing(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"reducing", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 50);
  constexpr int kProbes = 1000;
  struct Row {
    double band_low = 1e300, band_high = 0.0;   // ‖Ae‖ / |Re| scaled: low·√n·1.1, high
    double p2_low = 1e300, p2_high = 0.0;       // |R_mvee e| / |R_exact e|: low·1.05, high/√n
    double op_low = 1e300, op_high = 0.0;       // |R|_op / ‖|A|_op‖, scaled by 2n
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 3, t);
    Rng rng(seed);
    const int n = 2 + static_cast<int>(t % 2);
    const int lev = pick(cfg.level, 3 + static_cast<int>((t / 2) % 4));
    const Grid g(1, lev);
    const WeightField w = gen_random_field(g, n, seed, 8.0, 0.6);
    const YoungFn psi = t % 3 == 0 ? YoungFn::power(3.0) : t % 3 == 1 ? YoungFn::power_log(2.0, 1.0)
                                                                       : YoungFn::power(1.5);
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " L=" + std::to_string(lev) + " " +
                psi.label();
    std::vector<Cube> cubes{root_cube(1)};
    const int k = lev > 1 ? 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(lev - 1))) : lev;
    const auto level = grid_cubes(g, {}, k);
    cubes.push_back(level[rng.below(level.size())]);
    const double sn = std::sqrt(static_cast<double>(n));
    for (const Cube& q : cubes) {
      const CubeCells cc = cube_cells(g, q);
      const auto a = slice(w.cells, cc);
      const ReducingOp r = reducing_op(a, cc.weights, psi);
      ReducingOptions forced;
      forced.allow_exact = false;
      const ReducingOp rm = reducing_mvee(a, cc.weights, YoungFn::power(2.0), forced);
      const ReducingOp re = reducing_exact_p2(a, cc.weights);
      for (int j = 0; j < kProbes; ++j) {
        SmallVec e(n);
        for (int i = 0; i < n; ++i) e[i] = rng.normal();
        e = (1.0 / e.norm()) * e;
        const double ratio = directional_norm(a, cc.weights, psi, e) / (r.matrix * e).norm();
        row.band_low = std::min(row.band_low, ratio * sn * 1.1);
        row.band_high = std::max(row.band_high, ratio);
        const double p2 = (rm.matrix * e).norm() / (re.matrix * e).norm();
        row.p2_low = std::min(row.p2_low, p2 * 1.05);
        row.p2_high = std::max(row.p2_high, p2 / sn);
      }
      std::vector<double> ops(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) ops[i] = op_norm(a[i]);
      const double rel = op_norm(r.matrix) / luxemburg_norm_weighted(ops, cc.weights, psi);
      row.op_low = std::min(row.op_low, rel * 2.0 * n);
      row.op_high = std::max(row.op_high, rel / (2.0 * n));
    }
  });
  Least lo, p2lo, oplo;
  Worst hi, p2hi, ophi;
  for (const Row& r : rows) {
    lo.lower(r.band_low, r.label);
    hi.upper(r.band_high, r.label);
    p2lo.lower(r.p2_low, r.label);
    p2hi.upper(r.p2_high, r.label);
    oplo.lower(r.op_low, r.label);
    ophi.upper(r.op_high, r.label);
  }
  rep.checks.push_back(lower("band_lower", "|Ae|_Psi / |Re| >= 1/(1.1 sqrt n), scaled to 1", lo.value, 1.0,
                             trials, lo.where));
  rep.checks.push_back(upper("band_upper", "|Ae|_Psi / |Re| <= 1.1", hi.value, 1.1, trials, hi.where));
  rep.checks.push_back(lower("p2_vs_exact_lower", "|R_mvee e| / |R_exact e| >= 1/1.05, scaled to 1", p2lo.value,
                             1.0, trials, p2lo.where));
  rep.checks.push_back(upper("p2_vs_exact_upper", "|R_mvee e| / |R_exact e| <= 1.05 sqrt n, scaled by sqrt n",
                             p2hi.value, 1.05, trials, p2hi.where));
  rep.checks.push_back(lower("opnorm_lower", "|R|_op / |A|_Psi >= 1/(2n), scaled to 1", oplo.value, 1.0, trials,
                             oplo.where));
  rep.checks.push_back(upper("opnorm_upper", "|R|_op / |A|_Psi <= 2n, scaled to 1", ophi.value, 1.0, trials,
                             ophi.where));

  // definitional double norm against the reducing-operator form
  const int pairs = std::max(1, trials / 5);
  std::vector<std::pair<double, double>> dn(static_cast<std::size_t>(pairs));
  parallel_for(dn.size(), cfg.workers, [&](std::size_t t) {
    const std::uint64_t seed = trial_seed(cfg.seed, 4, t);
    const int n = 1 + static_cast<int>(t % 3);
    const Grid g(1, 2 + static_cast<int>(t % 3));
    const auto [u, v] = random_pair(g, n, seed);
    BumpParams bp;
    bp.variant = BumpVariant::double_bump;
    bp.phi = phi_bump(2.0);
    bp.psi = psi_bump(2.0);
    const CubeCensus census = make_census(g);
    const double def = bump_constant(u, v, bp, census).value;
    const double red = bump_constant_reducing(u, v, bp, census, {}, sweep_reducing()).value;
    const double n2 = 4.0 * n * n;
    dn[t] = {red / def * n2, red / def / n2};
  });
  double dlo = 1e300, dhi = 0.0;
  for (const auto& [a, b] : dn) {
    dlo = std::min(dlo, a);
    dhi = std::max(dhi, b);
  }
  rep.checks.push_back(lower("double_norm_lower", "reducing / definitional >= 1/(4n^2), scaled to 1", dlo, 1.0, pairs));
  rep.checks.push_back(upper("double_norm_upper", "reducing / definitional <= 4n^2, scaled to 1", dhi, 1.0, pairs));
  return rep;
}

inline SuiteReport suite_avgop(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"avgop", cfg, {}, {}, {}};
  {
    const Grid g(1, 1);
    const WeightField w = scalar_field(g, std::vector<double>{1.0, 4.0});
    const double ap = matrix_ap(w, 2.0).value;
    const double exact = exact_avg_norm_p2(w, w, root_cube(1), 0.0);
    const OperatorSpec op = make_averaging(w, w, 2.0, 2.0, 0.0, {root_cube(1)});
    const double est = estimate_norm(op, 2.0, 2.0, estimate_options(cfg, 16, cfg.seed)).value;
    rep.checks.push_back(upper("anchor_ap", "[w]_{A_2} = 1.5625 for w = {1,4}", std::abs(ap - 1.5625), 1e-12, 1));
    rep.checks.push_back(upper("anchor_exact_norm", "single-cube averaging norm = 1.25", std::abs(exact - 1.25), 1e-12, 1));
    rep.checks.push_back(upper("anchor_sharpness", "norm / [w]_{A_2}^{1/2} = 1", std::abs(exact / std::sqrt(ap) - 1.0),
                               1e-9, 1));
    rep.checks.push_back(upper("anchor_estimator", "estimate matches exact norm", std::abs(est - exact), 1e-9, 1));
  }
  const int trials = pick(cfg.trials, 100);
  const int lev = pick(cfg.level, 8);
  const std::vector<Exponents> tuples{{2, 2, 0}, {2, 3, 1.0 / 6.0}, {1, 2, 0.5}};
  struct Row {
    double suff = 0.0;       // estimate / constant
    double nec = 1e300;      // n · single-cube lower bound / constant
    bool p2 = false;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 5, t);
    const Exponents ex = tuples[t % tuples.size()];
    const int n = 1 + static_cast<int>((t / tuples.size()) % 2);
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, seed);
    const CubeCensus census = make_census(g, cfg.census);
    const ConstantReport c0 = two_weight_apq(u, v, ex.p, ex.q, ex.alpha, census);
    Rng rng(seed);
    const auto family = random_disjoint_family(g, rng);
    const OperatorSpec op = make_averaging(u, v, ex.p, ex.q, ex.alpha, family);
    const double est = estimate_norm(op, ex.p, ex.q, estimate_options(cfg, 64, seed)).value;
    row.suff = est / c0.value;
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " " + label(ex);
    if (ex.p == 2.0 && ex.q == 2.0) {
      row.p2 = true;
      double best = 0.0;
      for (int k = 0; k <= g.L; ++k)
        for (const Cube& q : grid_cubes(g, {}, k)) best = std::max(best, exact_avg_norm_p2(u, v, q, ex.alpha));
      row.nec = n * best / c0.value;
    } else {
      const Cube q = find_cube(census, c0.cube);
      const OperatorSpec single = make_averaging(u, v, ex.p, ex.q, ex.alpha, {q});
      row.nec = n * estimate_norm(single, ex.p, ex.q, estimate_options(cfg, 32, seed)).value / c0.value;
    }
  });
  Worst suff;
  Least nec2, necx;
  int n2 = 0, nx = 0;
  for (const Row& r : rows) {
    suff.upper(r.suff, r.label);
    if (r.p2) {
      nec2.lower(r.nec, r.label);
      ++n2;
    } else {
      necx.lower(r.nec, r.label);
      ++nx;
    }
  }
  rep.checks.push_back(upper("sufficiency", "|A f|_{L^q(U)} / |f|_{L^p(V)} <= 4 [U,V]_{A_pq}", suff.value, 4.0, trials,
                             suff.where));
  rep.checks.push_back(lower("necessity_p2", "n max_Q exact single-cube norm / [U,V] >= 1/4", nec2.value, 0.25, n2,
                             nec2.where));
  rep.checks.push_back(lower("necessity_estimated", "n single-cube estimate at the attaining cube / [U,V] >= 1/4",
                             necx.value, 0.25, nx, necx.where));
  return rep;
}

inline SuiteReport suite_weaktype(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"weaktype", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 30);
  const int lev = pick(cfg.level, 6);
  const std::vector<Exponents> tuples{{2, 2, 0}, {2, 3, 1.0 / 6.0}, {1, 2, 0.5}};
  struct Row {
    double weak = 0.0, cheb = 0.0, single = 1e300;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 6, t);
    const Exponents ex = tuples[t % tuples.size()];
    const int n = 1 + static_cast<int>((t / tuples.size()) % 2);
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, seed);
    const CubeCensus census = make_census(g, cfg.census);
    const ConstantReport c0 = two_weight_apq(u, v, ex.p, ex.q, ex.alpha, census);
    const OperatorSpec op = make_aux_maximal(u, v, ex.alpha, ex.p, ex.q, cfg.census);
    const NormEstimate est = weak_norm_estimate(op, ex.p, ex.q, estimate_options(cfg, 64, seed, 600));
    row.weak = est.value / c0.value;
    const double strong = detail::test_ratio(op, est.test_function, ex.p, ex.q, false);
    row.cheb = est.value / strong;
    const Cube q = find_cube(census, c0.cube);
    const OperatorSpec single = make_aux_single_cube(u, v, ex.alpha, ex.p, ex.q, q);
    row.single = n * weak_norm_estimate(single, ex.p, ex.q, estimate_options(cfg, 32, seed, 600)).value / c0.value;
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " " + label(ex);
  });
  Worst weak, cheb;
  Least single;
  for (const Row& r : rows) {
    weak.upper(r.weak, r.label);
    cheb.upper(r.cheb, r.label);
    single.lower(r.single, r.label);
  }
  rep.checks.push_back(upper("weak_sufficiency", "weak norm of M' <= 4 [U,V]_{A_pq}", weak.value, 4.0, trials,
                             weak.where));
  rep.checks.push_back(upper("weak_below_strong", "weak ratio <= strong ratio on the same test function",
                             cheb.value, 1.0 + 1e-12, trials, cheb.where));
  rep.checks.push_back(lower("single_cube_necessity", "n weak norm of B_Q / [U,V]_{A_pq} >= 1/4", single.value, 0.25,
                             trials, single.where));
  return rep;
}

inline SuiteReport suite_maximal(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"maximal", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 18);
  const int lev = pick(cfg.level, 6);
  const std::vector<Exponents> tuples{{2, 2, 0}, {2, 3, 1.0 / 6.0}, {1.5, 2, 1.0 / 6.0}};
  struct Row {
    double strong = 0.0, aux = 0.0, nq_avg = 0.0, nq_orlicz = 0.0;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 7, t);
    const Exponents ex = tuples[t % tuples.size()];
    const int n = 1 + static_cast<int>((t / tuples.size()) % 2);
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, seed);
    const CubeCensus census = make_census(g, cfg.census);
    BumpParams bp;
    bp.p = ex.p;
    bp.q = ex.q;
    bp.alpha = ex.alpha;
    bp.phi = phi_bump(ex.p);
    const double cphi = bump_constant(u, v, bp, census).value;
    BumpParams bd = bp;
    bd.variant = BumpVariant::double_bump;
    bd.psi = psi_bump(ex.q);
    const double cphipsi = bump_constant(u, v, bd, census).value;

    const OperatorSpec op = make_matrix_maximal(u, v, ex.alpha, ex.p, ex.q, MaximalMode::single_grid, cfg.census);
    row.strong = estimate_norm(op, ex.p, ex.q, estimate_options(cfg, 64, seed, 1000)).value / cphi;

    const double beta = g.d * (1.0 / ex.p - 1.0 / ex.q);
    const OperatorSpec aux = make_aux_maximal_beta(v, beta, ex.p, bp.phi, cfg.census);
    const YoungFn phi_bar = associate(bp.phi);
    Rng rng(seed);
    for (int j = 0; j < 4; ++j) {
      VecField f(g, n);
      for (double& x : f.data) x = rng.normal() * (rng.coin(0.3) ? 4.0 : 1.0);
      const auto lhs = aux.apply(f);
      const auto rhs = orlicz_maximal(phi_bar, beta, magnitudes(f), census);
      for (std::size_t c = 0; c < lhs.size(); ++c) row.aux = std::max(row.aux, lhs[c] / rhs[c] / n);
    }

    const NQData nq = prepare_nq(u, v, ex.alpha, ex.p, ex.q, bp.phi);
    const NQScan scan = nq_scan(nq, *bd.psi);
    row.nq_avg = scan.avg_q / cphi;
    row.nq_orlicz = scan.orlicz / cphipsi;
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " " + label(ex);
  });
  Worst strong, aux, nqa, nqo;
  for (const Row& r : rows) {
    strong.upper(r.strong, r.label);
    aux.upper(r.aux, r.label);
    nqa.upper(r.nq_avg, r.label);
    nqo.upper(r.nq_orlicz, r.label);
  }
  rep.checks.push_back(upper("maximal_sufficiency", "|M f|_q / |f|_p <= 8 [U,V]_{p,q,Phi}", strong.value, 8.0, trials,
                             strong.where));
  rep.checks.push_back(upper("aux_domination", "M^D_{beta,V} f <= 4n M_{beta,Phibar}|f| pointwise, scaled by n",
                             aux.value, 4.0, trials, aux.where));
  rep.checks.push_back(upper("nq_average", "(avg_Q N_Q^q)^{1/q} <= 8 [U,V]_{p,q,Phi}", nqa.value, 8.0, trials,
                             nqa.where));
  rep.checks.push_back(upper("nq_orlicz", "|N_Q|_{Psi,Q} <= 8 [U,V]_{p,q,Phi,Psi}", nqo.value, 8.0, trials,
                             nqo.where));
  return rep;
}

inline SuiteReport suite_fracint(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"fracint", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 18);
  const int lev = pick(cfg.level, 6);
  const std::vector<Exponents> tuples{{2, 4, 0.25}, {1.5, 3, 1.0 / 3.0}, {4.0 / 3.0, 4, 0.5}};
  struct Row {
    double ratio = 0.0, conjectured = 0.0;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 8, t);
    const Exponents ex = tuples[t % tuples.size()];
    const int n = 1 + static_cast<int>((t / tuples.size()) % 2);
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, seed);
    const CubeCensus census = make_census(g, cfg.census);
    BumpParams bp;
    bp.p = ex.p;
    bp.q = ex.q;
    bp.alpha = ex.alpha;
    bp.phi = phi_bump(ex.p);
    bp.psi = psi_bump(ex.q);
    bp.variant = BumpVariant::double_bump;
    const double c = bump_constant(u, v, bp, census).value;
    const OperatorSpec op = make_frac_integral(u, v, ex.p, ex.q, ex.alpha);
    const double est = estimate_norm(op, ex.p, ex.q, estimate_options(cfg, 64, seed, 1000)).value;
    row.ratio = est / c;
    if (cfg.experimental) {
      // Ψ̄ ∈ B_{q',p'} but outside B_{q'}
      BumpParams bx = bp;
      bx.psi = YoungFn::power_log(ex.q, 0.5 * (ex.q - 1.0));
      bx.override_b_class = true;
      row.conjectured = est / bump_constant(u, v, bx, census).value;
    }
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " " + label(ex);
  });
  Worst worst, conj;
  for (const Row& r : rows) {
    worst.upper(r.ratio, r.label);
    conj.upper(r.conjectured, r.label);
  }
  rep.checks.push_back(upper("fracint_sufficiency", "|I_alpha f|_{L^q(U)} / |f|_{L^p(V)} <= 8 [U,V]_{p,q,Phi,Psi}",
                             worst.value, 8.0, trials, worst.where));
  if (cfg.experimental)
    rep.notes.push_back("experimental weaker output bump: largest ratio " + fmt(conj.value) + " at " + conj.where +
                        " (not asserted)");
  return rep;
}

inline SuiteReport suite_sparse(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"sparse", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 18);
  const int lev = pick(cfg.level, 6);
  const std::vector<Exponents> tuples{{2, 2, 0}, {2, 4, 0.25}, {1.5, 3, 1.0 / 3.0}};
  struct Row {
    double ratio = 0.0, czo = 0.0;
    bool has_czo = false;
    std::string label;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    Row& row = rows[t];
    const std::uint64_t seed = trial_seed(cfg.seed, 9, t);
    const Exponents ex = tuples[t % tuples.size()];
    const int n = 1 + static_cast<int>((t / tuples.size()) % 2);
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, seed);
    const CubeCensus census = make_census(g, cfg.census);
    Rng rng(seed);
    const SparseFamily s = t % 4 == 3 ? tower_family(g, lev, rng.below(g.cells())) : random_sparse_family(g, rng);
    sparse_sets(g, s.cubes);  // validates packing
    BumpParams bp;
    bp.p = ex.p;
    bp.q = ex.q;
    bp.alpha = ex.alpha;
    bp.phi = phi_bump(ex.p);
    bp.psi = psi_bump(ex.q);
    bp.variant = BumpVariant::double_bump;
    const double c = bump_constant(u, v, bp, census).value;
    const OperatorSpec op = make_sparse(u, v, ex.p, ex.q, ex.alpha, s);
    const double est = estimate_norm(op, ex.p, ex.q, estimate_options(cfg, 64, seed, 1000)).value;
    row.ratio = est / c;
    if (ex.p == ex.q && ex.alpha == 0.0) {
      BumpParams bc = bp;
      bc.variant = BumpVariant::czo;
      bc.psi = YoungFn::power_log(ex.p, 2.0 * ex.p);
      row.czo = est / bump_constant(u, v, bc, census).value;
      row.has_czo = true;
    }
    row.label = "trial " + std::to_string(t) + " n=" + std::to_string(n) + " " + label(ex) + " cubes=" +
                std::to_string(s.cubes.size());
  });
  Worst worst, czo;
  int nczo = 0;
  for (const Row& r : rows) {
    worst.upper(r.ratio, r.label);
    if (r.has_czo) {
      czo.upper(r.czo, r.label);
      ++nczo;
    }
  }
  rep.checks.push_back(upper("sparse_sufficiency", "|T^S f|_{L^q(U)} / |f|_{L^p(V)} <= 8 [U,V]_{p,q,Phi,Psi}",
                             worst.value, 8.0, trials, worst.where));
  rep.checks.push_back(upper("czo_surrogate", "|T^S f|_{L^p(U)} / |f|_{L^p(V)} <= 8 [U,V]_{p,Phi,Psi}", czo.value,
                             8.0, nczo, czo.where));
  return rep;
}

/// R(θ(x)) diag(e^{βx}, e^{−βx}) R(θ(x))ᵀ with θ(x) = πx/2, d = 1.
inline WeightField exponential_rotation_family(const Grid& g, double beta) {
  if (g.d != 1) throw std::invalid_argument("the exponential family is one dimensional");
  WeightField w(g, 2);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double x = g.midpoint(c)[0];
    SmallVec diag(2);
    diag[0] = std::exp(beta * x);
    diag[1] = std::exp(-beta * x);
    const SmallMat r = rotation(2, std::numbers::pi * x / 2.0);
    w.cells[c] = symmetrized(r * SmallMat::diagonal(diag) * r.transposed());
  }
  return w;
}

/// Least-squares slope of y on x.
inline double regression_slope(const std::vector<SeriesPoint>& pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : pts) {
    sxy += (p.x - mx) * (p.y - my);
    sxx += (p.x - mx) * (p.x - mx);
  }
  return sxy / sxx;
}

inline SuiteReport suite_sharpconst(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"sharpconst", cfg, {}, {}, {}};
  const int lev = pick(cfg.level, 6);
  const int steps = pick(cfg.trials, 10);
  const Grid g(1, lev);
  std::vector<SparseFamily> families{tower_family(g, lev, 0), tower_family(g, lev, g.cells() - 1)};
  for (int j = 0; j < 2; ++j) {
    Rng rng(trial_seed(cfg.seed, 10, static_cast<std::uint64_t>(j)));
    families.push_back(random_sparse_family(g, rng));
  }
  const CubeCensus census = make_census(g, cfg.census);
  for (double p : {2.0, 1.5, 3.0}) {
    const double pp = conjugate_exponent(p);
    struct Row {
      double ap = 0.0, norm = 0.0, three = 0.0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(steps));
    parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
      const double beta = 0.5 + 11.5 * static_cast<double>(t) / static_cast<double>(std::max(1, steps - 1));
      const WeightField w = exponential_rotation_family(g, beta);
      Row& row = rows[t];
      row.ap = matrix_ap(w, p, census).value;
      for (std::size_t j = 0; j < families.size(); ++j) {
        const OperatorSpec op = make_sparse(w, w, p, p, 0.0, families[j]);
        row.norm = std::max(row.norm, estimate_norm(op, p, p, estimate_options(cfg, 32, trial_seed(cfg.seed, 11, j), 600)).value);
      }
      const double sca = scalar_ainfty_sup(w, p, 32, census).value;
      const double sca_dual = scalar_ainfty_sup(matrix_power(w, -pp / p), pp, 32, census).value;
      row.three = std::pow(row.ap, 1.0 / p) * std::pow(sca_dual, 1.0 / p) * std::pow(sca, 1.0 / pp);
    });
    std::vector<SeriesPoint> pts;
    double lo = 1e300, hi = 0.0, three = 0.0;
    for (const Row& r : rows) {
      pts.push_back({std::log(r.ap), std::log(r.norm)});
      lo = std::min(lo, r.ap);
      hi = std::max(hi, r.ap);
      three = std::max(three, r.norm / r.three);
    }
    const double slope = regression_slope(pts);
    const double expo = 1.0 + 1.0 / (p - 1.0) - 1.0 / p;
    const std::string tag = "p=" + fmt(p);
    rep.series["log norm vs log A_p, " + tag] = pts;
    rep.checks.push_back(upper("slope " + tag, "regression slope <= 1 + 1/(p-1) - 1/p + 0.15", slope, expo + 0.15,
                               steps, "A_p range " + fmt(lo) + " .. " + fmt(hi)));
    if (p == 2.0)
      rep.checks.push_back(lower("span " + tag, "[W]_{A_2} spans at least two decades", hi / lo, 100.0, steps));
    rep.checks.push_back(upper("three_factor " + tag, "estimate <= 8 x three-factor bound", three, 8.0, steps));
  }
  return rep;
}

inline SuiteReport suite_rh(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"rh", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 8);
  const int lev = pick(cfg.level, 6);
  struct Row {
    double rh = 0.0, s = 0.0, r = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    const Grid g(1, lev);
    const WeightField w = gen_random_field(g, 2, trial_seed(cfg.seed, 12, t), 8.0, 0.6);
    const CubeCensus census = make_census(g, cfg.census);
    const RhExponents ex = rh_exponents(w, 2.0, 64, census);
    Row& row = rows[t];
    row.s = ex.s;
    row.r = ex.r;
    const WeightField h = matrix_power(w, 0.5);
    for (const SmallVec& e : half_directions(2, 64)) {
      std::vector<double> s(g.cells());
      for (std::size_t c = 0; c < g.cells(); ++c) s[c] = std::pow((h[c] * e).norm(), 2.0);
      for (const CensusCube& cc : census.cubes) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < cc.cells.cells.size(); ++i) {
          a += cc.cells.weights[i] * std::pow(s[cc.cells.cells[i]], ex.s);
          b += cc.cells.weights[i] * s[cc.cells.cells[i]];
        }
        row.rh = std::max(row.rh, std::pow(a, 1.0 / ex.s) / b);
      }
    }
  });
  double rh = 0.0, smin = 1e300;
  for (const Row& r : rows) {
    rh = std::max(rh, r.rh);
    smin = std::min({smin, r.s, r.r});
  }
  rep.checks.push_back(upper("reverse_holder", "(avg w^s)^{1/s} <= 2 avg w on every cube", rh, 2.0, trials));
  rep.checks.push_back(lower("exponents_above_one", "s, r > 1", smin - 1.0, 1e-300, trials));

  const Grid g(1, pick(cfg.level, 5));
  const double p = 2.0, pp = 2.0;
  const std::vector<double> rs{1.1, 1.5, 2.0};
  std::vector<double> cs(rs.size());
  parallel_for(rs.size(), cfg.workers, [&](std::size_t i) {
    const YoungFn phi_bar = associate(YoungFn::power(rs[i] * pp));
    const OperatorSpec op = make_orlicz_maximal(g, 1, phi_bar, 0.0, cfg.census);
    const double est = estimate_norm(op, p, p, estimate_options(cfg, 32, trial_seed(cfg.seed, 13, i), 300)).value;
    cs[i] = est / std::pow(conjugate_exponent(rs[i]), 1.0 / p);
  });
  for (std::size_t i = 0; i < rs.size(); ++i)
    rep.checks.push_back(upper("orlicz_max_envelope r=" + fmt(rs[i]), "|M_Phibar|_{L^p} <= 8 (r')^{1/p}", cs[i], 8.0, 1));
  return rep;
}

inline SuiteReport suite_duality(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"duality", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 12);
  const int lev = pick(cfg.level, 5);
  std::vector<std::pair<double, double>> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    const int n = 1 + static_cast<int>(t % 3);
    const double p = std::vector<double>{1.5, 2.0, 3.0}[(t / 3) % 3];
    const double pp = conjugate_exponent(p);
    const Grid g(1, lev);
    const WeightField w = gen_random_field(g, n, trial_seed(cfg.seed, 14, t), 8.0, 0.6);
    const CubeCensus census = make_census(g, cfg.census);
    const double lhs = std::pow(matrix_ap(w, p, census).value, 1.0 / p);
    const double rhs = std::pow(matrix_ap(matrix_power(w, -pp / p), pp, census).value, 1.0 / pp);
    rows[t] = {lhs / rhs * 4.0 * n, lhs / rhs / (4.0 * n)};
  });
  double lo = 1e300, hi = 0.0;
  for (const auto& [a, b] : rows) {
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  rep.checks.push_back(lower("duality_lower", "[W]_{A_p}^{1/p} / [W^{-p'/p}]_{A_p'}^{1/p'} >= 1/(4n), scaled to 1", lo,
                             1.0, trials));
  rep.checks.push_back(upper("duality_upper", "[W]_{A_p}^{1/p} / [W^{-p'/p}]_{A_p'}^{1/p'} <= 4n, scaled to 1", hi,
                             1.0, trials));
  return rep;
}

inline SuiteReport suite_pointwise(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"pointwise", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 12);
  const int lev = pick(cfg.level, 5);
  std::vector<double> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    const int n = 1 + static_cast<int>(t % 3);
    const double p = std::vector<double>{1.5, 2.0, 3.0}[(t / 3) % 3];
    const Grid g(1, lev);
    const auto [u, v] = random_pair(g, n, trial_seed(cfg.seed, 15, t));
    const double c = two_weight_apq(u, v, p, p, 0.0, make_census(g, cfg.census)).value;
    const WeightField up = matrix_power(u, 1.0 / p), vp = matrix_power(v, -1.0 / p);
    double top = 0.0;
    for (std::size_t x = 0; x < g.cells(); ++x) top = std::max(top, op_norm(up[x] * vp[x]));
    rows[t] = top / (4.0 * n * c);
  });
  rep.checks.push_back(upper("pointwise", "|U^{1/p}(x) V^{-1/p}(x)| <= 4n [U,V]_{A_p}^{1/p}, scaled to 1",
                             *std::max_element(rows.begin(), rows.end()), 1.0, trials));
  return rep;
}

inline SuiteReport suite_degenerate(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"degenerate", cfg, {}, {}, {}};
  const int lev = pick(cfg.level, 6);
  const Grid g(1, lev);
  const WeightField id = identity_field(g, 2);
  for (const Exponents& ex : std::vector<Exponents>{{2, 4, 0}, {2, 3, 0.1}, {1.5, 2, 0.1}}) {
    std::vector<double> est(static_cast<std::size_t>(lev) + 1);
    parallel_for(est.size(), cfg.workers, [&](std::size_t k) {
      Cube q = root_cube(1);
      q.k = static_cast<int>(k);
      const OperatorSpec op = make_averaging(id, id, ex.p, ex.q, ex.alpha, {q});
      est[k] = estimate_norm(op, ex.p, ex.q, estimate_options(cfg, 16, cfg.seed, 200)).value;
    });
    const double need = std::pow(2.0, 1.0 / ex.p - 1.0 / ex.q - ex.alpha / g.d) / 1.5;
    double worst = 1e300;
    std::vector<SeriesPoint> pts;
    for (int k = 0; k < lev; ++k) {
      worst = std::min(worst, est[static_cast<std::size_t>(k) + 1] / est[static_cast<std::size_t>(k)]);
      pts.push_back({static_cast<double>(k), est[static_cast<std::size_t>(k)]});
    }
    rep.series["single-cube norm by level, " + label(ex)] = pts;
    rep.checks.push_back(lower("growth " + label(ex), "per-level growth >= 2^{1/p-1/q-alpha/d} / 1.5", worst, need, lev));
  }
  return rep;
}

namespace detail::suite {

struct PoincareFn {
  std::string name;
  std::function<double(double)> f, df;
};

inline std::vector<PoincareFn> poincare_functions() {
  const auto bump = [](double x) {
    const double s = 2.0 * x - 1.0;
    return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
  };
  return {
      {"cos(pi x)", [](double x) { return std::cos(std::numbers::pi * x); },
       [](double x) { return -std::numbers::pi * std::sin(std::numbers::pi * x); }},
      {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
      {"bump", bump,
       [bump](double x) {
         const double s = 2.0 * x - 1.0;
         if (std::abs(s) >= 1.0) return 0.0;
         return bump(x) * (-2.0 * s / ((1.0 - s * s) * (1.0 - s * s))) * 2.0;
       }},
  };
}

struct PoincareWeights {
  std::string name;
  double p, q;
  std::function<double(double)> u, v;
};

inline std::vector<PoincareWeights> poincare_weights() {
  return {
      {"identity", 2, 2, [](double) { return 1.0; }, [](double) { return 1.0; }},
      {"(x+0.1)^0.5 both", 2, 2, [](double x) { return std::sqrt(x + 0.1); }, [](double x) { return std::sqrt(x + 0.1); }},
      {"u=(x+0.1)^-0.3 v=(x+0.1)^0.4", 1.5, 3, [](double x) { return std::pow(x + 0.1, -0.3); },
       [](double x) { return std::pow(x + 0.1, 0.4); }},
  };
}

/// (∫|f − f_u|^q u)^{1/q} / (∫ v|f'|^p)^{1/p} by the trapezoid rule on 2^L + 1 points.
inline double poincare_ratio(const PoincareFn& fn, const PoincareWeights& w, int lev) {
  const std::size_t m = std::size_t{1} << lev;
  const double h = 1.0 / static_cast<double>(m);
  const auto trap = [&](const std::function<double(double)>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i <= m; ++i) s += (i == 0 || i == m ? 0.5 : 1.0) * g(static_cast<double>(i) * h);
    return s * h;
  };
  const double mean = trap([&](double x) { return fn.f(x) * w.u(x); }) / trap(w.u);
  const double lhs = std::pow(trap([&](double x) { return std::pow(std::abs(fn.f(x) - mean), w.q) * w.u(x); }), 1.0 / w.q);
  const double rhs = std::pow(trap([&](double x) { return w.v(x) * std::pow(std::abs(fn.df(x)), w.p); }), 1.0 / w.p);
  return lhs / rhs;
}

}  // namespace detail::suite

inline SuiteReport suite_poincare(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"poincare", cfg, {}, {}, {}};
  const int lev = pick(cfg.level, 10);
  const auto fns = poincare_functions();
  const auto ws = poincare_weights();
  const double anchor = poincare_ratio(fns[0], ws[0], lev);
  rep.checks.push_back(upper("identity_anchor", "|f - mean|_2 / |f'|_2 = 1/pi for cos(pi x)",
                             std::abs(anchor * std::numbers::pi - 1.0), 0.01, 1, "ratio " + fmt(anchor)));
  double classical = 0.0, drift = 0.0, cmeas = 0.0;
  std::string drift_at;
  for (const auto& w : ws) {
    for (const auto& fn : fns) {
      const double a = poincare_ratio(fn, w, lev), b = poincare_ratio(fn, w, lev + 2);
      if (w.name == "identity") classical = std::max(classical, a * std::numbers::pi);
      cmeas = std::max(cmeas, std::max(a, b));
      const double dv = std::abs(b / a - 1.0);
      if (dv > drift) {
        drift = dv;
        drift_at = fn.name + " / " + w.name;
      }
    }
    std::vector<SeriesPoint> pts;
    for (int l = 4; l <= lev + 2; ++l) pts.push_back({static_cast<double>(l), poincare_ratio(fns[0], w, l)});
    rep.series["cos(pi x) ratio by level, " + w.name] = pts;
  }
  rep.checks.push_back(upper("classical_bound", "identity ratios <= 1/pi (1% quadrature slack), scaled by pi",
                             classical, 1.01, static_cast<int>(fns.size())));
  rep.checks.push_back(upper("refinement_stability", "ratio changes <= 10% from L to L+2", drift, 0.10,
                             static_cast<int>(fns.size() * ws.size()), drift_at));
  rep.checks.push_back(upper("finite_constant", "measured Poincare constant is finite", cmeas,
                             std::numeric_limits<double>::max(), static_cast<int>(fns.size() * ws.size())));
  return rep;
}

inline SuiteReport suite_convolution(const SuiteConfig& cfg) {
  using namespace detail::suite;
  SuiteReport rep{"convolution", cfg, {}, {}, {}};
  const int trials = pick(cfg.trials, 4);
  const int lev = pick(cfg.level, 8);
  const Grid g(1, lev);
  VecField f(g, 2);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double x = g.midpoint(c)[0];
    SmallVec e(2);
    e[0] = std::sin(2.0 * std::numbers::pi * x) + 0.5;
    e[1] = std::cos(3.0 * std::numbers::pi * x);
    f.set(c, e);
  }
  struct Row {
    double mono = 0.0, sup = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t t) {
    const WeightField w = gen_random_field(g, 2, trial_seed(cfg.seed, 16, t), 4.0, 0.3);
    const ApproxIdentityReport r = approx_identity_check(w, w, 2.0, f, 5);
    for (std::size_t j = 1; j < r.ladder.size(); ++j)
      rows[t].mono = std::max(rows[t].mono, r.ladder[j].deviation / r.ladder[j - 1].deviation);
    rows[t].sup = r.sup_ratio;
  });
  double mono = 0.0, sup = 0.0;
  for (const Row& r : rows) {
    mono = std::max(mono, r.mono);
    sup = std::max(sup, r.sup);
  }
  rep.checks.push_back(upper("deviation_monotone", "deviation at t/2 <= 1.05 x deviation at t", mono, 1.05, trials));
  rep.checks.push_back(upper("sup_ratio", "sup_t |phi_t * f|_{L^p(U)} / |f|_{L^p(V)} <= 8", sup, 8.0, trials));

  Rng rng(trial_seed(cfg.seed, 17, 0));
  VecField h(g, 2);
  for (double& x : h.data) x = rng.normal();
  const WeightField id = identity_field(g, 2);
  const ApproxIdentityReport r = approx_identity_check(id, id, 2.0, h, 5);
  rep.checks.push_back(upper("young_inequality", "|phi_t * f|_p <= |f|_p with identity weights", r.sup_ratio,
                             1.0 + 1e-12, 1));
  std::vector<SeriesPoint> pts;
  for (const auto& pt : approx_identity_check(gen_random_field(g, 2, trial_seed(cfg.seed, 16, 0), 4.0, 0.3),
                                              gen_random_field(g, 2, trial_seed(cfg.seed, 16, 0), 4.0, 0.3), 2.0, f, 5)
                            .ladder)
    pts.push_back({std::log2(pt.t), pt.deviation});
  rep.series["deviation by log2 t"] = pts;
  return rep;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"holder",   "reducing",   "avgop", "weaktype", "maximal",
                                              "fracint",  "sparse",     "sharpconst", "rh", "duality",
                                              "pointwise", "degenerate", "poincare", "convolution"};
  return names;
}

inline SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg = {}) {
  static const std::map<std::string, std::function<SuiteReport(const SuiteConfig&)>> table{
      {"holder", suite_holder},         {"reducing", suite_reducing},   {"avgop", suite_avgop},
      {"weaktype", suite_weaktype},     {"maximal", suite_maximal},     {"fracint", suite_fracint},
      {"sparse", suite_sparse},         {"sharpconst", suite_sharpconst}, {"rh", suite_rh},
      {"duality", suite_duality},       {"pointwise", suite_pointwise}, {"degenerate", suite_degenerate},
      {"poincare", suite_poincare},     {"convolution", suite_convolution},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown suite '" + name + "'");
  return it->second(cfg);
}

}  // namespace matbump
