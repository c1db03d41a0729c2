#pragma once

// Weight constants scanned over a cube census: matrix A_p, two-weight
// A^α_{p,q}, Orlicz bump constants (definitional and through reducing
// operators), Fujii-Wilson A_∞ and reverse Hölder exponents.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/parallel.hpp"
#include "matbump/reducing.hpp"
#include "matbump/weights.hpp"
#include "matbump/young.hpp"

namespace matbump {

/// The cubes a supremum runs over, with their cells.
struct CubeCensus {
  Grid grid;
  Census kind = Census::dyadic;
  std::vector<CensusCube> cubes;
};

inline CubeCensus make_census(const Grid& g, Census kind = Census::dyadic) {
  return CubeCensus{g, kind, census_cubes(g, kind)};
}

struct ConstantReport {
  std::string name;
  double value = 0.0;
  std::string cube;  // attaining cube
  std::string method;  // definitional | reducing
  double p = 0.0, q = 0.0, alpha = 0.0;
  std::string phi, psi;
  std::string census;
  std::size_t cubes_scanned = 0;
  bool lower_bound = false;
  std::vector<std::string> warnings;
};

struct ScanOptions {
  int workers = 1;
};

inline double conjugate_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

namespace detail {

/// Maximum of per-cube values; the first cube in census order wins ties.
template <class F>
std::pair<double, std::size_t> scan_max(const CubeCensus& census, int workers, F&& per_cube) {
  std::vector<double> vals(census.cubes.size(), 0.0);
  parallel_for(census.cubes.size(), workers, [&](std::size_t i) { vals[i] = per_cube(census.cubes[i]); });
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] > best) {
      best = vals[i];
      arg = i;
    }
  }
  return {best, arg};
}

inline void check_pq(double p, double q, double alpha, int d, bool allow_p1) {
  if (!(p >= 1.0) || (!allow_p1 && p == 1.0)) throw std::domain_error("p out of range");
  if (!(q >= p) || !std::isfinite(q)) throw std::domain_error("q must satisfy p <= q < inf");
  if (!(alpha >= 0.0) || !(alpha < d)) throw std::domain_error("alpha must satisfy 0 <= alpha < d");
}

inline double cube_scale(const CensusCube& cc, int d, double p, double q, double alpha) {
  return std::pow(cc.cells.volume, alpha / d + 1.0 / q - 1.0 / p);
}

inline double power_mean(std::span<const double> v, std::span<const double> w, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(v[i], r);
  return std::pow(s, 1.0 / r);
}

inline ConstantReport make_report(std::string name, const CubeCensus& census, std::pair<double, std::size_t> best,
                                  std::string method, double p, double q, double alpha) {
  ConstantReport r;
  r.name = std::move(name);
  r.value = best.first;
  r.cube = census.cubes.empty() ? "" : census.cubes[best.second].label();
  r.method = std::move(method);
  r.p = p;
  r.q = q;
  r.alpha = alpha;
  r.census = to_string(census.kind);
  r.cubes_scanned = census.cubes.size();
  return r;
}

}  // namespace detail

/// [U,V]_{A^α_{p,q}}: |Q|^{α/d+1/q−1/p} (avg_x (avg_y |U^{1/q}(x)V^{−1/p}(y)|^{p'})^{q/p'})^{1/q}.
/// For p = 1: |Q|^{α/d+1/q−1} max_y (avg_x |U^{1/q}(x)V^{−1}(y)|^q)^{1/q}.
inline ConstantReport two_weight_apq(const WeightField& u, const WeightField& v, double p, double q, double alpha,
                                     const CubeCensus& census, const ScanOptions& opt = {}) {
  const int d = census.grid.d;
  detail::check_pq(p, q, alpha, d, true);
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  const WeightField uq = matrix_power(u, 1.0 / q);
  const WeightField vp = matrix_power(v, -1.0 / p);
  const double pp = conjugate_exponent(p);
  const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& cc) {
    const auto& cells = cc.cells.cells;
    const auto& w = cc.cells.weights;
    const std::size_t m = cells.size();
    if (p == 1.0) {
      double top = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w[i] * std::pow(op_norm(uq[cells[i]] * vp[cells[j]]), q);
        top = std::max(top, s);
      }
      return detail::cube_scale(cc, d, p, q, alpha) * std::pow(top, 1.0 / q);
    }
    double outer = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double inner = 0.0;
      for (std::size_t j = 0; j < m; ++j) inner += w[j] * std::pow(op_norm(uq[cells[i]] * vp[cells[j]]), pp);
      outer += w[i] * std::pow(inner, q / pp);
    }
    return detail::cube_scale(cc, d, p, q, alpha) * std::pow(outer, 1.0 / q);
  });
  return detail::make_report("A_pq", census, best, "definitional", p, q, alpha);
}

inline ConstantReport two_weight_apq(const WeightField& u, const WeightField& v, double p, double q, double alpha) {
  return two_weight_apq(u, v, p, q, alpha, make_census(u.grid));
}

/// [W]_{A_p} = sup_Q avg_x (avg_y |W^{1/p}(x)W^{−1/p}(y)|^{p'})^{p/p'}.
inline ConstantReport matrix_ap(const WeightField& w, double p, const CubeCensus& census, const ScanOptions& opt = {}) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::domain_error("matrix A_p needs 1 < p < inf");
  ConstantReport r = two_weight_apq(w, w, p, p, 0.0, census, opt);
  r.name = "A_p";
  r.value = std::pow(r.value, p);
  return r;
}

inline ConstantReport matrix_ap(const WeightField& w, double p) { return matrix_ap(w, p, make_census(w.grid)); }

// ---------------------------------------------------------------------------
// Bump constants

enum class BumpVariant { maximal, double_bump, czo };

inline const char* to_string(BumpVariant v) {
  switch (v) {
    case BumpVariant::maximal:
      return "maximal";
    case BumpVariant::double_bump:
      return "double";
    case BumpVariant::czo:
      return "czo";
  }
  return "?";
}

inline BumpVariant bump_variant_from_string(const std::string& s) {
  if (s == "maximal") return BumpVariant::maximal;
  if (s == "double") return BumpVariant::double_bump;
  if (s == "czo") return BumpVariant::czo;
  throw std::invalid_argument("unknown bump variant '" + s + "'");
}

struct BumpParams {
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
  YoungFn phi = YoungFn::power(2.0);
  std::optional<YoungFn> psi;  // required by double and czo
  BumpVariant variant = BumpVariant::maximal;
  bool literal_inner_exponent = false;  // maximal: average the inner norm to the first power
  bool override_b_class = false;
};

class BClassError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

/// Enforces the growth hypotheses of each bump variant; returns warnings.
inline std::vector<std::string> check_bump_classes(const BumpParams& bp) {
  std::vector<std::string> warnings;
  const auto require = [&](const YoungFn& f, const char* which, double p, double q) {
    std::ostringstream cls;
    cls << "B_{" << p << "," << q << "}";
    BClass c;
    try {
      c = classify_b(associate(f), p, q);
    } catch (const std::domain_error& e) {
      c.verdict = BVerdict::nonmember;
    }
    if (c.verdict == BVerdict::member) return;
    const std::string msg = std::string("associate of ") + which + " " + f.label() + " is " + to_string(c.verdict) +
                            " in " + cls.str();
    if (c.verdict == BVerdict::inconclusive || bp.override_b_class) {
      warnings.push_back(msg);
      return;
    }
    throw BClassError(msg);
  };
  const double pp = conjugate_exponent(bp.p), qp = conjugate_exponent(bp.q);
  switch (bp.variant) {
    case BumpVariant::maximal:
      require(bp.phi, "Phi", bp.p, bp.q);
      break;
    case BumpVariant::double_bump:
      if (!bp.psi) throw std::invalid_argument("double bump needs Psi");
      require(bp.phi, "Phi", bp.p, bp.q);
      require(*bp.psi, "Psi", qp, qp);
      break;
    case BumpVariant::czo:
      if (!bp.psi) throw std::invalid_argument("czo bump needs Psi");
      require(bp.phi, "Phi", bp.p, bp.p);
      require(*bp.psi, "Psi", pp, pp);
      break;
  }
  return warnings;
}

}  // namespace detail

/// Definitional bump constants with exact per-cell inner Luxemburg norms.
///   maximal: |Q|^s (avg_x ‖U^{1/q}(x)V^{−1/p}‖_{Φ,Q}^q)^{1/q}
///   double:  |Q|^s ‖‖U^{1/q}(x)V^{−1/p}(y)‖_{Φ_y,Q}‖_{Ψ_x,Q}
///   czo:     ‖‖U^{1/p}(x)V^{−1/p}(y)‖_{Φ_y,Q}‖_{Ψ_x,Q}
/// with s = α/d + 1/q − 1/p.
inline ConstantReport bump_constant(const WeightField& u, const WeightField& v, const BumpParams& bp,
                                    const CubeCensus& census, const ScanOptions& opt = {}) {
  const int d = census.grid.d;
  const bool czo = bp.variant == BumpVariant::czo;
  const double q = czo ? bp.p : bp.q;
  const double alpha = czo ? 0.0 : bp.alpha;
  detail::check_pq(bp.p, q, alpha, d, false);
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  auto warnings = detail::check_bump_classes(bp);
  const WeightField uq = matrix_power(u, 1.0 / q);
  const WeightField vp = matrix_power(v, -1.0 / bp.p);
  const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& cc) {
    const auto& cells = cc.cells.cells;
    const auto& w = cc.cells.weights;
    const std::size_t m = cells.size();
    std::vector<double> row(m), inner(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) row[j] = op_norm(uq[cells[i]] * vp[cells[j]]);
      inner[i] = luxemburg_norm_weighted(row, w, bp.phi);
    }
    double val;
    if (bp.variant == BumpVariant::maximal) {
      val = bp.literal_inner_exponent ? std::pow(detail::power_mean(inner, w, 1.0), 1.0 / q)
                                      : detail::power_mean(inner, w, q);
    } else {
      val = luxemburg_norm_weighted(inner, w, *bp.psi);
    }
    return detail::cube_scale(cc, d, bp.p, q, alpha) * val;
  });
  ConstantReport r = detail::make_report(std::string("bump_") + to_string(bp.variant), census, best, "definitional",
                                         bp.p, q, alpha);
  r.phi = bp.phi.label();
  // the maximal variant averages with t^q whatever Ψ was supplied
  if (bp.variant == BumpVariant::maximal)
    r.psi = YoungFn::power(q).label();
  else if (bp.psi)
    r.psi = bp.psi->label();
  r.warnings = std::move(warnings);
  return r;
}

/// The same constants as sup_Q |Q|^s |R_U R_V|_op with reducing operators
/// R_U for U^{1/q} (Ψ, or t^q for the maximal variant) and R_V for V^{−1/p} (Φ).
inline ConstantReport bump_constant_reducing(const WeightField& u, const WeightField& v, const BumpParams& bp,
                                             const CubeCensus& census, const ScanOptions& opt = {},
                                             const ReducingOptions& ropt = {}) {
  const int d = census.grid.d;
  const bool czo = bp.variant == BumpVariant::czo;
  const double q = czo ? bp.p : bp.q;
  const double alpha = czo ? 0.0 : bp.alpha;
  detail::check_pq(bp.p, q, alpha, d, false);
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  auto warnings = detail::check_bump_classes(bp);
  const WeightField uq = matrix_power(u, 1.0 / q);
  const WeightField vp = matrix_power(v, -1.0 / bp.p);
  const YoungFn psi_u = bp.variant == BumpVariant::maximal ? YoungFn::power(q) : *bp.psi;
  const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& cc) {
    const auto a = slice(uq.cells, cc.cells);
    const auto b = slice(vp.cells, cc.cells);
    const ReducingOp ru = reducing_op(a, cc.cells.weights, psi_u, ropt);
    const ReducingOp rv = reducing_op(b, cc.cells.weights, bp.phi, ropt);
    return detail::cube_scale(cc, d, bp.p, q, alpha) * reducing_opnorm_pair(ru, rv);
  });
  ConstantReport r = detail::make_report(std::string("bump_") + to_string(bp.variant), census, best, "reducing",
                                         bp.p, q, alpha);
  r.phi = bp.phi.label();
  r.psi = psi_u.label();
  r.warnings = std::move(warnings);
  return r;
}

/// A^α_{p,q} through reducing operators: sup_Q |Q|^s |U_Q^q V_Q^{p'}|_op.
inline ConstantReport two_weight_apq_reducing(const WeightField& u, const WeightField& v, double p, double q,
                                              double alpha, const CubeCensus& census, const ScanOptions& opt = {},
                                              const ReducingOptions& ropt = {}) {
  const int d = census.grid.d;
  detail::check_pq(p, q, alpha, d, false);
  const WeightField uq = matrix_power(u, 1.0 / q);
  const WeightField vp = matrix_power(v, -1.0 / p);
  const YoungFn pu = YoungFn::power(q), pv = YoungFn::power(conjugate_exponent(p));
  const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& cc) {
    const ReducingOp ru = reducing_op(slice(uq.cells, cc.cells), cc.cells.weights, pu, ropt);
    const ReducingOp rv = reducing_op(slice(vp.cells, cc.cells), cc.cells.weights, pv, ropt);
    return detail::cube_scale(cc, d, p, q, alpha) * reducing_opnorm_pair(ru, rv);
  });
  return detail::make_report("A_pq", census, best, "reducing", p, q, alpha);
}

// ---------------------------------------------------------------------------
// Scalar A_∞ and reverse Hölder

namespace detail {

/// ∫_Q max(c, M_Q w) over a base-grid cube, M_Q the dyadic maximal function
/// over subcubes of Q. Children inherit the running maximum.
inline double fw_integral(const Grid& g, std::span<const double> w, const Cube& q, double c,
                          const std::vector<std::vector<double>>& avg) {
  std::size_t idx = 0;
  for (int i = 0; i < g.d; ++i) idx = (idx << q.k) | static_cast<std::size_t>(q.m[i]);
  const double a = std::max(c, avg[static_cast<std::size_t>(q.k)][idx]);
  if (q.k == g.L) return a * g.cell_volume();
  double s = 0.0;
  for (const Cube& ch : q.children()) s += fw_integral(g, w, ch, a, avg);
  return s;
}

}  // namespace detail

/// Fujii-Wilson [w]_{A_∞} = sup_Q (1/w(Q)) ∫_Q M(wχ_Q) with the dyadic
/// maximal function of the census.
inline ConstantReport fujii_wilson_ainfty(std::span<const double> w, const CubeCensus& census,
                                          const ScanOptions& opt = {}) {
  const Grid& g = census.grid;
  if (w.size() != g.cells()) throw std::invalid_argument("scalar weight size mismatch");
  if (census.kind == Census::dyadic) {
    std::vector<std::vector<double>> avg(static_cast<std::size_t>(g.L) + 1);
    for (int k = 0; k <= g.L; ++k) {
      for (const Cube& q : grid_cubes(g, {}, k)) {
        const CubeCells cc = cube_cells(g, q);
        double s = 0.0;
        for (std::size_t i = 0; i < cc.cells.size(); ++i) s += cc.weights[i] * w[cc.cells[i]];
        avg[static_cast<std::size_t>(k)].push_back(s);
      }
    }
    const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& cc) {
      const Cube& q = *cc.cube;
      std::size_t idx = 0;
      for (int i = 0; i < g.d; ++i) idx = (idx << q.k) | static_cast<std::size_t>(q.m[i]);
      const double wq = avg[static_cast<std::size_t>(q.k)][idx] * cc.cells.volume;
      return detail::fw_integral(g, w, q, 0.0, avg) / wq;
    });
    auto r = detail::make_report("A_inf", census, best, "definitional", 0, 0, 0);
    return r;
  }
  // general census: brute force over (Q, R, x)
  const std::size_t nc = census.cubes.size();
  const double cell_vol = g.cell_volume();
  const auto best = detail::scan_max(census, opt.workers, [&](const CensusCube& qc) {
    std::vector<double> frac(g.cells(), 0.0);
    double wq = 0.0;
    for (std::size_t i = 0; i < qc.cells.cells.size(); ++i) {
      const double f = qc.cells.weights[i] * qc.cells.volume / cell_vol;
      frac[qc.cells.cells[i]] = f;
      wq += f * cell_vol * w[qc.cells.cells[i]];
    }
    std::vector<double> mx(g.cells(), 0.0);
    for (std::size_t r = 0; r < nc; ++r) {
      const CubeCells& rc = census.cubes[r].cells;
      double s = 0.0;
      for (std::size_t i = 0; i < rc.cells.size(); ++i) s += rc.weights[i] * w[rc.cells[i]] * frac[rc.cells[i]];
      if (s == 0.0) continue;
      for (std::size_t c : rc.members) mx[c] = std::max(mx[c], s);
    }
    double integral = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) integral += frac[c] * cell_vol * mx[c];
    return integral / wq;
  });
  return detail::make_report("A_inf", census, best, "definitional", 0, 0, 0);
}

inline ConstantReport fujii_wilson_ainfty(std::span<const double> w, const Grid& g) {
  return fujii_wilson_ainfty(w, make_census(g));
}

/// Reference value over all (x, Q) pairs and all base-grid cubes R ∋ x,
/// including those larger than Q.
inline double fujii_wilson_brute(std::span<const double> w, const Grid& g) {
  double best = 0.0;
  for (int k = 0; k <= g.L; ++k) {
    for (const Cube& q : grid_cubes(g, {}, k)) {
      const CubeCells qc = cube_cells(g, q);
      std::vector<char> in(g.cells(), 0);
      double wq = 0.0;
      for (std::size_t c : qc.cells) {
        in[c] = 1;
        wq += w[c] * g.cell_volume();
      }
      double integral = 0.0;
      for (std::size_t x : qc.cells) {
        double m = 0.0;
        for (int j = 0; j <= g.L; ++j) {
          const CubeCells rc = cube_cells(g, base_ancestor(g, x, j));
          double s = 0.0;
          for (std::size_t c : rc.cells)
            if (in[c]) s += w[c];
          m = std::max(m, s / static_cast<double>(rc.cells.size()));
        }
        integral += m * g.cell_volume();
      }
      best = std::max(best, integral / wq);
    }
  }
  return best;
}

/// |W^{1/p} e|^p per cell.
inline std::vector<double> direction_weight(const WeightField& w, double p, const SmallVec& e) {
  const WeightField wp = matrix_power(w, 1.0 / p);
  std::vector<double> out(w.size());
  for (std::size_t c = 0; c < w.size(); ++c) out[c] = std::pow((wp[c] * e).norm(), p);
  return out;
}

/// sup_e [|W^{1/p}e|^p]_{A_∞} over sampled directions and the axes; Brent
/// refinement of the angle when n = 2. A lower bound.
inline ConstantReport scalar_ainfty_sup(const WeightField& w, double p, int n_dirs, const CubeCensus& census,
                                        const ScanOptions& opt = {}, double pre_rotation = 0.0) {
  if (!(p > 1.0)) throw std::domain_error("scalar A_inf needs p > 1");
  const WeightField wp = matrix_power(w, 1.0 / p);
  const auto value = [&](const SmallVec& e) {
    std::vector<double> s(w.size());
    for (std::size_t c = 0; c < w.size(); ++c) s[c] = std::pow((wp[c] * e).norm(), p);
    return fujii_wilson_ainfty(s, census, opt).value;
  };
  auto dirs = half_directions(w.n, std::max(2, n_dirs));
  if (w.n > 1) {
    const SmallMat rot = rotation(w.n, pre_rotation);
    for (auto& e : dirs) e = rot * e;
    // coordinate axes as well, so diagonal fields are scanned exactly
    for (int i = 0; i < w.n; ++i) {
      SmallVec e(w.n);
      e[i] = 1.0;
      dirs.push_back(e);
    }
  }
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double v = value(dirs[i]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  std::string where;
  if (w.n == 2) {
    const double th0 = std::atan2(dirs[arg][1], dirs[arg][0]);
    const double step = std::numbers::pi / static_cast<double>(dirs.size());
    const auto at = [&](double th) {
      SmallVec e(2);
      e[0] = std::cos(th);
      e[1] = std::sin(th);
      return value(e);
    };
    const double th = detail::brent_argmax(at, th0 - step, th0 + step, 40);
    const double v = at(th);
    if (v > best) best = v;
  }
  ConstantReport r;
  r.name = "A_inf_sca";
  r.value = best;
  r.method = "definitional";
  r.p = p;
  r.census = to_string(census.kind);
  r.cubes_scanned = census.cubes.size();
  r.lower_bound = true;
  std::ostringstream os;
  os << "direction " << arg;
  r.cube = os.str();
  return r;
}

struct RhExponents {
  double s = 1.0;
  double r = 1.0;
  double ainf_w = 1.0;     // [W]_{A^{sca}_{p,∞}}
  double ainf_dual = 1.0;  // [W^{−p'/p}]_{A^{sca}_{p',∞}}
};

/// s = 1 + 1/(2^{d+11}[W]_{A^{sca}_{p,∞}}), r = 1 + 1/(2^{d+11}[W^{−p'/p}]_{A^{sca}_{p',∞}}).
inline RhExponents rh_exponents(const WeightField& w, double p, int n_dirs, const CubeCensus& census,
                                const ScanOptions& opt = {}) {
  const double pp = conjugate_exponent(p);
  RhExponents out;
  out.ainf_w = scalar_ainfty_sup(w, p, n_dirs, census, opt).value;
  out.ainf_dual = scalar_ainfty_sup(matrix_power(w, -pp / p), pp, n_dirs, census, opt).value;
  if (!std::isfinite(out.ainf_w) || !std::isfinite(out.ainf_dual)) throw std::domain_error("A_inf constants not finite");
  const double c = std::ldexp(1.0, census.grid.d + 11);
  out.s = 1.0 + 1.0 / (c * out.ainf_w);
  out.r = 1.0 + 1.0 / (c * out.ainf_dual);
  return out;
}

// ---------------------------------------------------------------------------
// Independent scalar formulas (n = 1), used as oracles

/// [u,v]_{A_p}: sup avg u · (avg v^{1−p'})^{p−1}.
inline double scalar_ap(std::span<const double> u, std::span<const double> v, double p, const CubeCensus& census) {
  const double pp = conjugate_exponent(p);
  double best = 0.0;
  for (const CensusCube& cc : census.cubes) {
    double au = 0.0, av = 0.0;
    for (std::size_t i = 0; i < cc.cells.cells.size(); ++i) {
      au += cc.cells.weights[i] * u[cc.cells.cells[i]];
      av += cc.cells.weights[i] * std::pow(v[cc.cells.cells[i]], 1.0 - pp);
    }
    best = std::max(best, au * std::pow(av, p - 1.0));
  }
  return best;
}

/// Scalar A^α_{p,q}: |Q|^{α/d+1/q−1/p} (avg u)^{1/q} (avg v^{−p'/p})^{1/p'}; p = 1 uses max v^{−1}.
inline double scalar_apq(std::span<const double> u, std::span<const double> v, double p, double q, double alpha,
                         const CubeCensus& census) {
  const int d = census.grid.d;
  double best = 0.0;
  for (const CensusCube& cc : census.cubes) {
    double au = 0.0, av = 0.0;
    for (std::size_t i = 0; i < cc.cells.cells.size(); ++i) {
      const std::size_t c = cc.cells.cells[i];
      au += cc.cells.weights[i] * u[c];
      if (p == 1.0)
        av = std::max(av, 1.0 / v[c]);
      else
        av += cc.cells.weights[i] * std::pow(v[c], -conjugate_exponent(p) / p);
    }
    const double vpart = p == 1.0 ? av : std::pow(av, 1.0 / conjugate_exponent(p));
    best = std::max(best, detail::cube_scale(cc, d, p, q, alpha) * std::pow(au, 1.0 / q) * vpart);
  }
  return best;
}

}  // namespace matbump
