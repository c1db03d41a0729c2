#pragma once

// Operators on grid functions in conjugated form: each acts on an
// unweighted vector field f and returns |U^{1/q}(x) T(V^{-1/p} f)(x)| per
// cell (or the maximal-operator analogue).

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/reducing.hpp"
#include "matbump/weights.hpp"
#include "matbump/young.hpp"

namespace matbump {

// ---------------------------------------------------------------------------
// Norms of grid functions

/// (Σ_c |Q_c| v_c^p)^{1/p}.
inline double lp_norm(std::span<const double> v, const Grid& g, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

inline std::vector<double> magnitudes(const VecField& f) {
  std::vector<double> out(f.cells());
  for (std::size_t c = 0; c < f.cells(); ++c) out[c] = f.at(c).norm();
  return out;
}

inline double lp_norm(const VecField& f, double p) { return lp_norm(magnitudes(f), f.grid, p); }

/// ‖f‖_{L^p(W)} = (∫ |W^{1/p} f|^p)^{1/p}.
inline double weighted_lp_norm(const VecField& f, const WeightField& w, double p) {
  const WeightField wp = matrix_power(w, 1.0 / p);
  std::vector<double> v(f.cells());
  for (std::size_t c = 0; c < f.cells(); ++c) v[c] = (wp[c] * f.at(c)).norm();
  return lp_norm(v, f.grid, p);
}

/// Weak norm sup_λ λ|{|v| > λ}|^{1/q}, exact for piecewise-constant v.
inline double weak_lq_norm(std::span<const double> v, const Grid& g, double q) {
  std::vector<double> s(v.begin(), v.end());
  for (double& x : s) x = std::abs(x);
  std::sort(s.begin(), s.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    best = std::max(best, s[k] * std::pow(static_cast<double>(k + 1) * g.cell_volume(), 1.0 / q));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Operator abstraction

enum class OperatorKind { identity, matrix_maximal, aux_maximal, aux_single_cube, aux_maximal_beta, orlicz_maximal,
                          averaging, sparse, frac_integral, mollifier };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::identity:
      return "identity";
    case OperatorKind::matrix_maximal:
      return "matrix_maximal";
    case OperatorKind::aux_maximal:
      return "aux_maximal";
    case OperatorKind::aux_single_cube:
      return "aux_single_cube";
    case OperatorKind::aux_maximal_beta:
      return "aux_maximal_beta";
    case OperatorKind::orlicz_maximal:
      return "orlicz_maximal";
    case OperatorKind::averaging:
      return "averaging";
    case OperatorKind::sparse:
      return "sparse";
    case OperatorKind::frac_integral:
      return "frac_integral";
    case OperatorKind::mollifier:
      return "mollifier";
  }
  return "?";
}

/// A prepared operator: maps an unweighted vector field to output magnitudes.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::identity;
  std::string name;
  Grid grid;
  int n = 1;
  double alpha = 0.0;
  std::string census = "dyadic";
  std::function<std::vector<double>(const VecField&)> apply;
  /// Cubes whose indicators (times extremal directions) seed the norm search.
  std::vector<CubeCells> hint_cubes;
  /// Cell matrices M(y) such that f = χ_Q |M e|^{p'−2} M e are natural test functions (V^{−1/p}).
  std::shared_ptr<const WeightField> dual_shape;
  /// U^{1/q} per cell, when the operator has an output weight.
  std::shared_ptr<const WeightField> range_shape;
};

inline OperatorSpec make_identity(const Grid& g, int n) {
  OperatorSpec op;
  op.kind = OperatorKind::identity;
  op.name = "identity";
  op.grid = g;
  op.n = n;
  op.apply = [](const VecField& f) { return magnitudes(f); };
  return op;
}

namespace detail {

inline void check_field(const VecField& f, const Grid& g, int n) {
  if (!(f.grid == g) || f.n != n) throw std::invalid_argument("grid function does not match the operator");
}

/// Per-cell V^{−1/p}(y) f(y).
inline VecField premultiply(const WeightField& m, const VecField& f) {
  VecField out(f.grid, f.n);
  for (std::size_t c = 0; c < f.cells(); ++c) out.set(c, m[c] * f.at(c));
  return out;
}

inline std::vector<CubeCells> cells_of(const std::vector<CensusCube>& cubes) {
  std::vector<CubeCells> out;
  out.reserve(cubes.size());
  for (const auto& c : cubes) out.push_back(c.cells);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Maximal operators

enum class MaximalMode { single_grid, shifted_union };

/// M_{α,U,V} f(x) = sup_{Q∋x} |Q|^{α/d} avg_Q |U(x)^{1/q} V(y)^{−1/p} f(y)| over the cubes given.
inline std::vector<double> matrix_maximal_on(const WeightField& uq, const WeightField& vp, double alpha,
                                             const std::vector<CubeCells>& cubes, const VecField& f) {
  const Grid& g = f.grid;
  const VecField gv = detail::premultiply(vp, f);
  std::vector<SmallVec> gy(f.cells());
  for (std::size_t c = 0; c < f.cells(); ++c) gy[c] = gv.at(c);
  std::vector<double> out(f.cells(), 0.0);
  for (const CubeCells& cc : cubes) {
    const double scale = std::pow(cc.volume, alpha / g.d);
    for (std::size_t x : cc.members) {
      double s = 0.0;
      for (std::size_t i = 0; i < cc.cells.size(); ++i) s += cc.weights[i] * (uq[x] * gy[cc.cells[i]]).norm();
      out[x] = std::max(out[x], scale * s);
    }
  }
  return out;
}

/// Cubes of each shifted grid, grouped by shift.
inline std::vector<std::vector<CubeCells>> shifted_grid_cells(const Grid& g) {
  std::vector<std::vector<CubeCells>> out;
  for (const auto& s : shifted_grids(g.d)) {
    std::vector<CubeCells> grid;
    for (int k = 0; k <= g.L; ++k)
      for (const Cube& q : grid_cubes(g, s, k)) grid.push_back(cube_cells(g, q));
    out.push_back(std::move(grid));
  }
  return out;
}

/// M_{α,U,V}: single_grid scans one census (base grid by default);
/// shifted_union sums the dyadic maximal functions of the 3^d shifted grids.
inline OperatorSpec make_matrix_maximal(const WeightField& u, const WeightField& v, double alpha, double p, double q,
                                        MaximalMode mode = MaximalMode::single_grid, Census census = Census::dyadic) {
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  auto uq = std::make_shared<WeightField>(matrix_power(u, 1.0 / q));
  auto vp = std::make_shared<WeightField>(matrix_power(v, -1.0 / p));
  OperatorSpec op;
  op.kind = OperatorKind::matrix_maximal;
  op.name = mode == MaximalMode::shifted_union ? "matrix_maximal[shifted_union]" : "matrix_maximal";
  op.grid = u.grid;
  op.n = u.n;
  op.alpha = alpha;
  op.dual_shape = vp;
  op.range_shape = uq;
  if (mode == MaximalMode::shifted_union) {
    auto grids = std::make_shared<std::vector<std::vector<CubeCells>>>(shifted_grid_cells(u.grid));
    op.census = "shifted_union";
    op.apply = [uq, vp, alpha, grids, g = u.grid, n = u.n](const VecField& f) {
      detail::check_field(f, g, n);
      std::vector<double> total(f.cells(), 0.0);
      for (const auto& grid : *grids) {
        const auto part = matrix_maximal_on(*uq, *vp, alpha, grid, f);
        for (std::size_t c = 0; c < total.size(); ++c) total[c] += part[c];
      }
      return total;
    };
    op.hint_cubes = (*grids)[grids->size() / 2];
  } else {
    auto cubes = std::make_shared<std::vector<CubeCells>>(detail::cells_of(census_cubes(u.grid, census)));
    op.census = to_string(census);
    op.apply = [uq, vp, alpha, cubes, g = u.grid, n = u.n](const VecField& f) {
      detail::check_field(f, g, n);
      return matrix_maximal_on(*uq, *vp, alpha, *cubes, f);
    };
    op.hint_cubes = *cubes;
  }
  return op;
}

/// Reducing operators of a matrix field for every cube of a list.
inline std::vector<ReducingOp> reducing_ops_for(const WeightField& a, const YoungFn& psi,
                                                const std::vector<CubeCells>& cubes, const ReducingOptions& ropt = {}) {
  std::vector<ReducingOp> out;
  out.reserve(cubes.size());
  for (const CubeCells& cc : cubes) out.push_back(reducing_op(slice(a.cells, cc), cc.weights, psi, ropt));
  return out;
}

/// sup_Q |Q|^{γ/d} avg_Q |C_Q g(y)| χ_Q(x) for fixed per-cube matrices C_Q.
inline std::vector<double> cube_matrix_maximal(const std::vector<CubeCells>& cubes, const std::vector<SmallMat>& mats,
                                               double gamma, const VecField& gfield) {
  const Grid& g = gfield.grid;
  std::vector<double> out(gfield.cells(), 0.0);
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    const CubeCells& cc = cubes[k];
    double s = 0.0;
    for (std::size_t i = 0; i < cc.cells.size(); ++i) s += cc.weights[i] * (mats[k] * gfield.at(cc.cells[i])).norm();
    s *= std::pow(cc.volume, gamma / g.d);
    for (std::size_t x : cc.members) out[x] = std::max(out[x], s);
  }
  return out;
}

/// M'_{α,U,V} f(x) = sup_Q |Q|^{α/d} avg_Q |U_Q^q V^{−1/p}(y) f(y)| χ_Q(x).
inline OperatorSpec make_aux_maximal(const WeightField& u, const WeightField& v, double alpha, double p, double q,
                                     Census census = Census::dyadic, const ReducingOptions& ropt = {}) {
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  auto vp = std::make_shared<WeightField>(matrix_power(v, -1.0 / p));
  auto uq = std::make_shared<WeightField>(matrix_power(u, 1.0 / q));
  auto cubes = std::make_shared<std::vector<CubeCells>>(detail::cells_of(census_cubes(u.grid, census)));
  auto mats = std::make_shared<std::vector<SmallMat>>();
  for (const ReducingOp& r : reducing_ops_for(*uq, YoungFn::power(q), *cubes, ropt)) mats->push_back(r.matrix);
  OperatorSpec op;
  op.kind = OperatorKind::aux_maximal;
  op.name = "aux_maximal";
  op.grid = u.grid;
  op.n = u.n;
  op.alpha = alpha;
  op.census = to_string(census);
  op.dual_shape = vp;
  op.range_shape = uq;
  op.hint_cubes = *cubes;
  op.apply = [vp, cubes, mats, alpha, g = u.grid, n = u.n](const VecField& f) {
    detail::check_field(f, g, n);
    return cube_matrix_maximal(*cubes, *mats, alpha, detail::premultiply(*vp, f));
  };
  return op;
}

/// B_Q^α f(x) = |Q|^{α/d} avg_Q |U_Q^q V^{−1/p}(y) f(y)| χ_Q(x) for one cube.
inline OperatorSpec make_aux_single_cube(const WeightField& u, const WeightField& v, double alpha, double p, double q,
                                         const Cube& cube, const ReducingOptions& ropt = {}) {
  auto vp = std::make_shared<WeightField>(matrix_power(v, -1.0 / p));
  auto uq = std::make_shared<WeightField>(matrix_power(u, 1.0 / q));
  auto cubes = std::make_shared<std::vector<CubeCells>>(std::vector<CubeCells>{cube_cells(u.grid, cube)});
  auto mats = std::make_shared<std::vector<SmallMat>>();
  for (const ReducingOp& r : reducing_ops_for(*uq, YoungFn::power(q), *cubes, ropt)) mats->push_back(r.matrix);
  OperatorSpec op;
  op.kind = OperatorKind::aux_single_cube;
  op.name = "aux_single_cube " + cube.to_string();
  op.grid = u.grid;
  op.n = u.n;
  op.alpha = alpha;
  op.dual_shape = vp;
  op.range_shape = uq;
  op.hint_cubes = *cubes;
  op.apply = [vp, cubes, mats, alpha, g = u.grid, n = u.n](const VecField& f) {
    detail::check_field(f, g, n);
    return cube_matrix_maximal(*cubes, *mats, alpha, detail::premultiply(*vp, f));
  };
  return op;
}

/// M^D_{β,V} f(x) = sup_Q |Q|^{β/d} avg_Q |(V_Q^Φ)^{−1} V^{−1/p}(y) f(y)| χ_Q(x).
inline OperatorSpec make_aux_maximal_beta(const WeightField& v, double beta, double p, const YoungFn& phi,
                                          Census census = Census::dyadic, const ReducingOptions& ropt = {}) {
  auto vp = std::make_shared<WeightField>(matrix_power(v, -1.0 / p));
  auto cubes = std::make_shared<std::vector<CubeCells>>(detail::cells_of(census_cubes(v.grid, census)));
  auto mats = std::make_shared<std::vector<SmallMat>>();
  for (const ReducingOp& r : reducing_ops_for(*vp, phi, *cubes, ropt)) mats->push_back(sym_pow(r.matrix, -1.0));
  OperatorSpec op;
  op.kind = OperatorKind::aux_maximal_beta;
  op.name = "aux_maximal_beta";
  op.grid = v.grid;
  op.n = v.n;
  op.alpha = beta;
  op.census = to_string(census);
  op.dual_shape = vp;
  op.hint_cubes = *cubes;
  op.apply = [vp, cubes, mats, beta, g = v.grid, n = v.n](const VecField& f) {
    detail::check_field(f, g, n);
    return cube_matrix_maximal(*cubes, *mats, beta, detail::premultiply(*vp, f));
  };
  return op;
}

/// M_{β,Φ̄} f(x) = sup_{Q∋x} |Q|^{β/d} ‖f‖_{Φ̄,Q} for scalar f.
inline std::vector<double> orlicz_maximal(const YoungFn& phi_bar, double beta, std::span<const double> f,
                                          const CubeCensus& census) {
  const Grid& g = census.grid;
  if (f.size() != g.cells()) throw std::invalid_argument("grid function size mismatch");
  std::vector<double> out(f.size(), 0.0), vals;
  for (const CensusCube& cc : census.cubes) {
    vals.clear();
    for (std::size_t c : cc.cells.cells) vals.push_back(std::abs(f[c]));
    const double v = std::pow(cc.cells.volume, beta / g.d) * luxemburg_norm_weighted(vals, cc.cells.weights, phi_bar);
    for (std::size_t x : cc.cells.members) out[x] = std::max(out[x], v);
  }
  return out;
}

inline OperatorSpec make_orlicz_maximal(const Grid& g, int n, const YoungFn& phi_bar, double beta,
                                        Census census = Census::dyadic) {
  auto cen = std::make_shared<CubeCensus>(make_census(g, census));
  OperatorSpec op;
  op.kind = OperatorKind::orlicz_maximal;
  op.name = "orlicz_maximal " + phi_bar.label();
  op.grid = g;
  op.n = n;
  op.alpha = beta;
  op.census = to_string(census);
  op.hint_cubes = detail::cells_of(cen->cubes);
  op.apply = [cen, phi_bar, beta, g, n](const VecField& f) {
    detail::check_field(f, g, n);
    return orlicz_maximal(phi_bar, beta, magnitudes(f), *cen);
  };
  return op;
}

// ---------------------------------------------------------------------------
// N_Q

struct NQOptions {
  bool outer_scaling = false;  // scale by |Q| instead of |R|
  ReducingOptions reducing;
};

/// Reducing operators V_R^Φ of V^{−1/p} for all base-grid cubes, by level.
struct NQData {
  Grid grid;
  WeightField uq;
  std::vector<std::vector<SmallMat>> vr;  // [level][row-major index]
  double p = 2, q = 2, alpha = 0;
  NQOptions opt;
};

inline NQData prepare_nq(const WeightField& u, const WeightField& v, double alpha, double p, double q,
                         const YoungFn& phi, const NQOptions& opt = {}) {
  NQData data;
  data.grid = u.grid;
  data.uq = matrix_power(u, 1.0 / q);
  data.p = p;
  data.q = q;
  data.alpha = alpha;
  data.opt = opt;
  const WeightField vp = matrix_power(v, -1.0 / p);
  data.vr.resize(static_cast<std::size_t>(u.grid.L) + 1);
  for (int k = 0; k <= u.grid.L; ++k) {
    for (const Cube& r : grid_cubes(u.grid, {}, k)) {
      const CubeCells cc = cube_cells(u.grid, r);
      data.vr[static_cast<std::size_t>(k)].push_back(reducing_op(slice(vp.cells, cc), cc.weights, phi, opt.reducing).matrix);
    }
  }
  return data;
}

/// N_Q(x) = sup_{R ⊆ Q, R ∋ x} |R|^{α/d+1/q−1/p} |U(x)^{1/q} V_R^Φ|_op on the cells of Q.
inline std::vector<double> n_q_field(const NQData& data, const Cube& q) {
  const Grid& g = data.grid;
  const CubeCells qc = cube_cells(g, q);
  const double s = data.alpha / g.d + 1.0 / data.q - 1.0 / data.p;
  std::vector<double> out;
  out.reserve(qc.cells.size());
  for (std::size_t x : qc.cells) {
    double best = 0.0;
    for (int k = q.k; k <= g.L; ++k) {
      const Cube r = base_ancestor(g, x, k);
      std::size_t idx = 0;
      for (int i = 0; i < g.d; ++i) idx = (idx << k) | static_cast<std::size_t>(r.m[i]);
      const double vol = data.opt.outer_scaling ? qc.volume : r.volume(g.side);
      best = std::max(best, std::pow(vol, s) * op_norm(data.uq[x] * data.vr[static_cast<std::size_t>(k)][idx]));
    }
    out.push_back(best);
  }
  return out;
}

struct NQScan {
  double avg_q = 0.0;       // sup_Q (avg_Q N_Q^q)^{1/q}
  double orlicz = 0.0;      // sup_Q ‖N_Q‖_{Ψ,Q}
  std::string avg_cube, orlicz_cube;
};

inline NQScan nq_scan(const NQData& data, const YoungFn& psi) {
  NQScan out;
  const Grid& g = data.grid;
  for (int k = 0; k <= g.L; ++k) {
    for (const Cube& q : grid_cubes(g, {}, k)) {
      const auto nq = n_q_field(data, q);
      double s = 0.0;
      for (double v : nq) s += std::pow(v, data.q);
      const double a = std::pow(s / static_cast<double>(nq.size()), 1.0 / data.q);
      if (a > out.avg_q) {
        out.avg_q = a;
        out.avg_cube = q.to_string();
      }
      const double o = luxemburg_norm(nq, psi);
      if (o > out.orlicz) {
        out.orlicz = o;
        out.orlicz_cube = q.to_string();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear operators

/// Σ_Q |Q|^{α/d} avg_Q g · χ_Q for vector g.
inline VecField cube_averages(const std::vector<CubeCells>& cubes, double alpha, const VecField& g) {
  VecField out(g.grid, g.n);
  for (const CubeCells& cc : cubes) {
    SmallVec avg(g.n);
    for (std::size_t i = 0; i < cc.cells.size(); ++i) avg = avg + cc.weights[i] * g.at(cc.cells[i]);
    avg *= std::pow(cc.volume, alpha / g.grid.d);
    for (std::size_t x : cc.members) out.set(x, out.at(x) + avg);
  }
  return out;
}

/// A^α over pairwise disjoint cubes (unweighted, vector valued).
inline VecField averaging(double alpha, const std::vector<Cube>& family, const VecField& f) {
  std::vector<CubeCells> cells;
  std::vector<char> used(f.cells(), 0);
  for (const Cube& q : family) {
    CubeCells cc = cube_cells(f.grid, q);
    for (std::size_t x : cc.members) {
      if (used[x]) throw std::invalid_argument("averaging family is not pairwise disjoint at " + q.to_string());
      used[x] = 1;
    }
    cells.push_back(std::move(cc));
  }
  return cube_averages(cells, alpha, f);
}

namespace detail {

inline OperatorSpec make_conjugated_linear(OperatorKind kind, std::string name, const WeightField& u,
                                           const WeightField& v, double p, double q, double alpha,
                                           std::function<VecField(const VecField&)> t,
                                           std::vector<CubeCells> hints) {
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  auto uq = std::make_shared<WeightField>(matrix_power(u, 1.0 / q));
  auto vp = std::make_shared<WeightField>(matrix_power(v, -1.0 / p));
  OperatorSpec op;
  op.kind = kind;
  op.name = std::move(name);
  op.grid = u.grid;
  op.n = u.n;
  op.alpha = alpha;
  op.dual_shape = vp;
  op.range_shape = uq;
  op.hint_cubes = std::move(hints);
  op.apply = [uq, vp, t = std::move(t), g = u.grid, n = u.n](const VecField& f) {
    check_field(f, g, n);
    const VecField tf = t(premultiply(*vp, f));
    std::vector<double> out(f.cells());
    for (std::size_t c = 0; c < f.cells(); ++c) out[c] = ((*uq)[c] * tf.at(c)).norm();
    return out;
  };
  return op;
}

}  // namespace detail

/// U^{1/q} A^α_Q V^{−1/p} for a family of pairwise disjoint cubes.
inline OperatorSpec make_averaging(const WeightField& u, const WeightField& v, double p, double q, double alpha,
                                   const std::vector<Cube>& family) {
  std::vector<CubeCells> cells;
  std::vector<char> used(u.grid.cells(), 0);
  for (const Cube& c : family) {
    CubeCells cc = cube_cells(u.grid, c);
    for (std::size_t x : cc.members) {
      if (used[x]) throw std::invalid_argument("averaging family is not pairwise disjoint at " + c.to_string());
      used[x] = 1;
    }
    cells.push_back(std::move(cc));
  }
  auto shared = std::make_shared<std::vector<CubeCells>>(cells);
  return detail::make_conjugated_linear(
      OperatorKind::averaging, "averaging", u, v, p, q, alpha,
      [shared, alpha](const VecField& g) { return cube_averages(*shared, alpha, g); }, cells);
}

/// T^S_α f = Σ_{Q∈S} |Q|^{α/d} avg_Q f · χ_Q.
inline VecField sparse_op(double alpha, const SparseFamily& s, const VecField& f) {
  std::vector<CubeCells> cells;
  for (const Cube& q : s.cubes) cells.push_back(cube_cells(f.grid, q));
  return cube_averages(cells, alpha, f);
}

inline OperatorSpec make_sparse(const WeightField& u, const WeightField& v, double p, double q, double alpha,
                                const SparseFamily& s) {
  std::vector<CubeCells> cells;
  for (const Cube& c : s.cubes) cells.push_back(cube_cells(u.grid, c));
  auto shared = std::make_shared<std::vector<CubeCells>>(cells);
  return detail::make_conjugated_linear(
      OperatorKind::sparse, "sparse", u, v, p, q, alpha,
      [shared, alpha](const VecField& g) { return cube_averages(*shared, alpha, g); }, cells);
}

// ---------------------------------------------------------------------------
// Fractional integral

/// Self-interaction of a cell: the average over x in the cell of ∫_cell |x−y|^{α−d} dy.
/// d = 1 is exact, 2h^α/(α(α+1)). d ≥ 2 replaces the cell by the ball of equal
/// volume centred at x: c_α h^α with c_α = 2π^{1−α/2}/α (d = 2) and
/// 4π(3/(4π))^{α/3}/α (d = 3).
inline double frac_self_kernel(int d, double alpha, double h) {
  switch (d) {
    case 1:
      return 2.0 * std::pow(h, alpha) / (alpha * (alpha + 1.0));
    case 2:
      return 2.0 * std::pow(std::numbers::pi, 1.0 - alpha / 2.0) / alpha * std::pow(h, alpha);
    default: {
      const double rho = std::cbrt(3.0 / (4.0 * std::numbers::pi)) * h;
      return 4.0 * std::numbers::pi * std::pow(rho, alpha) / alpha;
    }
  }
}

/// d = 1, neighbouring cells: (2^{α+1} − 2) h^α / (α(α+1)).
inline double frac_adjacent_kernel_1d(double alpha, double h) {
  return (std::pow(2.0, alpha + 1.0) - 2.0) * std::pow(h, alpha) / (alpha * (alpha + 1.0));
}

/// Discrete kernel K(x, y) ≈ ∫_{cell y} |x − y|^{α−d} dy for cells x, y.
inline double frac_kernel(const Grid& g, double alpha, std::size_t x, std::size_t y) {
  const double h = g.cell_side();
  if (x == y) return frac_self_kernel(g.d, alpha, h);
  const Index3 cx = g.coords(x), cy = g.coords(y);
  double dist2 = 0.0;
  for (int i = 0; i < g.d; ++i) {
    const double dd = static_cast<double>(cx[i] - cy[i]) * h;
    dist2 += dd * dd;
  }
  if (g.d == 1 && std::abs(cx[0] - cy[0]) == 1) return frac_adjacent_kernel_1d(alpha, h);
  return g.cell_volume() * std::pow(dist2, (alpha - g.d) / 2.0);
}

/// I_α f at cell midpoints (vector valued).
inline VecField frac_integral(double alpha, const VecField& f) {
  const Grid& g = f.grid;
  if (!(alpha > 0.0) || !(alpha < g.d)) throw std::domain_error("fractional integral needs 0 < alpha < d");
  VecField out(g, f.n);
  const std::size_t m = f.cells();
  // kernel depends only on the offset; tabulate by coordinate differences
  std::vector<SmallVec> fv(m);
  for (std::size_t c = 0; c < m; ++c) fv[c] = f.at(c);
  for (std::size_t x = 0; x < m; ++x) {
    SmallVec s(f.n);
    for (std::size_t y = 0; y < m; ++y) s = s + frac_kernel(g, alpha, x, y) * fv[y];
    out.set(x, s);
  }
  return out;
}

/// Midpoint-rule I_α f at an arbitrary point, for scalar f.
inline double frac_integral_at(double alpha, const Grid& g, std::span<const double> f,
                               const std::array<double, kMaxSpaceDim>& x) {
  if (!(alpha > 0.0) || !(alpha < g.d)) throw std::domain_error("fractional integral needs 0 < alpha < d");
  double s = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const auto m = g.midpoint(c);
    double dist2 = 0.0;
    for (int i = 0; i < g.d; ++i) dist2 += (x[i] - m[i]) * (x[i] - m[i]);
    if (dist2 == 0.0) throw std::domain_error("evaluation point coincides with a cell midpoint");
    s += g.cell_volume() * f[c] * std::pow(dist2, (alpha - g.d) / 2.0);
  }
  return s;
}

inline OperatorSpec make_frac_integral(const WeightField& u, const WeightField& v, double p, double q, double alpha) {
  if (!(alpha > 0.0) || !(alpha < u.grid.d)) throw std::domain_error("fractional integral needs 0 < alpha < d");
  // dense kernel matrix, built once
  const Grid g = u.grid;
  const std::size_t m = g.cells();
  auto kern = std::make_shared<std::vector<double>>(m * m);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y) (*kern)[x * m + y] = frac_kernel(g, alpha, x, y);
  std::vector<CubeCells> hints = detail::cells_of(census_cubes(g, Census::dyadic));
  return detail::make_conjugated_linear(
      OperatorKind::frac_integral, "frac_integral", u, v, p, q, alpha,
      [kern, m](const VecField& f) {
        VecField out(f.grid, f.n);
        for (std::size_t x = 0; x < m; ++x) {
          SmallVec s(f.n);
          for (std::size_t y = 0; y < m; ++y) {
            const double k = (*kern)[x * m + y];
            for (int i = 0; i < f.n; ++i) s[i] += k * f.data[y * static_cast<std::size_t>(f.n) + static_cast<std::size_t>(i)];
          }
          out.set(x, s);
        }
        return out;
      },
      std::move(hints));
}

// ---------------------------------------------------------------------------
// Mollification

/// Unnormalized profile (1 − |x|²)² on the unit ball.
inline double bump_profile(double r2) { return r2 >= 1.0 ? 0.0 : (1.0 - r2) * (1.0 - r2); }

struct Mollified {
  VecField value;
  std::vector<char> boundary;  // cells whose stencil leaves the box
};

/// φ_t ∗ f with discrete weights φ_t(x_c − x_y) normalized over the full
/// lattice, so the mass is exactly 1 away from the boundary.
inline Mollified mollify(double t, const VecField& f) {
  if (!(t > 0.0)) throw std::domain_error("mollifier scale must be positive");
  const Grid& g = f.grid;
  const double h = g.cell_side();
  const long long reach = static_cast<long long>(std::floor(t / h + 0.5));
  // stencil offsets
  std::vector<std::pair<Index3, double>> stencil;
  double mass = 0.0;
  Index3 off{};
  for (int i = 0; i < g.d; ++i) off[i] = -reach;
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < g.d; ++i) r2 += std::pow(static_cast<double>(off[i]) * h / t, 2.0);
    const double w = bump_profile(r2);
    if (w > 0.0) {
      stencil.emplace_back(off, w);
      mass += w;
    }
    int i = g.d - 1;
    while (i >= 0 && off[i] == reach) {
      off[i] = -reach;
      --i;
    }
    if (i < 0) break;
    ++off[i];
  }
  Mollified out{VecField(g, f.n), std::vector<char>(f.cells(), 0)};
  for (std::size_t c = 0; c < f.cells(); ++c) {
    const Index3 x = g.coords(c);
    SmallVec s(f.n);
    for (const auto& [o, w] : stencil) {
      Index3 y{};
      bool inside = true;
      for (int i = 0; i < g.d; ++i) {
        y[i] = x[i] + o[i];
        inside = inside && y[i] >= 0 && y[i] < g.per_axis();
      }
      if (!inside) {
        out.boundary[c] = 1;
        continue;
      }
      s = s + (w / mass) * f.at(g.index(y));
    }
    out.value.set(c, s);
  }
  return out;
}

inline OperatorSpec make_mollifier(const WeightField& u, const WeightField& v, double p, double t) {
  return detail::make_conjugated_linear(
      OperatorKind::mollifier, "mollifier", u, v, p, p, 0.0,
      [t](const VecField& f) { return mollify(t, f).value; }, {});
}

struct LadderPoint {
  double t = 0.0;
  double ratio = 0.0;      // ‖φ_t∗f‖_{L^p(U)} / ‖f‖_{L^p(V)}
  double deviation = 0.0;  // ‖φ_t∗f − f‖_{L^p(U)}
  std::size_t boundary_cells = 0;
};

struct ApproxIdentityReport {
  std::vector<LadderPoint> ladder;
  double sup_ratio = 0.0;
};

/// Evaluates the mollifier ladder t = 2^{−j}, j = 1..levels.
inline ApproxIdentityReport approx_identity_check(const WeightField& u, const WeightField& v, double p,
                                                  const VecField& f, int levels = 5) {
  ApproxIdentityReport rep;
  const double fv = weighted_lp_norm(f, v, p);
  for (int j = 1; j <= levels; ++j) {
    LadderPoint pt;
    pt.t = std::ldexp(1.0, -j);
    const Mollified m = mollify(pt.t, f);
    pt.ratio = weighted_lp_norm(m.value, u, p) / fv;
    VecField diff = m.value;
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= f.data[i];
    pt.deviation = weighted_lp_norm(diff, u, p);
    for (char b : m.boundary) pt.boundary_cells += b ? 1 : 0;
    rep.sup_ratio = std::max(rep.sup_ratio, pt.ratio);
    rep.ladder.push_back(pt);
  }
  return rep;
}

}  // namespace matbump
