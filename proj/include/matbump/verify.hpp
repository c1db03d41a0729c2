#pragma once

// Operator-norm lower bounds by search over test functions, and exact
// oracles to check them against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/operators.hpp"
#include "matbump/parallel.hpp"
#include "matbump/random.hpp"
#include "matbump/weights.hpp"

namespace matbump {

struct EstimateOptions {
  int budget = 64;            // candidate test functions evaluated
  int sweeps = 3;             // coordinate-ascent sweeps per refinement
  int refine_evaluations = 2000;  // cap on operator applications per refinement
  std::uint64_t seed = 1;
  int workers = 1;
};

struct TraceEntry {
  std::string step;
  double ratio = 0.0;
};

struct NormEstimate {
  std::string op;
  double p = 2.0, q = 2.0;
  bool weak = false;
  double value = 0.0;
  std::string test_id;
  VecField test_function;
  int trials = 0;
  std::vector<TraceEntry> trace;
};

namespace detail {

inline double test_ratio(const OperatorSpec& spec, const VecField& f, double p, double q, bool weak) {
  const double den = lp_norm(f, p);
  if (!(den > 0.0)) return 0.0;
  const auto out = spec.apply(f);
  const double num = weak ? weak_lq_norm(out, spec.grid, q) : lp_norm(out, spec.grid, q);
  return num / den;
}

/// Deterministic, lazily generated list of test functions.
class CandidatePool {
 public:
  CandidatePool(const OperatorSpec& spec, double p, std::uint64_t seed) : spec_(spec), p_(p), seed_(seed) {
    const int n = spec.n;
    for (const CubeCells& cc : spec.hint_cubes) {
      std::vector<SmallVec> dirs;
      for (int i = 0; i < n; ++i) dirs.push_back(SmallVec::basis(n, i));
      if (n > 1) dirs.push_back(extremal_direction(cc));
      for (std::size_t k = 0; k < dirs.size(); ++k) cube_dirs_.push_back({&cc, dirs[k], k});
    }
  }

  std::pair<std::string, VecField> operator()(std::size_t k) const {
    const Grid& g = spec_.grid;
    const int n = spec_.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    if (k < nn) {
      VecField f(g, n);
      for (std::size_t c = 0; c < g.cells(); ++c) f.set(c, SmallVec::basis(n, static_cast<int>(k)));
      return {"constant e" + std::to_string(k), std::move(f)};
    }
    k -= nn;
    if (k < cube_dirs_.size()) {
      const auto& [cc, e, dk] = cube_dirs_[k];
      return {"cube#" + std::to_string(k / static_cast<std::size_t>(n + (n > 1 ? 1 : 0))) + " dir" + std::to_string(dk),
              dual_shaped(*cc, e)};
    }
    k -= cube_dirs_.size();
    const std::size_t cells = g.cells() * nn;
    if (k < cells) {
      VecField f(g, n);
      f.data[k] = 1.0;
      return {"cell " + std::to_string(k / nn) + " e" + std::to_string(k % nn), std::move(f)};
    }
    k -= cells;
    Rng rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    VecField f(g, n);
    for (double& x : f.data) x = rng.normal();
    return {"gaussian " + std::to_string(k), std::move(f)};
  }

 private:
  struct CubeDir {
    const CubeCells* cube;
    SmallVec e;
    std::size_t index;
  };

  SmallMat cube_square_average(const WeightField* w, const CubeCells& cc) const {
    if (!w) return SmallMat::identity(spec_.n);
    SmallMat s(spec_.n);
    for (std::size_t i = 0; i < cc.cells.size(); ++i) s += cc.weights[i] * ((*w)[cc.cells[i]] * (*w)[cc.cells[i]]);
    return symmetrized(s);
  }

  /// e = B^{−1/2} z with z the top eigenvector of B^{1/2} A B^{1/2},
  /// A = avg U^{2/q}, B = avg V^{−2/p}; optimal for p = q = 2.
  SmallVec extremal_direction(const CubeCells& cc) const {
    const SmallMat a = cube_square_average(spec_.range_shape.get(), cc);
    const SmallMat b = cube_square_average(spec_.dual_shape.get(), cc);
    const SmallVec z = top_right_singular_vector(sym_pow(a, 0.5) * sym_pow(b, 0.5));
    const SmallVec e = sym_pow(b, -0.5) * z;
    return (1.0 / e.norm()) * e;
  }

  /// χ_Q |M e|^{p'−2} M e with M = V^{−1/p}; for p = 1 the cell where |M e| peaks.
  VecField dual_shaped(const CubeCells& cc, const SmallVec& e) const {
    const Grid& g = spec_.grid;
    VecField f(g, spec_.n);
    const WeightField* m = spec_.dual_shape.get();
    const auto me = [&](std::size_t c) { return m ? (*m)[c] * e : e; };
    if (p_ == 1.0) {
      std::size_t best = cc.cells.front();
      double top = -1.0;
      for (std::size_t c : cc.cells) {
        const double v = me(c).norm();
        if (v > top) {
          top = v;
          best = c;
        }
      }
      const SmallVec v = me(best);
      f.set(best, (1.0 / v.norm()) * v);
      return f;
    }
    const double pp = conjugate_exponent(p_);
    for (std::size_t i = 0; i < cc.cells.size(); ++i) {
      if (!(cc.weights[i] > 0.0)) continue;
      const SmallVec v = me(cc.cells[i]);
      const double r = v.norm();
      if (r > 0.0) f.set(cc.cells[i], std::pow(r, pp - 2.0) * v);
    }
    return f;
  }

  const OperatorSpec& spec_;
  double p_;
  std::uint64_t seed_;
  std::vector<CubeDir> cube_dirs_;
};

/// Pattern search one cell-vector entry at a time; returns the improved ratio.
inline double coordinate_ascent(const OperatorSpec& spec, VecField& f, double p, double q, bool weak, double ratio,
                                const EstimateOptions& opt) {
  double scale = 0.0;
  for (double x : f.data) scale = std::max(scale, std::abs(x));
  if (!(scale > 0.0)) return ratio;
  int evals = 0;
  for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
    const double step = scale * std::ldexp(1.0, -sweep - 1);
    for (std::size_t k = 0; k < f.data.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        if (evals >= opt.refine_evaluations) return ratio;
        const double old = f.data[k];
        f.data[k] = old + sgn * step;
        const double r = test_ratio(spec, f, p, q, weak);
        ++evals;
        if (r > ratio * (1.0 + 1e-12)) {
          ratio = r;
          break;
        }
        f.data[k] = old;
      }
    }
  }
  return ratio;
}

inline NormEstimate estimate(const OperatorSpec& spec, double p, double q, const EstimateOptions& opt, bool weak) {
  if (opt.budget < 1) throw std::invalid_argument("estimation budget must be at least 1");
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::domain_error("exponents must be at least 1");
  const CandidatePool pool(spec, p, opt.seed);
  const std::size_t budget = static_cast<std::size_t>(opt.budget);
  std::vector<double> ratios(budget, 0.0);
  parallel_for(budget, opt.workers, [&](std::size_t k) { ratios[k] = test_ratio(spec, pool(k).second, p, q, weak); });

  NormEstimate est;
  est.op = spec.name;
  est.p = p;
  est.q = q;
  est.weak = weak;
  est.trials = opt.budget;
  std::size_t best = 0;
  for (std::size_t k = 1; k < budget; ++k)
    if (ratios[k] > ratios[best]) best = k;
  auto [id, f] = pool(best);
  est.value = ratios[best];
  est.test_id = id;
  est.test_function = f;
  est.trace.push_back({"candidates: " + id, ratios[best]});

  // refine the best candidate of every prefix of length 2^j ≤ budget
  std::size_t last_start = budget;
  for (std::size_t len = 1; len <= budget; len *= 2) {
    std::size_t start = 0;
    for (std::size_t k = 1; k < len; ++k)
      if (ratios[k] > ratios[start]) start = k;
    if (start == last_start) continue;
    last_start = start;
    auto [sid, sf] = pool(start);
    const double r = coordinate_ascent(spec, sf, p, q, weak, ratios[start], opt);
    est.trace.push_back({"ascent from " + sid, r});
    if (r > est.value) {
      est.value = r;
      est.test_id = sid + " +ascent";
      est.test_function = std::move(sf);
    }
  }
  return est;
}

}  // namespace detail

/// Lower bound for ‖U^{1/q} T V^{−1/p}‖_{L^p→L^q}.
inline NormEstimate estimate_norm(const OperatorSpec& spec, double p, double q, const EstimateOptions& opt = {}) {
  return detail::estimate(spec, p, q, opt, false);
}

/// Lower bound for the L^p → L^{q,∞} norm.
inline NormEstimate weak_norm_estimate(const OperatorSpec& spec, double p, double q, const EstimateOptions& opt = {}) {
  return detail::estimate(spec, p, q, opt, true);
}

/// Ratio of the stored test function, recomputed from scratch.
inline double reevaluate(const OperatorSpec& spec, const NormEstimate& est) {
  return detail::test_ratio(spec, est.test_function, est.p, est.q, est.weak);
}

/// ‖U^{1/2} A_Q^α V^{−1/2}‖_{L²→L²} = |Q|^{α/d} λ_max((avg U)^{1/2}(avg V^{−1})(avg U)^{1/2})^{1/2}.
inline double exact_avg_norm_p2(const WeightField& u, const WeightField& v, const Cube& q, double alpha) {
  if (u.n != v.n || !(u.grid == v.grid)) throw std::invalid_argument("weight fields do not match");
  const CubeCells cc = cube_cells(u.grid, q);
  SmallMat au(u.n), av(u.n);
  for (std::size_t i = 0; i < cc.cells.size(); ++i) {
    au += cc.weights[i] * u[cc.cells[i]];
    av += cc.weights[i] * sym_pow(v[cc.cells[i]], -1.0);
  }
  const SmallMat h = sym_pow(symmetrized(au), 0.5);
  const double lam = sym_max_eigenvalue(symmetrized(h * av * h));
  return std::pow(cc.volume, alpha / u.grid.d) * std::sqrt(lam);
}

}  // namespace matbump
