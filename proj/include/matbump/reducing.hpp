#pragma once

// Reducing operators: constant matrices R with |Re| comparable to
// ‖A(·)e‖_{Ψ,Q} uniformly in e.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/random.hpp"
#include "matbump/young.hpp"

namespace matbump {

enum class ReducingProvenance { exact_p2, mvee, scalar };

inline const char* to_string(ReducingProvenance p) {
  switch (p) {
    case ReducingProvenance::exact_p2:
      return "exact_p2";
    case ReducingProvenance::mvee:
      return "mvee";
    case ReducingProvenance::scalar:
      return "scalar";
  }
  return "?";
}

struct ReducingOp {
  SmallMat matrix;
  ReducingProvenance provenance = ReducingProvenance::exact_p2;
  std::string psi;           // Young function label
  std::string role;          // e.g. "U^{1/q}" or "V^{-1/p}"
  std::optional<Cube> cube;
  int directions = 0;
  double epsilon = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double scale = 1.0;        // dilation applied to the enclosing ellipsoid

  int n() const { return matrix.size(); }
};

struct ReducingOptions {
  int directions = 0;        // 0: default for n
  double epsilon = 1e-7;
  int max_iterations = 1000000;
  std::uint64_t seed = 0x5eed;
  bool allow_exact = true;   // use the closed form when Ψ = t^2
};

inline int default_directions(int n) {
  switch (n) {
    case 1:
      return 2;
    case 2:
      return 64;
    case 3:
      return 512;
    default:
      return 1024;
  }
}

/// Deterministic unit directions, one per antipodal pair (count/2 of them).
inline std::vector<SmallVec> half_directions(int n, int count, std::uint64_t seed = 0x5eed) {
  const int half = std::max(1, count / 2);
  std::vector<SmallVec> out;
  out.reserve(static_cast<std::size_t>(half));
  if (n == 1) {
    out.push_back(SmallVec::basis(1, 0));
    return out;
  }
  if (n == 2) {
    for (int j = 0; j < half; ++j) {
      const double th = std::numbers::pi * j / half;
      SmallVec v(2);
      v[0] = std::cos(th);
      v[1] = std::sin(th);
      out.push_back(v);
    }
    return out;
  }
  if (n == 3) {
    // Fibonacci lattice on the sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < half; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / half;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      SmallVec v(3);
      v[0] = rad * std::cos(golden * j);
      v[1] = rad * std::sin(golden * j);
      v[2] = z;
      out.push_back(v);
    }
    return out;
  }
  Rng rng(seed);
  for (int j = 0; j < half; ++j) {
    SmallVec v(n);
    double nr = 0.0;
    while (nr < 1e-8) {
      for (int i = 0; i < n; ++i) v[i] = rng.normal();
      nr = v.norm();
    }
    out.push_back((1.0 / nr) * v);
  }
  return out;
}

/// ‖A(·)e‖_{Ψ,Q} for a cube slice with cell weights summing to 1.
inline double directional_norm(std::span<const SmallMat> a, std::span<const double> weights, const YoungFn& psi,
                               const SmallVec& e) {
  std::vector<double> vals(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) vals[i] = (a[i] * e).norm();
  return luxemburg_norm_weighted(vals, weights, psi);
}

/// (Σ w A²)^{1/2}: |Re| = ‖Ae‖_{2,Q} exactly.
inline ReducingOp reducing_exact_p2(std::span<const SmallMat> a, std::span<const double> weights) {
  if (a.empty() || a.size() != weights.size()) throw std::invalid_argument("reducing operator needs a nonempty slice");
  const int n = a[0].size();
  SmallMat s(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const SmallMat sq = a[i] * a[i];
    s += weights[i] * sq;
  }
  ReducingOp r;
  r.matrix = sym_pow(symmetrized(s), 0.5);
  r.provenance = ReducingProvenance::exact_p2;
  r.psi = YoungFn::power(2.0).label();
  return r;
}

struct MveeResult {
  SmallMat shape;  // X = Σ u_i p_i p_iᵀ; the ellipsoid is {x : xᵀX⁻¹x ≤ n}
  int iterations = 0;  // residual > ε means the iteration cap was reached
  double residual = 0.0;
};

/// Minimum-volume origin-centered ellipsoid enclosing {±p_i}, by Khachiyan's
/// barycentric ascent with away steps and rank-one inverse updates.
inline MveeResult mvee_symmetric(const std::vector<SmallVec>& pts, double eps, int max_iterations) {
  const std::size_t m = pts.size();
  const int n = pts.front().size();
  const double dn = static_cast<double>(n);
  std::vector<double> u(m, 1.0 / static_cast<double>(m));
  std::vector<double> kappa(m);
  SmallMat x(n), xi(n);
  const auto rebuild = [&] {
    x = SmallMat(n);
    for (std::size_t i = 0; i < m; ++i)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) x(r, c) += u[i] * pts[i][r] * pts[i][c];
    x = symmetrized(x);
    xi = sym_pow(x, -1.0);
    for (std::size_t i = 0; i < m; ++i) kappa[i] = pts[i].dot(xi * pts[i]);
  };
  rebuild();
  MveeResult res;
  for (int it = 0; it <= max_iterations; ++it) {
    if (it % 256 == 255) rebuild();
    std::size_t jmax = 0, jmin = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (kappa[i] > kappa[jmax]) jmax = i;
      if (u[i] > 0.0 && (jmin == m || kappa[i] < kappa[jmin])) jmin = i;
    }
    const double up = kappa[jmax] / dn - 1.0;
    const double down = 1.0 - kappa[jmin] / dn;
    res.iterations = it;
    res.residual = up;
    if (up <= eps) {
      rebuild();
      res.shape = x;
      return res;
    }
    const std::size_t j = up >= down ? jmax : jmin;
    double alpha = (kappa[j] - dn) / (dn * (kappa[j] - 1.0));
    if (j == jmin && up < down) alpha = std::max(alpha, -u[j] / (1.0 - u[j]));
    for (double& ui : u) ui *= 1.0 - alpha;
    u[j] += alpha;
    if (u[j] < 1e-300) u[j] = 0.0;
    // X ← (1−α)X + α p pᵀ
    const SmallVec xp = xi * pts[j];
    const double denom = (1.0 - alpha) + alpha * kappa[j];
    const double inv = 1.0 / (1.0 - alpha);
    for (std::size_t i = 0; i < m; ++i) {
      const double g = pts[i].dot(xp);
      kappa[i] = inv * (kappa[i] - alpha * g * g / denom);
    }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        x(r, c) = (1.0 - alpha) * x(r, c) + alpha * pts[j][r] * pts[j][c];
        xi(r, c) = inv * (xi(r, c) - alpha * xp[r] * xp[c] / denom);
      }
  }
  // not converged: the caller sees the residual
  rebuild();
  res.shape = x;
  return res;
}

/// Reducing operator from the minimum-volume ellipsoid around sampled
/// boundary points p_k = u_k / ‖A u_k‖_{Ψ,Q}. The ellipsoid is then shrunk
/// until it sits inside the sampled norm ball, so ‖Ae‖ ≤ |Re| ≤ √n‖Ae‖.
inline ReducingOp reducing_mvee(std::span<const SmallMat> a, std::span<const double> weights, const YoungFn& psi,
                                const ReducingOptions& opt = {}) {
  if (a.empty() || a.size() != weights.size()) throw std::invalid_argument("reducing operator needs a nonempty slice");
  const int n = a[0].size();
  ReducingOp r;
  r.psi = psi.label();
  r.epsilon = opt.epsilon;
  if (n == 1) {
    const double v = directional_norm(a, weights, psi, SmallVec::basis(1, 0));
    if (!(v > 0.0)) throw std::domain_error("degenerate slice: zero Luxemburg norm");
    r.matrix = SmallMat(1);
    r.matrix(0, 0) = v;
    r.provenance = ReducingProvenance::scalar;
    r.directions = 2;
    return r;
  }
  const int count = opt.directions > 0 ? opt.directions : default_directions(n);
  const auto dirs = half_directions(n, count, opt.seed);
  std::vector<SmallVec> pts;
  std::vector<double> norms;
  pts.reserve(dirs.size());
  for (const SmallVec& u : dirs) {
    const double v = directional_norm(a, weights, psi, u);
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("degenerate slice: zero Luxemburg norm in a direction");
    norms.push_back(v);
    pts.push_back((1.0 / v) * u);
  }
  const MveeResult mv = mvee_symmetric(pts, opt.epsilon, opt.max_iterations);
  // {x : |Mx| ≤ 1} with M = (n X)^{-1/2} is the enclosing ellipsoid
  const SmallMat m = sym_pow(symmetrized(static_cast<double>(n) * mv.shape), -0.5);
  double scale = 0.0;
  for (std::size_t k = 0; k < dirs.size(); ++k) scale = std::max(scale, norms[k] / (m * dirs[k]).norm());
  r.matrix = symmetrized(scale * m);
  r.provenance = ReducingProvenance::mvee;
  r.directions = 2 * static_cast<int>(dirs.size());
  r.iterations = mv.iterations;
  r.residual = mv.residual;
  r.scale = scale;
  return r;
}

/// Exact formula when Ψ(t) = t², the ellipsoid construction otherwise.
inline ReducingOp reducing_op(std::span<const SmallMat> a, std::span<const double> weights, const YoungFn& psi,
                              const ReducingOptions& opt = {}) {
  if (opt.allow_exact && psi.is_unit_power(2.0)) {
    ReducingOp r = reducing_exact_p2(a, weights);
    if (a[0].size() == 1) r.provenance = ReducingProvenance::scalar;
    return r;
  }
  return reducing_mvee(a, weights, psi, opt);
}

/// Slice of a matrix field over a cube's cells.
inline std::vector<SmallMat> slice(const std::vector<SmallMat>& field, const CubeCells& cc) {
  std::vector<SmallMat> out;
  out.reserve(cc.cells.size());
  for (std::size_t c : cc.cells) out.push_back(field[c]);
  return out;
}

inline double reducing_opnorm_pair(const ReducingOp& r1, const ReducingOp& r2) {
  if (r1.n() != r2.n()) throw std::invalid_argument("reducing operators of different dimension");
  return op_norm(r1.matrix * r2.matrix);
}

}  // namespace matbump
