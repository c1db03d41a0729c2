#pragma once

// Matrix weights sampled at cell midpoints, vector-valued grid functions,
// synthetic generators and the MWF1/MWS1 binary formats.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/random.hpp"

namespace matbump {

/// n×n symmetric positive-definite matrix per finest cell.
struct WeightField {
  Grid grid;
  int n = 1;
  std::vector<SmallMat> cells;

  WeightField() = default;
  WeightField(const Grid& g, int n_) : grid(g), n(n_), cells(g.cells(), SmallMat::identity(n_)) {
    SmallVec::check_dim(n_);
  }

  const SmallMat& operator[](std::size_t i) const { return cells[i]; }
  SmallMat& operator[](std::size_t i) { return cells[i]; }
  std::size_t size() const { return cells.size(); }

  /// Throws naming the first cell that is not symmetric positive definite.
  void validate() const {
    grid.validate();
    if (cells.size() != grid.cells()) throw std::invalid_argument("cell count does not match 2^{dL}");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const SmallMat& m = cells[i];
      if (m.size() != n) throw std::invalid_argument("cell " + std::to_string(i) + " has wrong matrix size");
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (!std::isfinite(m(r, c))) throw std::invalid_argument("cell " + std::to_string(i) + " is not finite");
      if (m.max_abs_asymmetry() > 1e-12) throw std::invalid_argument("cell " + std::to_string(i) + " is not symmetric");
      const double lo = n == 1 ? m(0, 0) : sym_eigen(m).values[0];
      if (!(lo > 0.0)) throw std::invalid_argument("cell " + std::to_string(i) + " is not positive definite");
    }
  }
};

inline WeightField identity_field(const Grid& g, int n) { return WeightField(g, n); }

inline WeightField scalar_field(const Grid& g, std::span<const double> values) {
  if (values.size() != g.cells()) throw std::invalid_argument("scalar field size mismatch");
  WeightField w(g, 1);
  for (std::size_t i = 0; i < values.size(); ++i) w.cells[i](0, 0) = values[i];
  return w;
}

inline std::vector<double> scalar_values(const WeightField& w) {
  if (w.n != 1) throw std::invalid_argument("scalar_values needs n = 1");
  std::vector<double> v(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) v[i] = w.cells[i](0, 0);
  return v;
}

/// W^r cellwise by diagonalization.
inline WeightField matrix_power(const WeightField& w, double r) {
  WeightField out = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    try {
      out.cells[i] = sym_pow(w.cells[i], r);
    } catch (const std::domain_error&) {
      throw std::domain_error("non-finite eigenvalue in cell " + std::to_string(i));
    }
  }
  return out;
}

/// Conjugation C·W·Cᵀ by a constant matrix.
inline WeightField conjugated(const WeightField& w, const SmallMat& c) {
  WeightField out = w;
  const SmallMat ct = c.transposed();
  for (auto& m : out.cells) m = symmetrized(c * m * ct);
  return out;
}

/// Vector-valued grid function, n components per cell.
struct VecField {
  Grid grid;
  int n = 1;
  std::vector<double> data;

  VecField() = default;
  VecField(const Grid& g, int n_) : grid(g), n(n_), data(g.cells() * static_cast<std::size_t>(n_), 0.0) {}

  std::size_t cells() const { return grid.cells(); }
  SmallVec at(std::size_t c) const {
    SmallVec v(n);
    for (int i = 0; i < n; ++i) v[i] = data[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    return v;
  }
  void set(std::size_t c, const SmallVec& v) {
    for (int i = 0; i < n; ++i) data[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = v[i];
  }
};

// ---------------------------------------------------------------------------
// Generators

/// R·diag(|x − c|^{γ_1}, …, |x − c|^{γ_n})·Rᵀ at cell midpoints; R = rotation(n, angle).
/// A midpoint equal to the center is moved by half a cell along every axis.
inline WeightField gen_power_weight(const Grid& g, int n, const std::vector<double>& gamma,
                                    const std::array<double, kMaxSpaceDim>& center, double angle = 0.0) {
  SmallVec::check_dim(n);
  if (gamma.size() != 1 && gamma.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("gamma must have 1 or n entries");
  for (int i = 0; i < g.d; ++i) {
    if (center[i] < 0.0 || center[i] > g.side) throw std::invalid_argument("center outside the box");
  }
  const SmallMat rot = rotation(n, angle);
  WeightField w(g, n);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    auto x = g.midpoint(c);
    double dist2 = 0.0;
    for (int i = 0; i < g.d; ++i) dist2 += (x[i] - center[i]) * (x[i] - center[i]);
    if (dist2 == 0.0) {
      for (int i = 0; i < g.d; ++i) x[i] += 0.5 * g.cell_side();
      dist2 = 0.0;
      for (int i = 0; i < g.d; ++i) dist2 += (x[i] - center[i]) * (x[i] - center[i]);
    }
    const double dist = std::sqrt(dist2);
    SmallVec diag(n);
    for (int j = 0; j < n; ++j) diag[j] = std::pow(dist, gamma.size() == 1 ? gamma[0] : gamma[static_cast<std::size_t>(j)]);
    w.cells[c] = symmetrized(rot * SmallMat::diagonal(diag) * rot.transposed());
  }
  return w;
}

/// Affine-invariant log-spectral distance max |log λ(A^{-1/2} B A^{-1/2})|.
inline double log_spectral_distance(const SmallMat& a, const SmallMat& b) {
  const SmallMat ai = sym_pow(a, -0.5);
  const SymEigen e = sym_eigen(symmetrized(ai * b * ai));
  double m = 0.0;
  for (int i = 0; i < e.values.size(); ++i) m = std::max(m, std::abs(std::log(e.values[i])));
  return m;
}

/// Largest log-spectral distance between face-adjacent cells.
inline double max_adjacent_distance(const WeightField& w) {
  double m = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    const Index3 x = w.grid.coords(c);
    for (int i = 0; i < w.grid.d; ++i) {
      if (x[i] + 1 >= w.grid.per_axis()) continue;
      Index3 y = x;
      ++y[i];
      m = std::max(m, log_spectral_distance(w.cells[c], w.cells[w.grid.index(y)]));
    }
  }
  return m;
}

/// Smooth random field exp(s·H(x)) with H a random trigonometric sum of
/// symmetric matrices; s is chosen so eigenvalues stay in [1/κ, κ] and
/// adjacent cells are within log-spectral distance λ.
inline WeightField gen_random_field(const Grid& g, int n, std::uint64_t seed, double kappa, double lambda) {
  SmallVec::check_dim(n);
  if (!(kappa >= 1.0)) throw std::invalid_argument("condition bound must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("log-Lipschitz bound must be positive");
  WeightField w(g, n);
  if (kappa == 1.0) return w;
  Rng rng(seed);
  constexpr int kModes = 4;
  struct Mode {
    SmallMat coef;
    std::array<double, kMaxSpaceDim> freq{};
    double phase = 0.0;
  };
  std::vector<Mode> modes;
  for (int j = 0; j < kModes; ++j) {
    Mode md{SmallMat(n), {}, rng.uniform(0.0, 2.0 * std::numbers::pi)};
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) {
        const double v = rng.normal();
        md.coef(r, c) = v;
        md.coef(c, r) = v;
      }
    for (int i = 0; i < g.d; ++i) md.freq[i] = 2.0 * std::numbers::pi * static_cast<double>(rng.below(3));
    modes.push_back(md);
  }
  std::vector<SymEigen> logs;
  logs.reserve(g.cells());
  double spread = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const auto x = g.midpoint(c);
    SmallMat h(n);
    for (const Mode& md : modes) {
      double arg = md.phase;
      for (int i = 0; i < g.d; ++i) arg += md.freq[i] * x[i] / g.side;
      h += std::cos(arg) * md.coef;
    }
    logs.push_back(sym_eigen(h));
    const SymEigen& e = logs.back();
    spread = std::max({spread, std::abs(e.values[0]), std::abs(e.values[n - 1])});
  }
  double s = spread > 0.0 ? std::log(kappa) / spread : 0.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (std::size_t c = 0; c < g.cells(); ++c) {
      w.cells[c] = symmetrized(sym_apply(logs[c], [s](double v) { return std::exp(s * v); }));
    }
    const double dist = max_adjacent_distance(w);
    if (dist <= lambda) break;
    s *= 0.95 * lambda / dist;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Binary formats

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_f64(std::ostream& os, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}
inline double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}
inline void expect_magic(std::istream& is, const char* magic) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0) throw std::runtime_error(std::string("not an ") + magic + " file");
}

}  // namespace detail

/// MWF1: magic, u32 d, u32 L, u32 n, f64 side, then lower triangles cell-major.
inline void write_mwf1(std::ostream& os, const WeightField& w) {
  os.write("MWF1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(w.grid.d));
  detail::put_u32(os, static_cast<std::uint32_t>(w.grid.L));
  detail::put_u32(os, static_cast<std::uint32_t>(w.n));
  detail::put_f64(os, w.grid.side);
  for (const SmallMat& m : w.cells)
    for (int r = 0; r < w.n; ++r)
      for (int c = 0; c <= r; ++c) detail::put_f64(os, m(r, c));
}

inline WeightField read_mwf1(std::istream& is) {
  detail::expect_magic(is, "MWF1");
  const int d = static_cast<int>(detail::get_u32(is));
  const int L = static_cast<int>(detail::get_u32(is));
  const int n = static_cast<int>(detail::get_u32(is));
  const double side = detail::get_f64(is);
  WeightField w(Grid(d, L, side), n);
  for (SmallMat& m : w.cells)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c <= r; ++c) {
        const double v = detail::get_f64(is);
        m(r, c) = v;
        m(c, r) = v;
      }
  w.validate();
  return w;
}

inline void save_mwf1(const std::string& path, const WeightField& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_mwf1(os, w);
  if (!os) throw std::runtime_error("write failed for " + path);
}

inline WeightField load_mwf1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_mwf1(is);
}

/// MWS1: magic, u32 d, u32 L, u32 components, f64 side, values cell-major.
inline void write_mws1(std::ostream& os, const Grid& g, int components, std::span<const double> values) {
  if (values.size() != g.cells() * static_cast<std::size_t>(components)) throw std::invalid_argument("MWS1 size mismatch");
  os.write("MWS1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(g.d));
  detail::put_u32(os, static_cast<std::uint32_t>(g.L));
  detail::put_u32(os, static_cast<std::uint32_t>(components));
  detail::put_f64(os, g.side);
  for (double v : values) detail::put_f64(os, v);
}

struct ScalarOutput {
  Grid grid;
  int components = 1;
  std::vector<double> values;
};

inline ScalarOutput read_mws1(std::istream& is) {
  detail::expect_magic(is, "MWS1");
  ScalarOutput out;
  const int d = static_cast<int>(detail::get_u32(is));
  const int L = static_cast<int>(detail::get_u32(is));
  out.components = static_cast<int>(detail::get_u32(is));
  out.grid = Grid(d, L, detail::get_f64(is));
  out.values.resize(out.grid.cells() * static_cast<std::size_t>(out.components));
  for (double& v : out.values) v = detail::get_f64(is);
  return out;
}

}  // namespace matbump
