#pragma once

// Dyadic and shifted dyadic grids over the working box [0, side)^d,
// stopping-time families and sparse families.
//
// Shifted grids follow 2^{-k}([0,1)^d + m + (-1)^k t) with t ∈ {0, ±1/3}^d.
// The alternating sign keeps each shifted system nested across levels.
// All cube arithmetic is exact in units of 2^{-k}/3.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/random.hpp"
#include "matbump/young.hpp"

namespace matbump {

inline constexpr int kMaxSpaceDim = 3;
using Index3 = std::array<long long, kMaxSpaceDim>;

/// Finest-level cells of the box. Cells are row-major, last axis fastest.
struct Grid {
  int d = 1;
  int L = 0;
  double side = 1.0;

  Grid() = default;
  Grid(int d_, int L_, double side_ = 1.0) : d(d_), L(L_), side(side_) { validate(); }

  void validate() const {
    if (d < 1 || d > kMaxSpaceDim) throw std::invalid_argument("space dimension must be in [1, 3]");
    if (L < 0 || d * L > 26) throw std::invalid_argument("finest level out of range");
    if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("box side must be positive");
  }

  long long per_axis() const { return 1LL << L; }
  std::size_t cells() const { return std::size_t{1} << (d * L); }
  double cell_side() const { return std::ldexp(side, -L); }
  double cell_volume() const { return std::pow(cell_side(), d); }
  double volume() const { return std::pow(side, d); }

  Index3 coords(std::size_t idx) const {
    Index3 c{};
    for (int i = d - 1; i >= 0; --i) {
      c[i] = static_cast<long long>(idx & static_cast<std::size_t>(per_axis() - 1));
      idx >>= L;
    }
    return c;
  }
  std::size_t index(const Index3& c) const {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) idx = (idx << L) | static_cast<std::size_t>(c[i]);
    return idx;
  }
  std::array<double, kMaxSpaceDim> midpoint(std::size_t idx) const {
    const Index3 c = coords(idx);
    std::array<double, kMaxSpaceDim> x{};
    for (int i = 0; i < d; ++i) x[i] = (static_cast<double>(c[i]) + 0.5) * cell_side();
    return x;
  }

  bool operator==(const Grid& o) const { return d == o.d && L == o.L && side == o.side; }
};

/// A cube 2^{-k}([0,1)^d + m + (-1)^k t) of the grid with shift t = shift/3.
struct Cube {
  int d = 1;
  std::array<int, kMaxSpaceDim> shift{};  // numerators over 3, each in {-1, 0, 1}
  int k = 0;
  Index3 m{};

  int sign() const { return (k & 1) ? -1 : 1; }
  /// Left end of axis i in units of 2^{-k}/3 (box side = 1).
  long long start3(int i) const { return 3 * m[i] + sign() * shift[i]; }
  bool base() const {
    for (int i = 0; i < d; ++i)
      if (shift[i] != 0) return false;
    return true;
  }
  bool same_grid(const Cube& o) const { return d == o.d && shift == o.shift; }

  double side_length(double box_side = 1.0) const { return std::ldexp(box_side, -k); }
  double volume(double box_side = 1.0) const { return std::pow(side_length(box_side), d); }
  double lo(int i, double box_side = 1.0) const {
    return box_side * std::ldexp(static_cast<double>(start3(i)) / 3.0, -k);
  }

  /// Exact containment test for two cubes of the same shifted grid.
  bool contains(const Cube& o) const {
    if (!same_grid(o) || o.k < k) return false;
    const int dk = o.k - k;
    if (dk > 60) return false;
    for (int i = 0; i < d; ++i) {
      const long long a = start3(i) << dk;
      const long long len = 3LL << dk;
      if (o.start3(i) < a || o.start3(i) + 3 > a + len) return false;
    }
    return true;
  }

  Cube parent() const {
    Cube p = *this;
    p.k = k - 1;
    for (int i = 0; i < d; ++i) {
      // child start = 2·(parent start) + 3·bit
      const long long s = start3(i);
      const long long ps = (s % 2 == 0) ? s / 2 : (s - 3) / 2;
      p.m[i] = floor_div(ps - p.sign() * shift[i], 3);
    }
    return p;
  }

  std::vector<Cube> children() const {
    std::vector<Cube> out;
    const std::size_t count = std::size_t{1} << d;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
      Cube ch = *this;
      ch.k = k + 1;
      for (int i = 0; i < d; ++i) {
        const long long bit = static_cast<long long>((c >> (d - 1 - i)) & 1U);
        // child start3 (units of 2^{-k-1}/3) = 2*start3 + 3*bit
        const long long s = 2 * start3(i) + 3 * bit;
        ch.m[i] = (s - ch.sign() * shift[i]) / 3;
      }
      out.push_back(ch);
    }
    return out;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "t=(";
    for (int i = 0; i < d; ++i) {
      if (i) os << ",";
      if (shift[i] == 0)
        os << "0";
      else
        os << (shift[i] < 0 ? "-" : "") << "1/3";
    }
    os << ") k=" << k << " m=(";
    for (int i = 0; i < d; ++i) {
      if (i) os << ",";
      os << m[i];
    }
    os << ")";
    return os.str();
  }

  bool operator==(const Cube& o) const { return d == o.d && shift == o.shift && k == o.k && m == o.m; }
  /// Shallowest first, then shift, then index.
  bool operator<(const Cube& o) const {
    if (k != o.k) return k < o.k;
    if (shift != o.shift) return shift < o.shift;
    return m < o.m;
  }

  static long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
};

inline Cube root_cube(int d) {
  Cube c;
  c.d = d;
  return c;
}

/// All 3^d shift vectors in lexicographic numeric order.
inline std::vector<std::array<int, kMaxSpaceDim>> shifted_grids(int d) {
  if (d < 1 || d > kMaxSpaceDim) throw std::invalid_argument("space dimension must be in [1, 3]");
  std::vector<std::array<int, kMaxSpaceDim>> out;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (std::size_t c = 0; c < total; ++c) {
    std::array<int, kMaxSpaceDim> s{};
    std::size_t r = c;
    for (int i = d - 1; i >= 0; --i) {
      s[i] = static_cast<int>(r % 3) - 1;
      r /= 3;
    }
    out.push_back(s);
  }
  return out;
}

/// Cubes of one shifted grid at level k lying entirely inside the box.
inline std::vector<Cube> grid_cubes(const Grid& g, const std::array<int, kMaxSpaceDim>& shift, int k) {
  if (k < 0 || k > g.L) throw std::invalid_argument("level outside [0, L]");
  std::array<long long, kMaxSpaceDim> lo{}, hi{};
  const int sgn = (k & 1) ? -1 : 1;
  for (int i = 0; i < g.d; ++i) {
    const int sigma = sgn * shift[i];
    lo[i] = sigma < 0 ? 1 : 0;
    hi[i] = sigma > 0 ? (1LL << k) - 2 : (1LL << k) - 1;
    if (hi[i] < lo[i]) return {};
  }
  std::vector<Cube> out;
  Cube c;
  c.d = g.d;
  c.shift = shift;
  c.k = k;
  c.m = lo;
  while (true) {
    out.push_back(c);
    int i = g.d - 1;
    while (i >= 0 && c.m[i] == hi[i]) {
      c.m[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++c.m[i];
  }
  return out;
}

/// Cells meeting a cube: exact overlap fractions (normalized to sum 1) and the
/// cells whose midpoints lie in the cube.
struct CubeCells {
  std::vector<std::size_t> cells;
  std::vector<double> weights;
  std::vector<std::size_t> members;
  double volume = 0.0;
  bool aligned = true;  // every cell either fully inside or outside
};

inline bool cube_in_box(const Grid& g, const Cube& q) {
  if (q.k < 0 || q.k > g.L) return false;
  for (int i = 0; i < g.d; ++i) {
    if (q.start3(i) < 0 || q.start3(i) + 3 > 3 * (1LL << q.k)) return false;
  }
  return true;
}

inline CubeCells cube_cells(const Grid& g, const Cube& q) {
  if (q.d != g.d) throw std::invalid_argument("cube dimension does not match grid");
  if (!cube_in_box(g, q)) throw std::invalid_argument("cube " + q.to_string() + " is not inside the box");
  CubeCells out;
  out.volume = q.volume(g.side);
  const int shiftL = g.L - q.k;
  // per axis: cells and overlaps in units of 2^{-L}/3
  std::array<std::vector<std::pair<long long, long long>>, kMaxSpaceDim> axis;
  std::array<std::vector<bool>, kMaxSpaceDim> axis_member;
  for (int i = 0; i < g.d; ++i) {
    const long long a = q.start3(i) << shiftL;
    const long long len = 3LL << shiftL;
    const long long c0 = a / 3;
    const long long c1 = (a + len + 2) / 3;  // exclusive
    for (long long c = c0; c < c1; ++c) {
      const long long ov = std::min(a + len, 3 * c + 3) - std::max(a, 3 * c);
      if (ov <= 0) continue;
      if (ov != 3) out.aligned = false;
      axis[i].emplace_back(c, ov);
      axis_member[i].push_back(2 * a <= 6 * c + 3 && 6 * c + 3 < 2 * (a + len));
    }
  }
  const double denom = std::pow(3.0 * std::ldexp(1.0, shiftL), g.d);
  std::array<std::size_t, kMaxSpaceDim> pos{};
  while (true) {
    Index3 c{};
    double w = 1.0;
    bool member = true;
    for (int i = 0; i < g.d; ++i) {
      c[i] = axis[i][pos[i]].first;
      w *= static_cast<double>(axis[i][pos[i]].second);
      member = member && axis_member[i][pos[i]];
    }
    const std::size_t idx = g.index(c);
    out.cells.push_back(idx);
    out.weights.push_back(w / denom);
    if (member) out.members.push_back(idx);
    int i = g.d - 1;
    while (i >= 0 && pos[i] + 1 == axis[i].size()) {
      pos[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++pos[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cube censuses

enum class Census { dyadic, shifted, brute };

inline const char* to_string(Census c) {
  switch (c) {
    case Census::dyadic:
      return "dyadic";
    case Census::shifted:
      return "shifted";
    case Census::brute:
      return "brute";
  }
  return "?";
}

inline Census census_from_string(const std::string& s) {
  if (s == "dyadic") return Census::dyadic;
  if (s == "shifted") return Census::shifted;
  if (s == "brute") return Census::brute;
  throw std::invalid_argument("unknown census '" + s + "'");
}

/// A scanned cube with its cells. Brute-force cubes have no dyadic id.
struct CensusCube {
  std::optional<Cube> cube;
  Index3 corner{};       // brute cubes: lower corner in cells
  long long side_cells = 0;
  CubeCells cells;

  std::string label() const {
    if (cube) return cube->to_string();
    std::ostringstream os;
    os << "corner=(";
    for (std::size_t i = 0; i < corner.size(); ++i) {
      if (i) os << ",";
      os << corner[i];
    }
    os << ") side=" << side_cells;
    return os.str();
  }
};

inline CubeCells aligned_cells(const Grid& g, const Index3& corner, long long side_cells) {
  CubeCells out;
  const std::size_t count = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(side_cells), g.d)));
  out.cells.reserve(count);
  Index3 c = corner;
  while (true) {
    out.cells.push_back(g.index(c));
    int i = g.d - 1;
    while (i >= 0 && c[i] + 1 == corner[i] + side_cells) {
      c[i] = corner[i];
      --i;
    }
    if (i < 0) break;
    ++c[i];
  }
  out.weights.assign(out.cells.size(), 1.0 / static_cast<double>(out.cells.size()));
  out.members = out.cells;
  out.volume = std::pow(static_cast<double>(side_cells) * g.cell_side(), g.d);
  return out;
}

/// Base-grid cubes of levels 0..L, with shifted grids or all cell-aligned
/// cubes when requested. Ordered shallowest first.
inline std::vector<CensusCube> census_cubes(const Grid& g, Census census) {
  std::vector<CensusCube> out;
  if (census == Census::brute) {
    const long long n = g.per_axis();
    for (long long s = n; s >= 1; --s) {
      Index3 corner{};
      while (true) {
        CensusCube cc;
        cc.corner = corner;
        cc.side_cells = s;
        cc.cells = aligned_cells(g, corner, s);
        // dyadic ids for cubes that happen to be base-grid cubes
        if ((s & (s - 1)) == 0) {
          bool dyadic = true;
          for (int i = 0; i < g.d; ++i) dyadic = dyadic && corner[i] % s == 0;
          if (dyadic) {
            Cube q = root_cube(g.d);
            q.k = g.L - static_cast<int>(std::llround(std::log2(static_cast<double>(s))));
            for (int i = 0; i < g.d; ++i) q.m[i] = corner[i] / s;
            cc.cube = q;
          }
        }
        out.push_back(std::move(cc));
        int i = g.d - 1;
        while (i >= 0 && corner[i] + s == n) {
          corner[i] = 0;
          --i;
        }
        if (i < 0) break;
        ++corner[i];
      }
    }
    return out;
  }
  const auto shifts = census == Census::shifted ? shifted_grids(g.d)
                                                : std::vector<std::array<int, kMaxSpaceDim>>{std::array<int, kMaxSpaceDim>{}};
  for (int k = 0; k <= g.L; ++k) {
    for (const auto& s : shifts) {
      for (const Cube& q : grid_cubes(g, s, k)) {
        CensusCube cc;
        cc.cube = q;
        cc.cells = cube_cells(g, q);
        out.push_back(std::move(cc));
      }
    }
  }
  return out;
}

/// Base-grid cube containing a finest cell at level k.
inline Cube base_ancestor(const Grid& g, std::size_t cell, int k) {
  Cube q = root_cube(g.d);
  q.k = k;
  const Index3 c = g.coords(cell);
  for (int i = 0; i < g.d; ++i) q.m[i] = c[i] >> (g.L - k);
  return q;
}

// ---------------------------------------------------------------------------
// Containing shifted cube

/// Axis-parallel cube [lo, lo + side)^d in box coordinates.
struct RealCube {
  int d = 1;
  std::array<double, kMaxSpaceDim> lo{};
  double side = 1.0;
};

/// A shifted dyadic cube containing Q with side in [ℓ(Q), 3ℓ(Q)].
/// Levels are tried from the smallest admissible side upward; within a level
/// the base grid comes first, then the other shifts in lexicographic order.
/// A cube of the base grid is therefore returned unchanged.
inline Cube containing_shifted_cube(const RealCube& q) {
  if (!(q.side > 0.0)) throw std::invalid_argument("degenerate cube");
  const int k_lo = static_cast<int>(std::floor(-std::log2(3.0 * q.side))) - 1;
  const int k_hi = static_cast<int>(std::ceil(-std::log2(q.side))) + 1;
  auto shifts = shifted_grids(q.d);
  std::stable_partition(shifts.begin(), shifts.end(), [](const auto& s) { return s == std::array<int, kMaxSpaceDim>{}; });
  for (int k = k_hi; k >= k_lo; --k) {
    for (const auto& s : shifts) {
      const double side = std::ldexp(1.0, -k);
      if (side > 3.0 * q.side || side < q.side) continue;
      Cube c;
      c.d = q.d;
      c.shift = s;
      c.k = k;
      bool ok = true;
      for (int i = 0; i < q.d && ok; ++i) {
        const double off = c.sign() * s[i] / 3.0;
        const double m = std::floor(std::ldexp(q.lo[i], k) - off);
        c.m[i] = static_cast<long long>(m);
        double a = c.lo(i);
        if (a > q.lo[i]) {  // rounding guard
          c.m[i] -= 1;
          a = c.lo(i);
        }
        ok = a <= q.lo[i] && q.lo[i] + q.side <= a + side;
      }
      if (ok) return c;
    }
  }
  throw std::logic_error("no shifted dyadic cube contains the given cube");
}

// ---------------------------------------------------------------------------
// Stopping families

/// Norms ‖f‖_{Φ,Q} of every base-grid cube, indexed by level then row-major m.
struct BaseNorms {
  Grid grid;
  std::vector<std::vector<double>> by_level;

  double at(const Cube& q) const {
    std::size_t idx = 0;
    for (int i = 0; i < grid.d; ++i) idx = (idx << q.k) | static_cast<std::size_t>(q.m[i]);
    return by_level[static_cast<std::size_t>(q.k)][idx];
  }
};

inline BaseNorms base_luxemburg_norms(const Grid& g, std::span<const double> f, const YoungFn& phi) {
  BaseNorms out{g, {}};
  out.by_level.resize(static_cast<std::size_t>(g.L) + 1);
  std::vector<double> vals;
  for (int k = 0; k <= g.L; ++k) {
    for (const Cube& q : grid_cubes(g, {}, k)) {
      const CubeCells cc = cube_cells(g, q);
      vals.clear();
      for (std::size_t c : cc.cells) vals.push_back(f[c]);
      out.by_level[static_cast<std::size_t>(k)].push_back(luxemburg_norm(vals, phi));
    }
  }
  return out;
}

struct StoppingFamily {
  Grid grid;
  double a = 0.0;
  int k_min = 0;
  int k_max = 0;
  std::map<int, std::vector<Cube>> levels;  // S^k

  /// Union over k, deduplicated, shallowest first.
  std::vector<Cube> all() const {
    std::vector<Cube> out;
    for (const auto& [k, cubes] : levels) out.insert(out.end(), cubes.begin(), cubes.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

inline double default_stopping_base(int d) { return std::ldexp(1.0, d + 2); }

/// S^k = maximal base-grid cubes with ‖f‖_{Φ̄,Q} > a^k, for k from the
/// largest k with a^k below the root norm up to the largest k with a^k below
/// the largest attained norm.
inline StoppingFamily stopping_family(const Grid& g, std::span<const double> f, const YoungFn& phi_bar,
                                      std::optional<double> a_opt = std::nullopt) {
  const double a = a_opt.value_or(default_stopping_base(g.d));
  if (!(a > std::ldexp(1.0, g.d + 1))) throw std::domain_error("stopping base must exceed 2^{d+1}");
  if (f.size() != g.cells()) throw std::invalid_argument("grid function size mismatch");
  bool nonzero = false;
  for (double v : f) {
    if (v < 0.0 || !std::isfinite(v)) throw std::domain_error("stopping family needs finite nonnegative f");
    nonzero = nonzero || v > 0.0;
  }
  if (!nonzero) throw std::domain_error("f vanishes identically: no cube exceeds any threshold");

  const BaseNorms norms = base_luxemburg_norms(g, f, phi_bar);
  const double root = norms.by_level[0][0];
  double top = 0.0;
  for (const auto& lvl : norms.by_level)
    for (double v : lvl) top = std::max(top, v);
  const auto largest_below = [&](double x) {
    int k = static_cast<int>(std::floor(std::log(x) / std::log(a)));
    while (std::pow(a, k) >= x) --k;
    while (std::pow(a, k + 1) < x) ++k;
    return k;
  };
  StoppingFamily out;
  out.grid = g;
  out.a = a;
  out.k_min = largest_below(root);
  out.k_max = largest_below(top);
  for (int k = out.k_min; k <= out.k_max; ++k) {
    const double thr = std::pow(a, k);
    std::vector<Cube> selected;
    std::vector<Cube> stack{root_cube(g.d)};
    while (!stack.empty()) {
      const Cube q = stack.back();
      stack.pop_back();
      if (norms.at(q) > thr) {
        selected.push_back(q);
      } else if (q.k < g.L) {
        auto ch = q.children();
        stack.insert(stack.end(), ch.rbegin(), ch.rend());
      }
    }
    std::sort(selected.begin(), selected.end());
    out.levels[k] = std::move(selected);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse families

struct SparseFamily {
  Grid grid;
  std::vector<Cube> cubes;                     // shallowest first
  std::vector<std::vector<std::size_t>> sets;  // E_Q as finest-cell indices
  std::vector<double> ratios;                  // |E_Q| / |Q|
};

struct SparseFailure {
  Cube cube;
  double ratio = 0.0;
};

struct SparseResult {
  SparseFamily family;
  std::vector<SparseFailure> failures;  // cubes with |E_Q| < ½|Q|
  bool ok() const { return failures.empty(); }
};

class PackingError : public std::runtime_error {
 public:
  PackingError(const Cube& q, double ratio)
      : std::runtime_error("Carleson packing violated at " + q.to_string() + ": sum = " + std::to_string(ratio) +
                           "|Q| > 2|Q|"),
        cube(q),
        packing(ratio) {}
  Cube cube;
  double packing;
};

/// E_Q = Q minus the union of strictly smaller cubes of S. Cubes must come
/// from one grid. Throws PackingError when Σ_{Q'⊆Q} |Q'| > 2|Q| and
/// `check_packing` is set; cubes with |E_Q| < ½|Q| are reported.
inline SparseResult sparse_sets(const Grid& g, std::vector<Cube> cubes, bool check_packing = true) {
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  for (const Cube& q : cubes) {
    if (!q.same_grid(cubes.front())) throw std::invalid_argument("sparse family mixes grids");
  }
  SparseResult res;
  res.family.grid = g;
  res.family.cubes = cubes;
  res.family.sets.resize(cubes.size());
  res.family.ratios.resize(cubes.size());
  std::vector<char> covered(g.cells(), 0);
  std::vector<double> mass(g.cells(), 0.0);  // Σ |R| / #members(R) over processed R ∋ x
  const double cell_vol = g.cell_volume();
  std::vector<std::pair<std::size_t, double>> packing;
  // deepest level first
  std::size_t end = cubes.size();
  while (end > 0) {
    std::size_t begin = end;
    while (begin > 0 && cubes[begin - 1].k == cubes[end - 1].k) --begin;
    std::vector<CubeCells> level_cells;
    for (std::size_t i = begin; i < end; ++i) {
      CubeCells cc = cube_cells(g, cubes[i]);
      double inner = 0.0;
      auto& e = res.family.sets[i];
      for (std::size_t c : cc.members) {
        inner += mass[c];
        if (!covered[c]) e.push_back(c);
      }
      const double ratio = static_cast<double>(e.size()) * cell_vol / cc.volume;
      res.family.ratios[i] = ratio;
      if (ratio < 0.5 - 1e-12) res.failures.push_back({cubes[i], ratio});
      packing.emplace_back(i, 1.0 + inner / cc.volume);
      level_cells.push_back(std::move(cc));
    }
    for (std::size_t i = begin; i < end; ++i) {
      const CubeCells& cc = level_cells[i - begin];
      const double share = cc.volume / static_cast<double>(cc.members.size());
      for (std::size_t c : cc.members) {
        covered[c] = 1;
        mass[c] += share;
      }
    }
    end = begin;
  }
  if (check_packing) {
    std::sort(packing.begin(), packing.end());
    for (const auto& [i, pk] : packing) {
      if (pk > 2.0 + 1e-9) throw PackingError(cubes[i], pk);
    }
  }
  std::sort(res.failures.begin(), res.failures.end(),
            [](const SparseFailure& x, const SparseFailure& y) { return x.cube < y.cube; });
  return res;
}

/// Random sparse family on the base grid: each chosen cube picks descendants
/// one or two levels down covering at most half of it, recursively.
inline SparseFamily random_sparse_family(const Grid& g, Rng& rng, double continue_prob = 0.7) {
  std::vector<Cube> chosen{root_cube(g.d)};
  std::vector<Cube> frontier{root_cube(g.d)};
  while (!frontier.empty()) {
    const Cube q = frontier.back();
    frontier.pop_back();
    const int depth = (q.k + 2 <= g.L && rng.coin(0.5)) ? 2 : 1;
    if (q.k + depth > g.L) continue;
    std::vector<Cube> desc{q};
    for (int j = 0; j < depth; ++j) {
      std::vector<Cube> next;
      for (const Cube& c : desc) {
        auto ch = c.children();
        next.insert(next.end(), ch.begin(), ch.end());
      }
      desc = std::move(next);
    }
    const std::size_t cap = desc.size() / 2;
    std::size_t taken = 0;
    for (std::size_t i = 0; i < desc.size() && taken < cap; ++i) {
      // visit candidates in a shuffled order
      const std::size_t j = i + static_cast<std::size_t>(rng.below(desc.size() - i));
      std::swap(desc[i], desc[j]);
      if (rng.coin(continue_prob)) {
        chosen.push_back(desc[i]);
        frontier.push_back(desc[i]);
        ++taken;
      }
    }
  }
  return sparse_sets(g, chosen).family;
}

/// Nested tower: the root and the cubes containing cell 0 down to level depth.
inline SparseFamily tower_family(const Grid& g, int depth, std::size_t cell = 0) {
  if (depth < 0 || depth > g.L) throw std::invalid_argument("tower depth out of range");
  std::vector<Cube> cubes;
  for (int k = 0; k <= depth; ++k) cubes.push_back(base_ancestor(g, cell, k));
  return sparse_sets(g, cubes, false).family;
}

}  // namespace matbump
