#pragma once

// Young functions, associates, B_{p,q} growth classes and Luxemburg norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace matbump {

enum class YoungFamily { power, power_log, tabulated };

/// Asymptotic growth Φ(t) ≍ t^r · log(t)^delta as t → ∞.
struct Growth {
  double r = 1.0;
  double delta = 0.0;
};

class YoungFn {
 public:
  /// c·t^r. r >= 1.
  static YoungFn power(double r, double coef = 1.0) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::domain_error("power Young function needs r >= 1");
    if (!(coef > 0.0) || !std::isfinite(coef)) throw std::domain_error("power Young function needs coef > 0");
    YoungFn f;
    f.family_ = YoungFamily::power;
    f.r_ = r;
    f.coef_ = coef;
    f.growth_ = Growth{r, 0.0};
    return f;
  }

  /// t^r · log(e + t)^delta.
  static YoungFn power_log(double r, double delta) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::domain_error("power_log Young function needs r >= 1");
    if (!std::isfinite(delta)) throw std::domain_error("power_log delta must be finite");
    if (r == 1.0 && delta <= 0.0) throw std::domain_error("power_log(1, delta) is superlinear only for delta > 0");
    YoungFn f;
    f.family_ = YoungFamily::power_log;
    f.r_ = r;
    f.delta_ = delta;
    f.growth_ = Growth{r, delta};
    return f;
  }

  /// Monotone sample table, interpolated linearly in log-log coordinates.
  /// A leading (0, 0) point is allowed.
  static YoungFn tabulated(std::vector<std::pair<double, double>> points) {
    return tabulated_impl(std::move(points), {}, std::nullopt, 0.0);
  }

  YoungFamily family() const { return family_; }
  double r() const { return r_; }
  double delta() const { return delta_; }
  double coef() const { return coef_; }
  const std::optional<Growth>& growth() const { return growth_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }
  const std::vector<double>& slopes() const { return slopes_; }
  /// Φ vanishes on [0, zero_until()].
  double zero_until() const { return zero_until_; }

  bool is_unit_power(double r) const { return family_ == YoungFamily::power && r_ == r && coef_ == 1.0; }

  double operator()(double t) const {
    if (t < 0.0 || std::isnan(t)) throw std::domain_error("Young function evaluated at negative argument");
    if (t == 0.0) return 0.0;
    switch (family_) {
      case YoungFamily::power:
        return coef_ * (r_ == 2.0 ? t * t : std::pow(t, r_));
      case YoungFamily::power_log: {
        const double base = r_ == 2.0 ? t * t : (r_ == 1.0 ? t : std::pow(t, r_));
        const double lg = std::log(std::numbers::e + t);
        return base * (delta_ == 1.0 ? lg : std::pow(lg, delta_));
      }
      case YoungFamily::tabulated:
        return eval_table(t);
    }
    return 0.0;
  }

  /// log Φ(t), accurate where Φ(t) itself overflows.
  double log_value(double t) const {
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    switch (family_) {
      case YoungFamily::power:
        return std::log(coef_) + r_ * std::log(t);
      case YoungFamily::power_log:
        return r_ * std::log(t) + delta_ * std::log(std::log(std::numbers::e + t));
      case YoungFamily::tabulated:
        if (t >= points_.back().first) {
          const std::size_t m = points_.size();
          const double s = slopes_.empty() ? end_slope(m - 2, m - 1) : slopes_.back();
          return log_v_.back() + s * (std::log(t) - log_t_.back());
        }
        return std::log(eval_table(t));
    }
    return 0.0;
  }

  /// log Φ(e^u), usable for u beyond the double range of e^u.
  double log_value_at_log(double u) const {
    switch (family_) {
      case YoungFamily::power:
        return std::log(coef_) + r_ * u;
      case YoungFamily::power_log: {
        // log(e + e^u) = u + log1p(e^{1-u})
        const double lg = u > 1.0 ? u + std::log1p(std::exp(1.0 - u)) : std::log(std::numbers::e + std::exp(u));
        return r_ * u + delta_ * std::log(lg);
      }
      case YoungFamily::tabulated:
        if (u >= log_t_.back()) {
          const std::size_t m = points_.size();
          const double s = slopes_.empty() ? end_slope(m - 2, m - 1) : slopes_.back();
          return log_v_.back() + s * (u - log_t_.back());
        }
        return std::log(eval_table(std::exp(u)));
    }
    return 0.0;
  }

  /// Smallest t with Φ(t) >= y (Φ is continuous and increasing past zero_until).
  double inverse(double y) const {
    if (y < 0.0) throw std::domain_error("inverse of negative value");
    if (y == 0.0) return zero_until_;
    if (family_ == YoungFamily::power) return std::pow(y / coef_, 1.0 / r_);
    double lo = std::max(zero_until_, 1e-300);
    double hi = std::max(1.0, 2.0 * lo);
    while ((*this)(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    if ((*this)(lo) >= y) {
      // shrink downward
      while (lo > 1e-300 && (*this)(lo) >= y) {
        hi = lo;
        lo *= 0.5;
      }
    }
    if (lo >= hi) return hi;
    const auto gap = [&](double t) { return (*this)(t) >= y ? 1.0 : -1.0; };
    const auto close = [](double a, double b) { return b - a <= 1e-15 * b; };
    return boost::math::tools::bisect(gap, lo, hi, close).second;
  }

  std::string label() const {
    std::ostringstream os;
    os.precision(6);
    switch (family_) {
      case YoungFamily::power:
        os << "power(" << r_;
        if (coef_ != 1.0) os << ";c=" << coef_;
        os << ")";
        break;
      case YoungFamily::power_log:
        os << "power_log(" << r_ << ";" << delta_ << ")";
        break;
      case YoungFamily::tabulated:
        os << "tabulated(" << points_.size() << ")";
        break;
    }
    return os.str();
  }

  // Used by associate(); also lets callers attach slopes to a table.
  static YoungFn tabulated_impl(std::vector<std::pair<double, double>> points, std::vector<double> slopes,
                                std::optional<Growth> growth, double zero_until) {
    if (points.size() < 2) throw std::domain_error("tabulated Young function needs at least two points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [t, v] = points[i];
      if (!(t >= 0.0) || !(v >= 0.0) || !std::isfinite(t) || !std::isfinite(v)) {
        throw std::domain_error("tabulated points must be finite and nonnegative");
      }
      if (i > 0 && !(t > points[i - 1].first && v > points[i - 1].second)) {
        throw std::domain_error("tabulated table must be strictly increasing");
      }
    }
    if (points.front().first == 0.0 && points.front().second != 0.0) {
      throw std::domain_error("tabulated Young function must vanish at 0");
    }
    if (!slopes.empty() && slopes.size() != points.size()) throw std::domain_error("slope table size mismatch");
    YoungFn f;
    f.family_ = YoungFamily::tabulated;
    f.points_ = std::move(points);
    f.slopes_ = std::move(slopes);
    f.growth_ = growth;
    f.zero_until_ = zero_until;
    f.log_t_.reserve(f.points_.size());
    f.log_v_.reserve(f.points_.size());
    for (const auto& [t, v] : f.points_) {
      f.log_t_.push_back(t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity());
      f.log_v_.push_back(v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity());
    }
    return f;
  }

 private:
  double end_slope(std::size_t i, std::size_t j) const {
    // log-log slope of segment (i, j), both endpoints positive
    return (log_v_[j] - log_v_[i]) / (log_t_[j] - log_t_[i]);
  }

  double eval_table(double t) const {
    if (t <= zero_until_) return 0.0;
    const auto& pts = points_;
    const std::size_t m = pts.size();
    if (t >= pts.back().first) {
      const double s = slopes_.empty() ? end_slope(m - 2, m - 1) : slopes_.back();
      const double v = std::exp(log_v_.back() + s * (std::log(t) - log_t_.back()));
      return v;
    }
    if (t < pts.front().first) {
      if (zero_until_ > 0.0 && pts.front().second > 0.0) {
        // linear ramp from the zero set to the first node
        return pts.front().second * (t - zero_until_) / (pts.front().first - zero_until_);
      }
      const double s = slopes_.empty() ? end_slope(0, 1) : slopes_.front();
      return std::exp(log_v_.front() + s * (std::log(t) - log_t_.front()));
    }
    const auto it = std::upper_bound(pts.begin(), pts.end(), t,
                                     [](double x, const std::pair<double, double>& p) { return x < p.first; });
    const std::size_t j = static_cast<std::size_t>(it - pts.begin());
    const std::size_t i = j - 1;
    if (pts[i].second == 0.0 || pts[i].first == 0.0) {
      const double w = (t - pts[i].first) / (pts[j].first - pts[i].first);
      return pts[i].second + w * (pts[j].second - pts[i].second);
    }
    const double x = std::log(t);
    const double h = log_t_[j] - log_t_[i];
    const double w = (x - log_t_[i]) / h;
    if (slopes_.empty()) return std::exp(log_v_[i] + w * (log_v_[j] - log_v_[i]));
    // cubic Hermite in log-log coordinates
    const double w2 = w * w, w3 = w2 * w;
    const double h00 = 2 * w3 - 3 * w2 + 1, h10 = w3 - 2 * w2 + w, h01 = -2 * w3 + 3 * w2, h11 = w3 - w2;
    return std::exp(h00 * log_v_[i] + h10 * h * slopes_[i] + h01 * log_v_[j] + h11 * h * slopes_[j]);
  }

  YoungFamily family_ = YoungFamily::power;
  double r_ = 2.0;
  double delta_ = 0.0;
  double coef_ = 1.0;
  std::optional<Growth> growth_;
  std::vector<std::pair<double, double>> points_;
  std::vector<double> slopes_;
  std::vector<double> log_t_;
  std::vector<double> log_v_;
  double zero_until_ = 0.0;
};

inline double eval_young(const YoungFn& phi, double t) { return phi(t); }

namespace detail {

/// argmax of a unimodal function on [a, b] (Brent's method).
template <class F>
double brent_argmax(F&& f, double a, double b, std::uintmax_t iterations = 500) {
  const auto neg = [&](double x) { return -f(x); };
  return boost::math::tools::brent_find_minima(neg, a, b, std::numeric_limits<double>::digits / 2, iterations).first;
}

struct AssociatePoint {
  double value;
  double argmax;
};

/// sup_{s>0} (s t - Φ(s)) by a Brent search on log s.
inline AssociatePoint associate_point(const YoungFn& phi, double t) {
  const auto objective = [&](double u) {
    const double s = std::exp(u);
    const double v = phi(s);
    return std::isfinite(v) ? s * t - v : -std::numeric_limits<double>::infinity();
  };
  // bracket: grow the upper end until the objective turns negative
  double lo = std::log(1e-14), hi = std::log(1e-14) + 1.0;
  while (hi < 700.0 && objective(hi) > 0.0) hi += 2.0;
  hi += 2.0;
  const double u = brent_argmax(objective, lo, hi);
  const double s = std::exp(u);
  return {std::max(0.0, s * t - phi(s)), s};
}

}  // namespace detail

inline constexpr int kAssociateGridSize = 512;
inline constexpr double kAssociateGridLo = 1e-8;
inline constexpr double kAssociateGridHi = 1e8;

/// Associate (Legendre-type conjugate) Φ̄(t) = sup_{s>0} {st − Φ(s)}.
///
/// Powers conjugate exactly: c·t^r ↦ (1 − 1/r)(c r)^{−1/(r−1)} t^{r'}.
/// Other families are tabulated on a 512-point log grid over [1e-8, 1e8] and
/// interpolated by cubic Hermite in log-log coordinates, using the exact
/// slope t·s*(t)/Φ̄(t) from the envelope theorem.
inline YoungFn associate(const YoungFn& phi) {
  if (phi.family() == YoungFamily::power) {
    const double r = phi.r();
    if (r <= 1.0) throw std::domain_error("power(1) has no finite associate");
    const double rp = r / (r - 1.0);
    const double c = (1.0 - 1.0 / r) * std::pow(phi.coef() * r, -1.0 / (r - 1.0));
    return YoungFn::power(rp, c);
  }
  // right derivative at 0: Φ̄ vanishes on [0, Φ'(0+)]
  const double tiny = 1e-12;
  double zero_until = phi(tiny) / tiny;
  if (zero_until < 1e-10) zero_until = 0.0;

  std::vector<std::pair<double, double>> pts;
  std::vector<double> slopes;
  pts.reserve(kAssociateGridSize);
  slopes.reserve(kAssociateGridSize);
  const double llo = std::log(kAssociateGridLo), lhi = std::log(kAssociateGridHi);
  for (int k = 0; k < kAssociateGridSize; ++k) {
    const double t = std::exp(llo + (lhi - llo) * k / (kAssociateGridSize - 1));
    if (t <= zero_until * (1.0 + 1e-6)) continue;
    const auto ap = detail::associate_point(phi, t);
    if (!(ap.value > 1e-290) || !std::isfinite(ap.value) || ap.value > 1e290) {
      if (pts.empty()) continue;
      break;
    }
    if (!pts.empty() && !(ap.value > pts.back().second)) continue;
    pts.emplace_back(t, ap.value);
    slopes.push_back(t * ap.argmax / ap.value);
  }
  std::optional<Growth> growth;
  if (phi.growth() && phi.growth()->r > 1.0) {
    const double r = phi.growth()->r;
    growth = Growth{r / (r - 1.0), -phi.growth()->delta / (r - 1.0)};
  }
  return YoungFn::tabulated_impl(std::move(pts), std::move(slopes), growth, zero_until);
}

/// Brute-force associate at a single t over a dense geometric s-grid.
inline double associate_brute(const YoungFn& phi, double t, double s_lo = 1e-6, double s_hi = 1e6,
                              int samples = 2'000'001) {
  double best = 0.0;
  const double a = std::log(s_lo), b = std::log(s_hi);
  for (int i = 0; i < samples; ++i) {
    const double s = std::exp(a + (b - a) * i / (samples - 1));
    best = std::max(best, s * t - phi(s));
  }
  return best;
}

// ---------------------------------------------------------------------------
// B_{p,q} classification

enum class BVerdict { member, nonmember, inconclusive };

inline const char* to_string(BVerdict v) {
  switch (v) {
    case BVerdict::member:
      return "member";
    case BVerdict::nonmember:
      return "nonmember";
    case BVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct BClass {
  BVerdict verdict = BVerdict::inconclusive;
  double tail_integral = std::numeric_limits<double>::infinity();
  bool member() const { return verdict == BVerdict::member; }
};

namespace detail {

/// ∫_0^U g(u) du on panels sized to the decay scale of g.
inline double integrate_panels(const auto& g, double upper, double decay_rate) {
  double total = 0.0;
  double u = 0.0;
  while (u < upper) {
    double width = std::max(0.25, u / 10.0);
    if (decay_rate > 0.0) width = std::min(width, 0.5 / decay_rate);
    const double next = std::min(upper, u + width);
    total += boost::math::quadrature::gauss<double, 8>::integrate(g, u, next);
    u = next;
  }
  return total;
}

}  // namespace detail

/// Membership of Φ in B_{p,q}: ∫_1^∞ Φ(t)^{q/p} t^{−q} dt/t < ∞ (B_p when q = p).
inline BClass classify_b(const YoungFn& phi, double p, double q) {
  if (!(p > 1.0)) throw std::domain_error("classify_b requires p > 1");
  if (!(q >= p)) throw std::domain_error("classify_b requires q >= p");
  const double ratio = q / p;
  // integrand in u = log t
  const auto g = [&](double u) { return std::exp(ratio * phi.log_value_at_log(u) - q * u); };
  if (phi.growth()) {
    const double e = phi.growth()->r * ratio - q;
    const double k = phi.growth()->delta * ratio;
    if (std::abs(e) <= 1e-12 * q) {
      if (!(k < -1.0)) return {BVerdict::nonmember, std::numeric_limits<double>::infinity()};
      // integrand ~ C u^k: integrate to U, add the power tail from the endpoint value
      const double upper = 1e4;
      const double body = detail::integrate_panels(g, upper, 0.0);
      const double tail = g(upper) * upper / (-k - 1.0);
      return {BVerdict::member, body + tail};
    }
    if (e > 0.0) return {BVerdict::nonmember, std::numeric_limits<double>::infinity()};
    const double rate = -e;
    const double upper = std::min(690.0, 60.0 / rate + 60.0);
    return {BVerdict::member, detail::integrate_panels(g, upper, rate)};
  }
  // tabulated without growth metadata: integrate to T_max = 1e8, extrapolate
  const double upper = std::log(1e8);
  const double body = detail::integrate_panels(g, upper, 0.0);
  const double s_tail = std::log(phi(1e8) / phi(1e7)) / std::log(10.0);
  const double e = s_tail * ratio - q;
  if (e < -0.1) return {BVerdict::member, body + g(upper) / (-e)};
  if (e > 0.1) return {BVerdict::nonmember, std::numeric_limits<double>::infinity()};
  return {BVerdict::inconclusive, std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------------------
// Luxemburg norms

inline constexpr double kLuxemburgRelTol = 1e-10;

/// ‖f‖_{Φ} with respect to the probability weights `weights` (summing to 1).
inline double luxemburg_norm_weighted(std::span<const double> values, std::span<const double> weights,
                                      const YoungFn& phi) {
  if (values.empty()) throw std::domain_error("Luxemburg norm over an empty cube");
  if (values.size() != weights.size()) throw std::domain_error("Luxemburg weights size mismatch");
  double vmax = 0.0;
  double wmax_cell = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0) throw std::domain_error("Luxemburg norm needs finite nonnegative values");
    if (v > vmax && weights[i] > 0.0) {
      vmax = v;
      wmax_cell = weights[i];
    }
  }
  if (vmax == 0.0) return 0.0;
  if (phi.family() == YoungFamily::power) {
    const double r = phi.r();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x = values[i] / vmax;
      s += weights[i] * (r == 2.0 ? x * x : (r == 1.0 ? x : std::pow(x, r)));
    }
    return vmax * std::pow(phi.coef() * s, 1.0 / r);
  }
  const auto excess = [&](double log_lambda) {
    const double inv = std::exp(-log_lambda);
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 0.0 && weights[i] > 0.0) s += weights[i] * phi(values[i] * inv);
    }
    return s - 1.0;
  };
  // avg Φ(v/lo) >= w* Φ(vmax/lo) = 1 and avg Φ(v/hi) <= Φ(vmax/hi) = 1
  double lo = std::log(vmax / phi.inverse(1.0 / wmax_cell));
  double hi = std::log(vmax / phi.inverse(1.0));
  if (!(hi > lo)) return std::exp(hi);
  double f_lo = excess(lo), f_hi = excess(hi);
  if (f_hi <= 0.0 && f_lo <= 0.0) return std::exp(lo);
  if (f_hi >= 0.0) return std::exp(hi);
  // TOMS 748 on the bracket; overflowing sums are clamped so the solver sees finite values
  const auto finite_excess = [&](double x) { return std::min(excess(x), 1e300); };
  const auto close = [](double a, double b) { return b - a <= kLuxemburgRelTol; };
  std::uintmax_t iterations = 200;
  hi = boost::math::tools::toms748_solve(finite_excess, lo, hi, std::min(f_lo, 1e300), f_hi, close, iterations)
           .second;
  return std::exp(hi);
}

/// ‖f‖_{Φ,Q} over a cube whose cells carry equal measure.
inline double luxemburg_norm(std::span<const double> values, const YoungFn& phi) {
  if (values.empty()) throw std::domain_error("Luxemburg norm over an empty cube");
  std::vector<double> w(values.size(), 1.0 / static_cast<double>(values.size()));
  return luxemburg_norm_weighted(values, w, phi);
}

/// Uniform-measure cell values of a cube.
struct LuxemburgContext {
  std::vector<double> values;

  explicit LuxemburgContext(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::domain_error("empty cube");
    for (double x : values)
      if (!std::isfinite(x)) throw std::domain_error("non-finite cell value");
  }
  double norm(const YoungFn& phi) const { return luxemburg_norm(values, phi); }
};

}  // namespace matbump
