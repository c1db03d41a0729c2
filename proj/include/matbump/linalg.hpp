#pragma once

// Small dense matrices (n <= 4) for per-cell matrix weights.
//
// Everything here is sized for the matrix dimension of a weight, which is
// tiny, so storage is a fixed-capacity array and all routines are plain
// loops. Symmetric eigenproblems go through Eigen.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace matbump {

inline constexpr int kMaxMatDim = 4;

class SmallVec {
 public:
  SmallVec() = default;
  explicit SmallVec(int n) : n_(n) { check_dim(n); }

  static SmallVec basis(int n, int j) {
    SmallVec v(n);
    v[j] = 1.0;
    return v;
  }

  int size() const { return n_; }
  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

  double norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += data_[i] * data_[i];
    return std::sqrt(s);
  }
  double dot(const SmallVec& o) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += data_[i] * o[i];
    return s;
  }

  SmallVec& operator*=(double c) {
    for (int i = 0; i < n_; ++i) data_[i] *= c;
    return *this;
  }
  friend SmallVec operator*(double c, SmallVec v) { return v *= c; }
  friend SmallVec operator+(SmallVec a, const SmallVec& b) {
    for (int i = 0; i < a.n_; ++i) a[i] += b[i];
    return a;
  }
  friend SmallVec operator-(SmallVec a, const SmallVec& b) {
    for (int i = 0; i < a.n_; ++i) a[i] -= b[i];
    return a;
  }

  static void check_dim(int n) {
    if (n < 1 || n > kMaxMatDim) {
      throw std::invalid_argument("matrix dimension must be in [1, 4], got " + std::to_string(n));
    }
  }

 private:
  int n_ = 0;
  std::array<double, kMaxMatDim> data_{};
};

class SmallMat {
 public:
  SmallMat() = default;
  explicit SmallMat(int n) : n_(n) { SmallVec::check_dim(n); }

  static SmallMat identity(int n) {
    SmallMat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static SmallMat diagonal(const SmallVec& d) {
    SmallMat m(d.size());
    for (int i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  int size() const { return n_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * kMaxMatDim + j)]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * kMaxMatDim + j)]; }

  SmallMat transposed() const {
    SmallMat t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  SmallMat& operator+=(const SmallMat& o) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
    return *this;
  }
  SmallMat& operator*=(double c) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) (*this)(i, j) *= c;
    return *this;
  }
  friend SmallMat operator+(SmallMat a, const SmallMat& b) { return a += b; }
  friend SmallMat operator-(SmallMat a, const SmallMat& b) {
    for (int i = 0; i < a.n_; ++i)
      for (int j = 0; j < a.n_; ++j) a(i, j) -= b(i, j);
    return a;
  }
  friend SmallMat operator*(double c, SmallMat a) { return a *= c; }

  friend SmallMat operator*(const SmallMat& a, const SmallMat& b) {
    assert(a.n_ == b.n_);
    SmallMat r(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        const double aik = a(i, k);
        for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend SmallVec operator*(const SmallMat& a, const SmallVec& v) {
    SmallVec r(a.n_);
    for (int i = 0; i < a.n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < a.n_; ++j) s += a(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  double frobenius_sq() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return s;
  }
  double max_abs_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

 private:
  int n_ = 0;
  std::array<double, kMaxMatDim * kMaxMatDim> data_{};
};

struct SymEigen {
  SmallVec values;   // ascending
  SmallMat vectors;  // columns are eigenvectors
};

/// Eigendecomposition of a symmetric matrix (Eigen's self-adjoint solver).
inline SymEigen sym_eigen(const SmallMat& m) {
  using Fixed = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMatDim, kMaxMatDim>;
  const int n = m.size();
  Fixed a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
  const Eigen::SelfAdjointEigenSolver<Fixed> solver(a);
  SymEigen out{SmallVec(n), SmallMat(n)};
  for (int i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()(i);
    for (int k = 0; k < n; ++k) out.vectors(k, i) = solver.eigenvectors()(k, i);
  }
  return out;
}

/// Rebuilds V·diag(f(λ))·Vᵀ.
template <class F>
SmallMat sym_apply(const SymEigen& e, F&& f) {
  const int n = e.values.size();
  SmallMat r(n);
  for (int k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    for (int i = 0; i < n; ++i) {
      const double vik = e.vectors(i, k) * fk;
      for (int j = 0; j < n; ++j) r(i, j) += vik * e.vectors(j, k);
    }
  }
  return r;
}

inline constexpr double kEigenFloor = 1e-300;

/// Real power of a symmetric positive-definite matrix via diagonalization.
/// Eigenvalues are floored at 1e-300 before exponentiation.
inline SmallMat sym_pow(const SmallMat& m, double r) {
  if (m.size() == 1) {
    SmallMat out(1);
    out(0, 0) = std::pow(std::max(m(0, 0), kEigenFloor), r);
    return out;
  }
  const SymEigen e = sym_eigen(m);
  for (int i = 0; i < e.values.size(); ++i) {
    if (!std::isfinite(e.values[i])) throw std::domain_error("non-finite eigenvalue");
  }
  return sym_apply(e, [r](double lam) { return std::pow(std::max(lam, kEigenFloor), r); });
}

/// Largest absolute eigenvalue of a symmetric matrix.
inline double sym_op_norm(const SmallMat& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  const SymEigen e = sym_eigen(m);
  return std::max(std::abs(e.values[0]), std::abs(e.values[e.values.size() - 1]));
}

inline double sym_max_eigenvalue(const SmallMat& m) {
  if (m.size() == 1) return m(0, 0);
  return sym_eigen(m).values[m.size() - 1];
}

/// Operator (spectral) norm of an arbitrary square matrix.
inline double op_norm(const SmallMat& m) {
  const int n = m.size();
  if (n == 1) return std::abs(m(0, 0));
  if (n == 2) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double f = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(std::max(0.0, 0.5 * (f + std::sqrt(disc))));
  }
  return std::sqrt(std::max(0.0, sym_max_eigenvalue(m.transposed() * m)));
}

/// Top right-singular vector (unit) of a square matrix.
inline SmallVec top_right_singular_vector(const SmallMat& m) {
  const SymEigen e = sym_eigen(m.transposed() * m);
  const int n = m.size();
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v[i] = e.vectors(i, n - 1);
  return v;
}

inline SmallMat symmetrized(const SmallMat& m) {
  SmallMat s = m;
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  return s;
}

/// Planar/axis rotation used by the weight generators: product of Givens
/// rotations by `angle` in each coordinate plane (i, i+1).
inline SmallMat rotation(int n, double angle) {
  SmallMat r = SmallMat::identity(n);
  for (int i = 0; i + 1 < n; ++i) {
    SmallMat g = SmallMat::identity(n);
    const double c = std::cos(angle), s = std::sin(angle);
    g(i, i) = c;
    g(i, i + 1) = -s;
    g(i + 1, i) = s;
    g(i + 1, i + 1) = c;
    r = g * r;
  }
  return r;
}

}  // namespace matbump
