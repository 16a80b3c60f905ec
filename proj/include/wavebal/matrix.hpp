#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "wavebal/errors.hpp"

namespace wavebal {

/// Dense square matrix over a field-ish scalar (double, Rational, integers
/// for permutation sums). Row-major, sized at construction.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, T(0)) {}

  static Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int size() const { return n_; }

  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  friend Matrix operator+(const Matrix& x, const Matrix& y) {
    Matrix out(x.n_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] + y.a_[i];
    return out;
  }
  friend Matrix operator-(const Matrix& x, const Matrix& y) {
    Matrix out(x.n_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] - y.a_[i];
    return out;
  }
  friend Matrix operator*(const T& s, const Matrix& x) {
    Matrix out(x.n_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = s * x.a_[i];
    return out;
  }

  /// Matrix product, i-k-j loop order for row-major locality.
  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    const int n = x.n_;
    Matrix out(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const T xik = x(i, k);
        if (xik == T(0)) continue;
        const T* yrow = &y.a_[static_cast<std::size_t>(k) * n];
        T* orow = &out.a_[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) orow[j] = orow[j] + xik * yrow[j];
      }
    }
    return out;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(n_, T(0));
    for (int i = 0; i < n_; ++i) {
      T acc(0);
      const T* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) acc = acc + row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  /// Row vector times matrix (left action), for left-eigenvector checks.
  std::vector<T> apply_left(const std::vector<T>& x) const {
    std::vector<T> y(n_, T(0));
    for (int i = 0; i < n_; ++i) {
      const T xi = x[i];
      if (xi == T(0)) continue;
      const T* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) y[j] = y[j] + xi * row[j];
    }
    return y;
  }

  Matrix pow(long long e) const {
    Matrix base = *this;
    Matrix out = identity(n_);
    while (e > 0) {
      if (e & 1) out = out * base;
      base = base * base;
      e >>= 1;
    }
    return out;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.n_ == y.n_ && x.a_ == y.a_;
  }
  friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

  std::vector<T> row_sums() const {
    std::vector<T> s(n_, T(0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s[i] = s[i] + (*this)(i, j);
    return s;
  }
  std::vector<T> col_sums() const {
    std::vector<T> s(n_, T(0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s[j] = s[j] + (*this)(i, j);
    return s;
  }

  /// Determinant by Gaussian elimination. Floating scalars pivot on the
  /// largest magnitude; exact scalars take the first nonzero pivot.
  T det() const {
    Matrix w = *this;
    const int n = n_;
    T sign(1);
    T product(1);
    for (int col = 0; col < n; ++col) {
      int pivot = -1;
      if constexpr (std::is_floating_point_v<T>) {
        T best(0);
        for (int r = col; r < n; ++r) {
          const T mag = std::abs(w(r, col));
          if (mag > best) {
            best = mag;
            pivot = r;
          }
        }
      } else {
        for (int r = col; r < n; ++r)
          if (!(w(r, col) == T(0))) {
            pivot = r;
            break;
          }
      }
      if (pivot < 0) return T(0);
      if (pivot != col) {
        for (int j = 0; j < n; ++j) std::swap(w(col, j), w(pivot, j));
        sign = T(0) - sign;
      }
      const T p = w(col, col);
      product = product * p;
      for (int r = col + 1; r < n; ++r) {
        const T factor = w(r, col) / p;
        if (factor == T(0)) continue;
        for (int j = col; j < n; ++j) w(r, j) = w(r, j) - factor * w(col, j);
      }
    }
    return sign * product;
  }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

inline double max_abs_diff(const Matrix<double>& x, const Matrix<double>& y) {
  double m = 0.0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j)
      m = std::max(m, std::abs(x(i, j) - y(i, j)));
  return m;
}

/// Permutation in row form: applying it to a vector gives y[i] = x[p[i]],
/// i.e. p[i] is the column holding the 1 in row i of the matrix form.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> p) : p_(std::move(p)) {}

  static Permutation identity(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    return Permutation(std::move(p));
  }

  int size() const { return static_cast<int>(p_.size()); }
  int operator[](int i) const { return p_[i]; }

  template <class T>
  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) y[i] = x[p_[i]];
    return y;
  }

  /// Composition with matrix-product semantics: (a * b) acts like applying
  /// b's matrix first in the product a·b, so (a*b)[i] = b[a[i]].
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    std::vector<int> p(a.p_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = b.p_[a.p_[i]];
    return Permutation(std::move(p));
  }

  Permutation inverse() const {
    std::vector<int> q(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) q[p_[i]] = static_cast<int>(i);
    return Permutation(std::move(q));
  }

  Permutation pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    Permutation base = *this;
    Permutation out = identity(size());
    while (e > 0) {
      if (e & 1) out = out * base;
      base = base * base;
      e >>= 1;
    }
    return out;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.p_ == b.p_;
  }
  friend bool operator!=(const Permutation& a, const Permutation& b) {
    return !(a == b);
  }

  template <class T>
  Matrix<T> to_matrix() const {
    Matrix<T> m(size());
    for (int i = 0; i < size(); ++i) m(i, p_[i]) = T(1);
    return m;
  }

 private:
  std::vector<int> p_;
};

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence:
/// returns (c_1, ..., c_n) with p(x) = x^n + c_1 x^(n-1) + ... + c_n.
/// Division is only ever by the integers 1..n, so the computation stays
/// exact over rationals.
template <class T>
std::vector<T> char_poly(const Matrix<T>& a) {
  const int n = a.size();
  std::vector<T> coef(n, T(0));
  Matrix<T> m = a;  // M_k, starting at M_1 = A
  for (int k = 1; k <= n; ++k) {
    if (k > 1) m = a * m;
    T tr(0);
    for (int i = 0; i < n; ++i) tr = tr + m(i, i);
    const T ck = T(0) - tr / T(k);
    coef[k - 1] = ck;
    for (int i = 0; i < n; ++i) m(i, i) = m(i, i) + ck;
  }
  return coef;
}

/// Horner evaluation of the monic polynomial char_poly returns. The value
/// scalar X may differ from the coefficient scalar (e.g. complex points of
/// a real polynomial).
template <class X, class T>
X eval_monic(const std::vector<T>& coef, const X& x) {
  X acc(1);
  for (const auto& c : coef) acc = acc * x + X(c);
  return acc;
}

}  // namespace wavebal
