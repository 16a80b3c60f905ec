#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "wavebal/errors.hpp"
#include "wavebal/matrix.hpp"

namespace wavebal {

// The wave-size evolution acts on vectors of length 2N: one slot per moving
// wave, two waves per cell, reordered pairwise after every half step. All
// builders are templated so the same code produces double and exact-rational
// matrices.

namespace detail {

inline int dim_from_coeffs(std::size_t n_coeffs) {
  const int N = static_cast<int>(n_coeffs) + 1;
  if (N < 2 || N % 2 != 0)
    throw ConfigError("coefficient vector of size " + std::to_string(n_coeffs) +
                      " does not match an even cell count >= 2");
  return 2 * N;
}

inline void require_even_cells(int N) {
  if (N < 2 || N % 2 != 0)
    throw ConfigError("cell count must be even and >= 2, got " +
                      std::to_string(N));
}

template <class T>
void require_unit_interval(const std::vector<T>& c) {
  for (const auto& cj : c)
    if (cj < T(0) || cj > T(1))
      throw ConfigError("mixing coefficients must lie in [0, 1]");
}

}  // namespace detail

/// Pairwise swap of neighboring slots: (x0,x1,x2,x3,...) -> (x1,x0,x3,x2,...).
inline Permutation perm_B1(int N) {
  detail::require_even_cells(N);
  std::vector<int> p(2 * N);
  for (int i = 0; i < 2 * N; i += 2) {
    p[i] = i + 1;
    p[i + 1] = i;
  }
  return Permutation(std::move(p));
}

/// The zero-mixing transition: waves pass interior nodes untouched and turn
/// around at the walls. As a permutation it is a single 2N-cycle.
inline Permutation perm_B0(int N) {
  detail::require_even_cells(N);
  std::vector<int> p(2 * N);
  p[0] = 1;
  p[2 * N - 1] = 2 * N - 2;
  for (int j = 1; j <= N - 1; ++j) {
    p[2 * j - 1] = 2 * j + 1;
    p[2 * j] = 2 * j - 2;
  }
  return Permutation(std::move(p));
}

template <class T>
Matrix<T> build_B1(int N) {
  return perm_B1(N).template to_matrix<T>();
}

/// Node-mixing matrix: identity at the two wall slots, interior 2x2 blocks
/// [[c_j, 1-c_j], [1-c_j, c_j]] on slots (2j-1, 2j) for j = 1..N-1.
template <class T>
Matrix<T> build_B2(const std::vector<T>& c) {
  detail::require_unit_interval(c);
  const int dim = detail::dim_from_coeffs(c.size());
  Matrix<T> m(dim);
  m(0, 0) = T(1);
  m(dim - 1, dim - 1) = T(1);
  for (std::size_t j = 1; j < c.size() + 1; ++j) {
    const T& cj = c[j - 1];
    const T one_minus = T(1) - cj;
    const int r = 2 * static_cast<int>(j) - 1;
    m(r, r) = cj;
    m(r, r + 1) = one_minus;
    m(r + 1, r) = one_minus;
    m(r + 1, r + 1) = cj;
  }
  return m;
}

/// Full step matrix B(c) = B2(c) B1, written out directly:
///   y[0]      = x[1]
///   y[2j-1]   = c_j x[2j-2] + (1-c_j) x[2j+1]
///   y[2j]     = (1-c_j) x[2j-2] + c_j x[2j+1]
///   y[2N-1]   = x[2N-2]
template <class T>
Matrix<T> build_B(const std::vector<T>& c) {
  detail::require_unit_interval(c);
  const int dim = detail::dim_from_coeffs(c.size());
  Matrix<T> m(dim);
  m(0, 1) = T(1);
  m(dim - 1, dim - 2) = T(1);
  for (std::size_t j = 1; j < c.size() + 1; ++j) {
    const T& cj = c[j - 1];
    const T one_minus = T(1) - cj;
    const int r = 2 * static_cast<int>(j) - 1;
    m(r, r - 1) = cj;
    m(r, r + 2) = one_minus;
    m(r + 1, r - 1) = one_minus;
    m(r + 1, r + 2) = cj;
  }
  return m;
}

/// O(N) application of B(c) without materializing the matrix.
template <class T>
std::vector<T> apply_B(const std::vector<T>& c, const std::vector<T>& x) {
  const int dim = detail::dim_from_coeffs(c.size());
  if (static_cast<int>(x.size()) != dim)
    throw ConfigError("size vector does not match coefficient vector");
  std::vector<T> y(x.size());
  y[0] = x[1];
  y[dim - 1] = x[dim - 2];
  for (std::size_t j = 1; j < c.size() + 1; ++j) {
    const T& cj = c[j - 1];
    const T one_minus = T(1) - cj;
    const int r = 2 * static_cast<int>(j) - 1;
    y[r] = cj * x[r - 1] + one_minus * x[r + 2];
    y[r + 1] = one_minus * x[r - 1] + cj * x[r + 2];
  }
  return y;
}

/// (1, -1, -1, 1, 1, -1, -1, 1, ...): the alternating-pair eigenvector that
/// every B(c) flips in sign, on both sides.
template <class T>
std::vector<T> v_minus(int dim) {
  std::vector<T> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = (i % 4 == 0 || i % 4 == 3) ? T(1) : T(-1);
  return v;
}

template <class T>
std::vector<T> ones(int dim) {
  return std::vector<T>(dim, T(1));
}

inline double l1_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

/// Row and column sums all equal 1 and entries are nonnegative. Exact for
/// rational matrices (tol ignored), tolerance-based for floating point.
template <class T>
bool is_doubly_stochastic(const Matrix<T>& m, double tol = 1e-14) {
  const auto rows = m.row_sums();
  const auto cols = m.col_sums();
  for (int i = 0; i < m.size(); ++i) {
    if constexpr (std::is_floating_point_v<T>) {
      if (std::abs(rows[i] - 1.0) > tol) return false;
      if (std::abs(cols[i] - 1.0) > tol) return false;
    } else {
      if (!(rows[i] == T(1))) return false;
      if (!(cols[i] == T(1))) return false;
    }
    for (int j = 0; j < m.size(); ++j)
      if (m(i, j) < T(0)) return false;
  }
  return true;
}

/// det B(c) = -(1-2c_1)...(1-2c_{N-1}), the closed form the LU determinant
/// is checked against.
template <class T>
T det_B_formula(const std::vector<T>& c) {
  T prod(1);
  for (const auto& cj : c) prod = prod * (T(1) - T(2) * cj);
  return T(-1) * prod;
}

/// Constant-coefficient steps split into a convex combination of the two
/// extreme permutations: B(c) = (1-c) B(0) + c B1.
struct BirkhoffSplit {
  double weight = 0.0;  // coefficient of B1
  Permutation pass;     // B(0)
  Permutation swap;     // B1
};

inline BirkhoffSplit birkhoff_split(double c, int N) {
  if (!(c >= 0.0 && c < 0.5))
    throw ConfigError("constant mixing weight must lie in [0, 1/2)");
  return BirkhoffSplit{c, perm_B0(N), perm_B1(N)};
}

/// Entrywise comparison of B(c) against the uniform-damping envelope
/// (1 + d1/N)^{-1} [B(0) + (d2/N) B1]. Holds whenever every c_j comes from a
/// node whose secant slope times jump lies in [d1/N, d2/N].
struct DominanceReport {
  bool ok = true;
  int row = -1, col = -1;      // witness entry when ok is false
  double lhs = 0.0, rhs = 0.0;
};

inline DominanceReport entrywise_dominance(const std::vector<double>& c,
                                           double d1, double d2,
                                           double tol = 1e-12) {
  const int dim = detail::dim_from_coeffs(c.size());
  const int N = dim / 2;
  const auto B = build_B(c);
  const auto B0 = perm_B0(N).to_matrix<double>();
  const auto B1 = build_B1<double>(N);
  const double scale = 1.0 / (1.0 + d1 / N);
  DominanceReport rep;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double rhs = scale * (B0(i, j) + (d2 / N) * B1(i, j));
      if (B(i, j) > rhs + tol) {
        rep.ok = false;
        rep.row = i;
        rep.col = j;
        rep.lhs = B(i, j);
        rep.rhs = rhs;
        return rep;
      }
    }
  }
  return rep;
}

/// Applies one B(c) per recorded step, oldest first.
inline std::vector<double> evolve_sigma(
    std::vector<double> sigma,
    const std::vector<std::vector<double>>& c_record) {
  for (const auto& c : c_record) sigma = apply_B(c, sigma);
  return sigma;
}

}  // namespace wavebal
