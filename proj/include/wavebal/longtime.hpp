#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wavebal/errors.hpp"
#include "wavebal/matrix.hpp"
#include "wavebal/rng.hpp"
#include "wavebal/transition.hpp"

namespace wavebal {

/// The two interleaved index classes of size-2N strength vectors, 0-based:
/// slots where the alternating eigenvector is +1 (i mod 4 in {0,3}) and
/// slots where it is -1. Pairs drawn inside one class are the units the
/// cycle contraction acts on.
struct IndexSets {
  std::vector<int> iprime, idprime;
};

inline bool in_prime_class(int i) {
  const int r = i % 4;
  return r == 0 || r == 3;
}

inline IndexSets index_sets(int N) {
  detail::require_even_cells(N);
  IndexSets s;
  for (int i = 0; i < 2 * N; ++i)
    (in_prime_class(i) ? s.iprime : s.idprime).push_back(i);
  return s;
}

/// sigma = alpha_v * v_- + tilde with tilde orthogonal to both constant and
/// alternating eigenvectors; alpha_v is the normalized coefficient
/// (sigma . v_-) / (2N).
struct EMinusSplit {
  double alpha_v = 0.0;
  std::vector<double> tilde;
};

inline EMinusSplit decompose_E_minus(const std::vector<double>& sigma) {
  const int dim = static_cast<int>(sigma.size());
  if (dim == 0 || dim % 4 != 0)
    throw ConfigError("strength vector length must be a multiple of 4");
  double sum = 0.0, mass = 0.0;
  for (double s : sigma) {
    sum += s;
    mass += std::abs(s);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, mass))
    throw NumericalError("vector is not orthogonal to the constant direction");
  const auto vm = v_minus<double>(dim);
  double dot = 0.0;
  for (int i = 0; i < dim; ++i) dot += sigma[i] * vm[i];
  EMinusSplit out;
  out.alpha_v = dot / dim;
  out.tilde.resize(dim);
  for (int i = 0; i < dim; ++i) out.tilde[i] = sigma[i] - out.alpha_v * vm[i];
  return out;
}

/// Restriction onto the two index classes. For a vector orthogonal to both
/// eigenvectors the two halves are zero-sum individually and the l1 norms
/// add exactly (the supports are disjoint).
struct SupportSplit {
  std::vector<double> prime, dprime;
};

inline SupportSplit split_H1_H2(const std::vector<double>& tilde) {
  SupportSplit s;
  s.prime.assign(tilde.size(), 0.0);
  s.dprime.assign(tilde.size(), 0.0);
  for (std::size_t i = 0; i < tilde.size(); ++i)
    (in_prime_class(static_cast<int>(i)) ? s.prime : s.dprime)[i] = tilde[i];
  return s;
}

/// Zero-sum vectors decompose into at most n-1 signed pairs, each moving
/// mass beta from slot i to slot j, with l1 norm exactly 2 sum |beta|.
struct PairTerm {
  int i = 0, j = 0;
  double beta = 0.0;
};

struct PairDecomposition {
  std::vector<PairTerm> pairs;
  double residual = 0.0;  // leftover mass after the greedy sweep
};

/// Greedy sweep: pick the smallest nonzero entry (ties to the left), cancel
/// it against an opposite-signed entry of largest magnitude (ties to the
/// left). Each step zeroes one slot, so the sweep ends in n-1 rounds.
inline PairDecomposition greedy_pair_decomposition(std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  double mass = 0.0, sum = 0.0;
  for (double v : x) {
    mass += std::abs(v);
    sum += v;
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, mass))
    throw NumericalError("pair decomposition needs a zero-sum vector");
  const double tol = 1e-14 * std::max(1.0, mass);

  PairDecomposition out;
  for (int round = 0; round + 1 < n; ++round) {
    int k = -1, h = -1;
    for (int i = 0; i < n; ++i) {
      if (std::abs(x[i]) <= tol) continue;
      if (k < 0 || std::abs(x[i]) < std::abs(x[k])) k = i;
    }
    if (k < 0) break;
    for (int i = 0; i < n; ++i) {
      if (std::abs(x[i]) <= tol || (x[i] > 0) == (x[k] > 0)) continue;
      if (h < 0 || std::abs(x[i]) > std::abs(x[h])) h = i;
    }
    if (h < 0) break;  // leftover is pure drift, reported as residual
    out.pairs.push_back({k, h, x[k]});
    x[h] += x[k];
    x[k] = 0.0;
  }
  for (double v : x) out.residual += std::abs(v);
  return out;
}

inline std::vector<double> reconstruct_pairs(const PairDecomposition& d,
                                             int n) {
  std::vector<double> x(n, 0.0);
  for (const auto& p : d.pairs) {
    x[p.i] += p.beta;
    x[p.j] -= p.beta;
  }
  return x;
}

inline double pair_l1(const PairDecomposition& d) {
  double s = 0.0;
  for (const auto& p : d.pairs) s += std::abs(p.beta);
  return 2.0 * s;
}

/// The bare cycle anticommutes with the pair swap: conjugating a power of
/// the cycle by the swap inverts it. Exact permutation arithmetic.
inline bool commutation_check(int N, int ell) {
  const auto b0 = perm_B0(N);
  const auto b1 = perm_B1(N);
  const auto lhs = b0.pow(ell) * b1;
  const auto rhs = b1 * b0.pow(-ell);
  const auto lhs_neg = b0.pow(-ell) * b1;
  const auto rhs_neg = b1 * b0.pow(ell);
  return lhs == rhs && lhs_neg == rhs_neg;
}

/// Projector-like 0/1 matrix (e e^t + v_- v_-^t) / 2: entry 1 exactly when
/// row and column fall in the same index class. Satisfies P^2 = N P and
/// equals the sum of the N even powers of the bare cycle.
template <class T>
Matrix<T> hat_P(int N) {
  detail::require_even_cells(N);
  Matrix<T> p(2 * N);
  for (int i = 0; i < 2 * N; ++i)
    for (int j = 0; j < 2 * N; ++j)
      if (in_prime_class(i) == in_prime_class(j)) p(i, j) = T(1);
  return p;
}

/// Exact binomial coefficient in 64 bits. The running product after step i
/// is itself a binomial, so the division is always exact.
inline long long binom_ll(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    const long long num = n - k + i;
    if (r > std::numeric_limits<long long>::max() / num)
      throw ExactOverflow("binomial coefficient exceeds 64 bits: C(" +
                          std::to_string(n) + "," + std::to_string(k) + ")");
    r = r * num / i;
  }
  return r;
}

/// Coefficient matrix of the k-th order term in the expansion of
/// (cycle + gamma * swap)^(2N): a weighted sum of even cycle powers, times
/// one swap layer when k is odd.
template <class T>
Matrix<T> S_k_closed_form(int N, int k) {
  detail::require_even_cells(N);
  if (k < 0 || k > 2 * N) throw ConfigError("order k must lie in [0, 2N]");
  const int dim = 2 * N;
  if (k == 0) return Matrix<T>::identity(dim);
  const auto b0 = perm_B0(N);
  const bool odd = (k % 2) != 0;
  const int a = odd ? (k - 1) / 2 : k / 2;
  const int b = odd ? (k - 1) / 2 : k / 2 - 1;
  const std::vector<T> zero_c(static_cast<std::size_t>(N - 1), T(0));
  const Matrix<T> b2 = build_B2<T>(zero_c);
  Matrix<T> s(dim);
  for (int j = 0; j < dim; ++j) {
    const long long w = binom_ll(j, a) * binom_ll(dim - j - 1, b);
    if (w == 0) continue;
    const auto pj = b0.pow((2 * j) % dim);
    for (int i = 0; i < dim; ++i) {
      if (odd) {
        for (int c = 0; c < dim; ++c) {
          const T v = b2(pj[i], c);
          if (!(v == T(0))) s(i, c) = s(i, c) + T(w) * v;
        }
      } else {
        s(i, pj[i]) = s(i, pj[i]) + T(w);
      }
    }
  }
  return s;
}

/// Reference evaluation of the k-th order term by literal enumeration: every
/// length-2N word over {cycle, swap} with k swaps, multiplied out as
/// permutations and summed. Exponential in N, sized for the exact regime.
inline Matrix<long long> order_term_by_enumeration(int N, int k) {
  detail::require_even_cells(N);
  const int dim = 2 * N;
  if (dim > 20) throw ConfigError("word enumeration is sized for 2N <= 20");
  if (k < 0 || k > dim) throw ConfigError("order k must lie in [0, 2N]");
  const auto b0 = perm_B0(N);
  const auto b1 = perm_B1(N);
  Matrix<long long> acc(dim);
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    if (std::popcount(mask) != k) continue;
    Permutation prod = Permutation::identity(dim);
    for (int pos = 0; pos < dim; ++pos)
      prod = prod * (((mask >> pos) & 1u) ? b1 : b0);
    acc = acc + prod.to_matrix<long long>();
  }
  return acc;
}

/// d * (I0(2d) - 1) by its power series.
inline double bessel_f0(double d) {
  if (!(d >= 0)) throw ConfigError("bessel argument must be nonnegative");
  if (d > 300) throw NumericalError("bessel series argument too large");
  double term = d * d * d;  // l = 1 term d^3 / (1!)^2
  double sum = 0.0;
  for (int l = 1; l < 100000; ++l) {
    sum += term;
    if (term < 1e-18 * sum) break;
    term *= d * d / (static_cast<double>(l + 1) * (l + 1));
  }
  return sum;
}

/// d * I1(2d) by its power series.
inline double bessel_f1(double d) {
  if (!(d >= 0)) throw ConfigError("bessel argument must be nonnegative");
  if (d > 300) throw NumericalError("bessel series argument too large");
  double term = d * d;  // h = 1 term d^2 / (1! 0!)
  double sum = 0.0;
  for (int h = 1; h < 100000; ++h) {
    sum += term;
    if (term < 1e-18 * sum) break;
    term *= d * d / (static_cast<double>(h + 1) * h);
  }
  return sum;
}

/// One parameter point of the cycle-contraction estimate.
struct ExpansionReport {
  int N = 0;
  double d1 = 0.0, d2 = 0.0;
  double CN = 0.0;      // finite-N contraction factor over one full cycle
  double Climit = 0.0;  // its N -> infinity limit
  bool contractive = false;
  double zeta_sum = 0.0, eta_sum = 0.0;
  double bound_zeta = 0.0, bound_eta = 0.0;
};

inline ExpansionReport contraction_constant(int N, double d1, double d2) {
  if (!(d1 >= 0) || !(d2 >= d1))
    throw ConfigError("contraction constants need 0 <= d1 <= d2");
  detail::require_even_cells(N);
  ExpansionReport r;
  r.N = N;
  r.d1 = d1;
  r.d2 = d2;
  const double shrink = std::pow(1.0 + d1 / N, -2.0 * N);
  r.CN = shrink * (std::exp(2.0 * d2) - 2.0 * d2 +
                   (bessel_f0(d2) + bessel_f1(d2)) / N);
  r.Climit = std::exp(-2.0 * d1) * (std::exp(2.0 * d2) - 2.0 * d2);
  r.contractive = r.CN < 1.0;
  r.bound_zeta = std::sinh(2.0 * d2) - 2.0 * d2 + bessel_f0(d2) / N;
  r.bound_eta = std::cosh(2.0 * d2) - 1.0 + bessel_f1(d2) / N;
  return r;
}

/// Odd-order coefficient of the cycle expansion at offset j: the series
/// sum_{l>=1} gamma^(2l+1) C(j,l) C(2N-j-1,l), evaluated by the term
/// recurrence so it never forms a large binomial explicitly.
template <class T>
T zeta_coeff(int j, int N, const T& gamma) {
  const int dim = 2 * N;
  T total(0);
  T term = gamma * gamma * gamma * T(j) * T(dim - j - 1);  // l = 1
  const int lmax = std::min(j, dim - j - 1);
  for (int l = 1; l <= lmax; ++l) {
    total = total + term;
    if (l == lmax) break;
    term = term * gamma * gamma * T(j - l) * T(dim - j - 1 - l) /
           (T(l + 1) * T(l + 1));
  }
  return total;
}

/// Even-order coefficient: sum_{h>=1} gamma^(2h) C(j,h) C(2N-j-1,h-1).
template <class T>
T eta_coeff(int j, int N, const T& gamma) {
  const int dim = 2 * N;
  T total(0);
  T term = gamma * gamma * T(j);  // h = 1
  const int hmax = std::min(j, dim - j);
  for (int h = 1; h <= hmax; ++h) {
    total = total + term;
    if (h == hmax) break;
    term = term * gamma * gamma * T(j - h) * T(dim - j - h) /
           (T(h + 1) * T(h));
  }
  return total;
}

/// Both sides of the full-cycle expansion identity for gamma = d/N:
/// (cycle + gamma swap)^(2N) against identity + 2 gamma hat_P + the zeta
/// and eta weighted cycle powers. Works verbatim over rationals.
template <class T>
struct ExpansionSides {
  Matrix<T> lhs, rhs;
  std::vector<T> zeta, eta;
  bool equal = false;
};

template <class T>
ExpansionSides<T> theorem_expansion(int N, const T& gamma) {
  detail::require_even_cells(N);
  const int dim = 2 * N;
  const auto b0 = perm_B0(N);
  const std::vector<T> zero_c(static_cast<std::size_t>(N - 1), T(0));
  const Matrix<T> b2 = build_B2<T>(zero_c);

  Matrix<T> base(dim);
  const Matrix<T> b1m = build_B1<T>(N);
  for (int i = 0; i < dim; ++i) {
    base(i, b0[i]) = base(i, b0[i]) + T(1);
    for (int c = 0; c < dim; ++c)
      if (!(b1m(i, c) == T(0))) base(i, c) = base(i, c) + gamma * b1m(i, c);
  }

  ExpansionSides<T> out;
  out.lhs = base.pow(dim);

  out.zeta.resize(dim);
  out.eta.resize(dim);
  for (int j = 0; j < dim; ++j) {
    out.zeta[j] = zeta_coeff(j, N, gamma);
    out.eta[j] = eta_coeff(j, N, gamma);
  }

  Matrix<T> rhs = Matrix<T>::identity(dim);
  const Matrix<T> hp = hat_P<T>(N);
  const T two_gamma = gamma + gamma;
  for (int i = 0; i < dim; ++i)
    for (int c = 0; c < dim; ++c)
      if (!(hp(i, c) == T(0))) rhs(i, c) = rhs(i, c) + two_gamma;
  for (int j = 0; j < dim; ++j) {
    const bool zz = out.zeta[j] == T(0), ez = out.eta[j] == T(0);
    if (zz && ez) continue;
    const auto pj = b0.pow((2 * j) % dim);
    for (int i = 0; i < dim; ++i) {
      if (!ez) rhs(i, pj[i]) = rhs(i, pj[i]) + out.eta[j];
      if (!zz)
        for (int c = 0; c < dim; ++c)
          if (!(b2(pj[i], c) == T(0)))
            rhs(i, c) = rhs(i, c) + out.zeta[j] * b2(pj[i], c);
    }
  }
  out.rhs = std::move(rhs);
  out.equal = out.lhs == out.rhs;
  return out;
}

/// Float-mode verification of the expansion identity at gamma = d/N,
/// including the closed-form ceilings on the coefficient masses.
inline bool theorem_expansion_check(int N, double d) {
  const auto sides = theorem_expansion<double>(N, d / N);
  if (max_abs_diff(sides.lhs, sides.rhs) > 1e-12 * std::exp(2.0 * d))
    return false;
  double zeta_sum = 0.0, eta_sum = 0.0;
  for (double z : sides.zeta) zeta_sum += z;
  for (double e : sides.eta) eta_sum += e;
  const auto rep = contraction_constant(N, d, d);
  return zeta_sum >= 0 && eta_sum >= 0 &&
         zeta_sum <= rep.bound_zeta * (1.0 + 1e-12) + 1e-15 &&
         eta_sum <= rep.bound_eta * (1.0 + 1e-12) + 1e-15;
}

/// Largest l1 shrink factor of the recorded product over signed pairs
/// drawn inside one index class: all adjacent same-class pairs plus a few
/// random ones, each pushed through the fast banded stencil.
inline double measure_contraction(
    const std::vector<std::vector<double>>& c_steps,
    std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  if (c_steps.empty()) throw ConfigError("empty coefficient record");
  const int dim = detail::dim_from_coeffs(c_steps.front().size());
  const int N = dim / 2;
  const auto sets = index_sets(N);

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i + 1 < sets.iprime.size(); ++i)
    pairs.emplace_back(sets.iprime[i], sets.iprime[i + 1]);
  for (std::size_t i = 0; i + 1 < sets.idprime.size(); ++i)
    pairs.emplace_back(sets.idprime[i], sets.idprime[i + 1]);
  Rng rng(seed);
  for (int r = 0; r < 32; ++r) {
    const auto& cls = (r % 2 == 0) ? sets.iprime : sets.idprime;
    const int a = static_cast<int>(rng.below(cls.size()));
    int b = static_cast<int>(rng.below(cls.size() - 1));
    if (b >= a) ++b;
    pairs.emplace_back(cls[a], cls[b]);
  }

  double worst = 0.0;
  std::vector<double> x(dim);
  for (const auto& [i, j] : pairs) {
    std::fill(x.begin(), x.end(), 0.0);
    x[i] = 1.0;
    x[j] = -1.0;
    for (const auto& c : c_steps) x = apply_B(c, x);
    worst = std::max(worst, 0.5 * l1_norm(x));
  }
  return worst;
}

/// Same measurement for a coefficient vector held constant over a whole
/// cycle of 2N steps (or several cycles).
inline double measure_contraction(const std::vector<double>& c, int cycles = 1,
                                  std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  if (cycles < 1) throw ConfigError("need at least one cycle");
  const int dim = detail::dim_from_coeffs(c.size());
  return measure_contraction(
      std::vector<std::vector<double>>(static_cast<std::size_t>(dim) * cycles,
                                       c),
      seed);
}

/// Terminating hypergeometric form of the combined odd-order coefficient
/// gamma + zeta_{j,N}: gamma * 2F1(-j, -2N+j+1; 1; gamma^2) via the rising
/// factorial series, which stops on its own once a top parameter hits zero.
inline double hypergeometric_zeta(int j, int N, double gamma) {
  if (j < 0 || j > 2 * N - 1)
    throw ConfigError("offset j must lie in [0, 2N-1]");
  const double z = gamma * gamma;
  double term = 1.0, sum = 1.0;
  const int lmax = std::min(j, 2 * N - j - 1);
  for (int l = 0; l < lmax; ++l) {
    // (a)_{l+1} / (a)_l = a + l with a = -j and a = -2N+j+1
    term *= (-j + l) * (-2.0 * N + j + 1 + l) / ((1.0 + l) * (1.0 + l)) * z;
    sum += term;
  }
  return gamma * sum;
}

}  // namespace wavebal
