#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wavebal/wavebal.hpp"

// Final acceptance gate. Each criterion prints exactly one PASS/FAIL line
// with the measured numbers behind the verdict; the process exit code is
// the number of failed criteria.

using namespace wavebal;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      append("VIOLATED: " + msg);
    }
  }
  void note(const std::string& msg) { append(msg); }
  void append(const std::string& msg) {
    if (!detail.empty()) detail += "; ";
    detail += msg;
  }
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- 1 ----

// Brute enumeration of the order-k terms of (B0 + g B1)^(2N): walk all
// 2^(2N) factor choices, compose the permutations left to right, bucket
// the resulting 0/1 matrices by the number of B1 factors. Written from
// scratch here so the closed forms are checked against something that
// shares no code with them.
std::vector<int> row_map(const Permutation& p, int dim) {
  const auto m = p.to_matrix<long long>();
  std::vector<int> row(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (m(i, j) == 1) row[i] = j;
  return row;
}

std::vector<Matrix<long long>> enumerate_order_terms(int N) {
  const int dim = 2 * N;
  const auto b0 = row_map(perm_B0(N), dim);
  const auto b1 = row_map(perm_B1(N), dim);
  std::vector<Matrix<long long>> acc(dim + 1, Matrix<long long>(dim));
  std::vector<int> cur(dim), nxt(dim);
  for (unsigned long mask = 0; mask < (1ul << dim); ++mask) {
    for (int i = 0; i < dim; ++i) cur[i] = i;
    for (int pos = 0; pos < dim; ++pos) {
      const auto& f = ((mask >> pos) & 1u) ? b1 : b0;
      for (int i = 0; i < dim; ++i) nxt[i] = f[cur[i]];
      cur.swap(nxt);
    }
    auto& bucket = acc[static_cast<int>(std::popcount(mask))];
    for (int i = 0; i < dim; ++i) bucket(i, cur[i]) += 1;
  }
  return acc;
}

Check criterion1() {
  Check ck;
  for (int N : {2, 4, 6, 8}) {
    const std::string tag = " (N=" + std::to_string(N) + ")";
    const int dim = 2 * N;

    std::vector<Rational> c;
    for (int j = 1; j < N; ++j) c.emplace_back(j, 2 * j + 3);
    const auto B = build_B<Rational>(c);
    ck.require(B.det() == det_B_formula<Rational>(c),
               "determinant formula" + tag);

    Matrix<long long> cycle_sum(dim);
    const auto b0 = perm_B0(N);
    for (int j = 1; j <= N; ++j) {
      const auto m = b0.pow(2 * j).to_matrix<long long>();
      for (int r = 0; r < dim; ++r)
        for (int s = 0; s < dim; ++s) cycle_sum(r, s) += m(r, s);
    }
    ck.require(cycle_sum == hat_P<long long>(N), "even-power cycle sum" + tag);

    for (int ell = 0; ell <= dim; ++ell)
      ck.require(commutation_check(N, ell),
                 "commutation at shift " + std::to_string(ell) + tag);

    const auto brute = enumerate_order_terms(N);
    for (int k = 0; k <= dim; ++k)
      ck.require(brute[k] == S_k_closed_form<long long>(N, k),
                 "order term k=" + std::to_string(k) + tag);

    ck.require(theorem_expansion<Rational>(N, Rational(1, N)).equal,
               "cycle expansion identity" + tag);
  }
  if (ck.ok) ck.note("det, cycle sum, commutation, order terms, expansion all exact for N=2,4,6,8");
  return ck;
}

// ---------------------------------------------------------------- 2 ----

Check criterion2() {
  Check ck;
  std::string measured_list;
  for (int N : {16, 64, 256}) {
    const int dim = 2 * N;
    const std::vector<double> c(static_cast<std::size_t>(N - 1),
                                1.0 / (N + 1));
    // columns of the full-cycle matrix B(c)^(2N)
    std::vector<std::vector<double>> col(dim);
    for (int i = 0; i < dim; ++i) {
      std::vector<double> x(dim, 0.0);
      x[i] = 1.0;
      for (int s = 0; s < dim; ++s) x = apply_B(c, x);
      col[i] = std::move(x);
    }
    const auto sets = index_sets(N);
    double measured = 0.0;
    for (const auto* cls : {&sets.iprime, &sets.idprime}) {
      for (std::size_t a = 0; a < cls->size(); ++a) {
        for (std::size_t b = a + 1; b < cls->size(); ++b) {
          const auto& u = col[(*cls)[a]];
          const auto& v = col[(*cls)[b]];
          double s = 0.0;
          for (int r = 0; r < dim; ++r) s += std::abs(u[r] - v[r]);
          measured = std::max(measured, 0.5 * s);
        }
      }
    }
    const auto rep = contraction_constant(N, 1.0, 1.0);
    const std::string tag = " (N=" + std::to_string(N) + ")";
    ck.require(measured <= rep.CN, "pair image exceeds C_N" + tag);
    ck.require(std::abs(rep.CN - rep.Climit) <= 5.0 / N,
               "C_N too far from its limit" + tag);
    ck.require(std::abs(rep.Climit - (1.0 - 2.0 * std::exp(-2.0))) <= 1e-15,
               "limit constant drifted" + tag);
    measured_list += (measured_list.empty() ? "" : ", ") +
                     std::to_string(N) + ": " + num(measured) + " <= " +
                     num(rep.CN);
  }
  ck.note("max pair contraction vs C_N(1) at N = " + measured_list +
          "; limit 1-2e^-2 = " + num(1.0 - 2.0 * std::exp(-2.0)));
  return ck;
}

// ---------------------------------------------------------------- 3 ----

Check criterion3() {
  Check ck;
  const ProblemSpec base{
      damping_linear(1.0), coeff_constant(1.0),
      Profile{PiecewiseConstant({0.0, 0.5}, {0.5, -0.5}), 0.0},
      Profile{PiecewiseConstant::constant(0.0), 0.0}, 0.25};
  const auto spec = normalize(base);
  double plateau[3] = {0, 0, 0};
  double chat3 = 0.0;
  const int Ns[3] = {64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    const auto rep = run(spec, Ns[i], 60.0);
    plateau[i] = tail_mean(rep.sup_rho);
    chat3 = rep.consts.Chat3;
    ck.require(rep.consts.condition_holds, "damping condition flag");
    const std::string tag = " (N=" + std::to_string(Ns[i]) + ")";
    ck.require(rep.fitted_rate >= 0.95 * chat3,
               "fitted rate " + num(rep.fitted_rate) + " below 0.95*" +
                   num(chat3) + tag);
    if (Ns[i] == 256)
      ck.note("fitted rate " + num(rep.fitted_rate) + " >= " +
              num(0.95 * chat3) + " = 0.95*Chat3");
  }
  const double r01 = plateau[0] / plateau[1];
  const double r12 = plateau[1] / plateau[2];
  ck.require(r01 >= 1.5 && r01 <= 2.7,
             "plateau(64)/plateau(128) = " + num(r01) + " outside [1.5,2.7]");
  ck.require(r12 >= 1.5 && r12 <= 2.7,
             "plateau(128)/plateau(256) = " + num(r12) + " outside [1.5,2.7]");
  ck.note("stationary-distance floors " + num(plateau[0]) + ", " +
          num(plateau[1]) + ", " + num(plateau[2]) + " halve cleanly (" +
          num(r01) + ", " + num(r12) + ")");
  return ck;
}

// ---------------------------------------------------------------- 4 ----

Check criterion4() {
  Check ck;
  // cubic damping; data small enough that the derived exponents satisfy
  // the contraction condition
  const ProblemSpec spec{
      damping_cubic(1.0), coeff_constant(1.0),
      Profile{PiecewiseConstant({0.0, 0.5}, {0.1, -0.1}), 0.0},
      Profile{PiecewiseConstant({0.0, 0.5}, {0.06, -0.06}), 0.0}, 0.0};
  const int N = 128;
  auto st = init_grid(spec, N);
  ck.require(st.consts.condition_holds, "constants condition flag is false");
  const auto rep = contraction_constant(N, st.consts.d1, st.consts.d2);
  ck.require(rep.contractive, "C_N not below 1");

  initial_riemann_sweep(st);
  const double m0 = l1_norm(decompose_E_minus(extract_sigma(st).sigma).tilde);
  ck.require(m0 > 1e-8, "initial strengths too small to test");

  double worst = 0.0;
  for (int h = 1; h <= 10; ++h) {
    for (int s = 0; s < 2 * N; ++s) {
      step_half_crossing(st);
      step_node_interactions(st);
    }
    const double mh =
        l1_norm(decompose_E_minus(extract_sigma(st).sigma).tilde);
    const double bound = std::pow(rep.CN, h) * m0;
    worst = std::max(worst, mh / bound);
    ck.require(mh <= bound * (1.0 + 1e-10),
               "cycle " + std::to_string(h) + ": " + num(mh) + " > " +
                   num(bound));
  }
  ck.note("d1=" + num(st.consts.d1) + ", d2=" + num(st.consts.d2) +
          ", C_128=" + num(rep.CN) + ", worst measured/bound = " + num(worst));
  return ck;
}

// ---------------------------------------------------------------- 5 ----

PiecewiseConstant random_staircase(Rng& rng, int pieces, double lo,
                                   double hi) {
  std::vector<double> bp{0.0}, vals{rng.uniform(lo, hi)};
  for (int i = 1; i < pieces; ++i) {
    bp.push_back((i + 0.5 * (rng.uniform() - 0.5)) / pieces);
    vals.push_back(rng.uniform(lo, hi));
  }
  return PiecewiseConstant(bp, vals);
}

Check criterion5() {
  Check ck;
  const int N = 32, steps = 1680, seeds = 20;
  long long events = 0, containment_bad = 0, monotone_bad = 0, tv_bad = 0;
  double max_dot_e = 0.0, max_replay = 0.0;

  for (int seed = 1; seed <= seeds; ++seed) {
    Rng rng(9000 + seed);
    DampingLaw g;
    switch (seed % 4) {
      case 0: g = damping_linear(rng.uniform(0.5, 1.5)); break;
      case 1: g = damping_cubic(rng.uniform(0.5, 1.5)); break;
      case 2: g = damping_sinh(rng.uniform(0.3, 0.8)); break;
      default: g = damping_odd_power(seed % 8 < 4 ? 3.0 : 5.0); break;
    }
    SpaceCoefficient k;
    switch (seed % 3) {
      case 0: k = coeff_constant(rng.uniform(0.5, 1.5)); break;
      case 1:
        k = coeff_piecewise(PiecewiseConstant(
            {0.0, 0.3, 0.7}, {rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5),
                              rng.uniform(0.3, 1.5)}));
        break;
      default: k = coeff_affine(rng.uniform(0.5, 1.0), rng.uniform(0.0, 0.8));
    }
    const ProblemSpec spec{std::move(g), std::move(k),
                           Profile{random_staircase(rng, 5, -0.4, 0.4), 0.0},
                           Profile{random_staircase(rng, 4, -0.4, 0.4), 0.0},
                           0.0};
    auto st = init_grid(spec, N);
    initial_riemann_sweep(st);
    const double M = tv_bound(st);
    double prev_L = snapshot_diagnostics(st).L_pm;
    auto prev_sigma = extract_sigma(st).sigma;

    for (int s = 0; s < steps; ++s) {
      step_half_crossing(st);
      const auto c = step_node_interactions(st);
      events += static_cast<long long>(c.size());

      for (int j = 0; j < st.N; ++j) {
        for (const HalfState u : {st.left[j], st.middle(j), st.right[j]}) {
          if (u.fm < st.env_lo || u.fm > st.env_hi || u.fp < st.env_lo ||
              u.fp > st.env_hi)
            ++containment_bad;
        }
      }

      const auto d = snapshot_diagnostics(st);
      if (d.L_pm > prev_L * (1.0 + 1e-13) + 1e-13) ++monotone_bad;
      if (d.tv_rho > M * (1.0 + 1e-12) || d.tv_J > M * (1.0 + 1e-12))
        ++tv_bad;
      prev_L = d.L_pm;

      const auto sigma = extract_sigma(st).sigma;
      double dot = 0.0;
      for (double v : sigma) dot += v;
      max_dot_e = std::max(max_dot_e, std::abs(dot));

      const auto predicted = apply_B(c, prev_sigma);
      for (std::size_t i = 0; i < sigma.size(); ++i)
        max_replay = std::max(max_replay, std::abs(sigma[i] - predicted[i]));
      prev_sigma = sigma;
    }
  }

  ck.require(events >= 1000000,
             "only " + std::to_string(events) + " interaction events");
  ck.require(containment_bad == 0,
             std::to_string(containment_bad) + " states left the envelope");
  ck.require(monotone_bad == 0,
             std::to_string(monotone_bad) + " wave-mass increases");
  ck.require(tv_bad == 0, std::to_string(tv_bad) + " TV bound violations");
  ck.require(max_dot_e <= 1e-12,
             "sigma mass drifts to " + num(max_dot_e));
  ck.require(max_replay <= 1e-10,
             "matrix replay off by " + num(max_replay));
  ck.note(std::to_string(events) + " events over " + std::to_string(seeds) +
          " seeds; max |sigma.e| = " + num(max_dot_e) +
          ", max per-step replay error = " + num(max_replay));
  return ck;
}

// ---------------------------------------------------------------- 6 ----

Check criterion6() {
  Check ck;
  Rng rng(777);
  const int half_sizes[] = {2, 3, 5, 8, 16, 32, 64, 128, 256, 512};
  double max_rec = 0.0, max_l1 = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int dim = 2 * half_sizes[t % 10];
    std::vector<double> x(dim);
    double mean = 0.0;
    for (double& v : x) mean += (v = rng.uniform(-1.0, 1.0));
    mean /= dim;
    for (double& v : x) v -= mean;

    const auto pd = greedy_pair_decomposition(x);
    const auto rec = reconstruct_pairs(pd, dim);
    for (int i = 0; i < dim; ++i)
      max_rec = std::max(max_rec, std::abs(rec[i] - x[i]));
    const double l1 = l1_norm(x);
    max_l1 = std::max(max_l1,
                      std::abs(pair_l1(pd) - l1) / std::max(1.0, l1));
  }
  ck.require(max_rec <= 1e-12, "reconstruction error " + num(max_rec));
  ck.require(max_l1 <= 1e-12, "mass identity error " + num(max_l1));
  ck.note("1000 vectors, dims 4..1024: max reconstruction error " +
          num(max_rec) + ", max relative mass error " + num(max_l1));
  return ck;
}

// ---------------------------------------------------------------- 7 ----

Check criterion7() {
  Check ck;
  // 50-term reference sums in extended precision, written against the
  // series definitions directly
  auto f0_oracle = [](long double d) {
    long double sum = 0.0L, fact = 1.0L;
    for (int m = 1; m <= 50; ++m) {
      fact *= m;
      sum += std::pow(d, 2 * m) / (fact * fact);
    }
    return d * sum;
  };
  auto f1_oracle = [](long double d) {
    long double sum = 0.0L, mf = 1.0L;
    for (int m = 0; m <= 50; ++m) {
      if (m > 0) mf *= m;
      const long double m1f = mf * (m + 1);
      sum += std::pow(d, 2 * m + 1) / (mf * m1f);
    }
    return d * sum;
  };

  double max_f = 0.0;
  for (double d : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double o0 = static_cast<double>(f0_oracle(d));
    const double o1 = static_cast<double>(f1_oracle(d));
    max_f = std::max(max_f,
                     std::abs(bessel_f0(d) - o0) / std::max(1.0, std::abs(o0)));
    max_f = std::max(max_f,
                     std::abs(bessel_f1(d) - o1) / std::max(1.0, std::abs(o1)));
  }
  ck.require(max_f <= 1e-14, "series error " + num(max_f));

  double max_h = 0.0;
  for (int N : {2, 4, 8, 16}) {
    for (double gamma : {0.05, 0.1, 0.25, 0.4}) {
      for (int j = 0; j < 2 * N; ++j) {
        const double a = hypergeometric_zeta(j, N, gamma);
        const double b = gamma + zeta_coeff<double>(j, N, gamma);
        max_h = std::max(max_h, std::abs(a - b) / std::max(1.0, std::abs(b)));
      }
    }
  }
  ck.require(max_h <= 1e-13, "hypergeometric mismatch " + num(max_h));
  ck.note("series vs 50-term oracle: " + num(max_f) +
          "; hypergeometric vs binomial grid: " + num(max_h));
  return ck;
}

// ---------------------------------------------------------------- 8 ----

Check criterion8() {
  Check ck;
  ck.note("informational: infinite-N / infinite-time asymptotics are out of "
          "desk scope; the contraction and decay mechanisms behind them are "
          "exercised by criteria 2-4");
  return ck;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    Check (*fn)();
    double budget_s;  // 0 = no runtime cap
  };
  const Entry entries[] = {
      {1, criterion1, 10.0}, {2, criterion2, 30.0}, {3, criterion3, 120.0},
      {4, criterion4, 0.0},  {5, criterion5, 0.0},  {6, criterion6, 0.0},
      {7, criterion7, 0.0},  {8, criterion8, 0.0},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Check ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ck = e.fn();
    } catch (const std::exception& ex) {
      ck.ok = false;
      ck.detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (e.budget_s > 0.0 && secs > e.budget_s) {
      ck.ok = false;
      ck.append("runtime " + num(secs) + "s over the " + num(e.budget_s) +
                "s budget");
    }
    if (!ck.ok) ++failures;
    std::printf("%s criterion %d: %s [%.2fs]\n", ck.ok ? "PASS" : "FAIL",
                e.id, ck.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures;
}
