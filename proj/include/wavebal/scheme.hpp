#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wavebal/errors.hpp"
#include "wavebal/model.hpp"
#include "wavebal/riemann.hpp"

namespace wavebal {

/// Synchronous wave-front state. Every cell [x_j, x_{j+1}] carries a left
/// half state and a right half state; the state between the cell's two
/// moving waves is implied by continuity of the diagonal components and is
/// never stored:
///
///   node phase      [ L_j | +1-> | M_j | <-(-1) | R_j ]  M_j  = (L.fm, R.fp)
///   midpoint phase  [ L_j | <-(-1) | M'_j | +1-> | R_j ]  M'_j = (R.fm, L.fp)
///
/// Both waves travel at unit speed and Delta t = Delta x, so crossings and
/// node hits alternate on a fixed half-step clock. The state arrays only
/// change when nodes fire; a crossing merely advances the clock, because the
/// post-interaction middle state equals the previous midpoint state
/// component for component.
struct GridState {
  ProblemSpec spec;  // normalized problem this grid discretizes
  int N = 0;
  long long half_steps = 0;  // time = half_steps / (2N)
  bool swept = false;        // initial node problems solved
  std::vector<HalfState> left, right;  // size N each
  std::vector<double> delta;           // N-1 interior node jumps
  std::vector<double> a_nodes;         // N+1 samples of the antiderivative
  double env_lo = 0.0, env_hi = 0.0;   // invariant square of the sampled data
  Constants consts;

  double dx() const { return 1.0 / N; }
  double time() const { return static_cast<double>(half_steps) / (2.0 * N); }
  bool midpoint_phase() const { return half_steps % 2 != 0; }

  HalfState middle(int j) const {
    return midpoint_phase() ? HalfState{right[j].fm, left[j].fp}
                            : HalfState{left[j].fm, right[j].fp};
  }
};

inline GridState init_grid(const ProblemSpec& spec, int N) {
  if (N < 2 || N % 2 != 0)
    throw ConfigError("cell count must be even and >= 2, got " +
                      std::to_string(N));
  GridState st;
  st.spec = spec;
  st.N = N;
  st.left.resize(N);
  st.right.resize(N);
  st.a_nodes.resize(N + 1);
  for (int j = 0; j <= N; ++j)
    st.a_nodes[j] = spec.k.antiderivative(static_cast<double>(j) / N);
  st.delta.resize(N - 1);
  for (int j = 1; j < N; ++j) {
    st.delta[j - 1] = st.a_nodes[j] - st.a_nodes[j - 1];
    if (st.delta[j - 1] < 0)
      throw ConfigError("damping coefficient integrates to a negative jump");
  }

  // Right-continuous sampling at the cell's left edge fills the whole cell.
  st.env_lo = std::numeric_limits<double>::infinity();
  st.env_hi = -st.env_lo;
  for (int j = 0; j < N; ++j) {
    const double x = static_cast<double>(j) / N;
    const HalfState u{spec.f0_minus(x), spec.f0_plus(x)};
    if (!std::isfinite(u.fm) || !std::isfinite(u.fp))
      throw NumericalError("initial datum is not finite at x = " +
                           std::to_string(x));
    st.left[j] = u;
    st.right[j] = u;
    st.env_lo = std::min({st.env_lo, u.fm, u.fp});
    st.env_hi = std::max({st.env_hi, u.fm, u.fp});
  }

  st.consts = compute_constants(
      spec, Interval{st.env_lo - st.env_hi, st.env_hi - st.env_lo});
  for (int j = 1; j < N; ++j) {
    if (st.consts.C1 * st.delta[j - 1] >= 1.0)
      throw ConfigError(
          "node " + std::to_string(j) +
          " carries too much damping mass for this resolution; refine the "
          "grid");
  }
  return st;
}

namespace detail {

inline void check_envelope(const GridState& st, const HalfState& u, int node) {
  if (u.fm < st.env_lo || u.fm > st.env_hi || u.fp < st.env_lo ||
      u.fp > st.env_hi || !std::isfinite(u.fm) || !std::isfinite(u.fp))
    throw NumericalError("invariant square violated at node " +
                         std::to_string(node));
}

/// Shared core of the initial sweep and the recurring node step: solve all
/// node problems against the states currently adjacent to the nodes, commit
/// the outgoing half states, and report the mixing coefficients.
inline std::vector<double> fire_nodes(GridState& st,
                                      const std::vector<HalfState>& adj,
                                      bool record_c) {
  const int N = st.N;
  std::vector<double> c_rec(record_c ? N - 1 : 0);

  // incoming sizes, needed both for the coefficients and their fallback
  std::vector<double> sp_in, sm_in;
  if (record_c) {
    sp_in.resize(N);
    sm_in.resize(N);
    for (int j = 0; j < N; ++j) {
      sp_in[j] = st.right[j].fp - st.left[j].fp;
      sm_in[j] = st.left[j].fm - st.right[j].fm;
    }
  }

  std::vector<HalfState> new_left(N), new_right(N);
  const auto wl = solve_boundary_left(adj[0]);
  new_left[0] = wl.post;
  const auto wr = solve_boundary_right(adj[N - 1]);
  new_right[N - 1] = wr.post;
  for (int j = 1; j < N; ++j) {
    const auto fan =
        solve_riemann(st.spec.g, adj[j - 1], adj[j], st.delta[j - 1]);
    new_right[j - 1] = fan.star_l;
    new_left[j] = fan.star_r;
    detail::check_envelope(st, fan.star_l, j);
    detail::check_envelope(st, fan.star_r, j);
    if (record_c)
      c_rec[j - 1] = interaction_coefficient(
          sp_in[j - 1], sm_in[j], fan.sigma_p1, fan.sigma_m1, st.spec.g,
          fan.Jstar, st.delta[j - 1], j);
  }
  st.left = std::move(new_left);
  st.right = std::move(new_right);
  return c_rec;
}

}  // namespace detail

/// Solves the time-zero node problems between the sampled cells and the two
/// wall reflections, producing the first 2N waves.
inline void initial_riemann_sweep(GridState& st) {
  if (st.swept || st.half_steps != 0)
    throw ConfigError("initial sweep must run exactly once, at time zero");
  std::vector<HalfState> adj(st.left);  // whole cells are constant at t = 0-
  detail::fire_nodes(st, adj, /*record_c=*/false);
  st.swept = true;
}

/// The two waves inside each cell cross at the midpoint: state arrays are
/// untouched, the implicit middle switches branch, time gains half a step.
inline void step_half_crossing(GridState& st) {
  if (!st.swept) throw ConfigError("cannot step before the initial sweep");
  if (st.midpoint_phase())
    throw ConfigError("crossing step expects the node phase");
  ++st.half_steps;
}

/// Waves adjacent to the nodes interact; returns the mixing coefficients
/// c_1..c_{N-1} recovered from the incoming and outgoing sizes.
inline std::vector<double> step_node_interactions(GridState& st) {
  if (!st.swept) throw ConfigError("cannot step before the initial sweep");
  if (!st.midpoint_phase())
    throw ConfigError("node step expects the midpoint phase");
  std::vector<HalfState> adj(st.N);
  for (int j = 0; j < st.N; ++j) adj[j] = st.middle(j);
  auto c = detail::fire_nodes(st, adj, /*record_c=*/true);
  ++st.half_steps;
  return c;
}

/// Wave sizes ordered by position. In the node phase cell j contributes
/// (sigma_plus, sigma_minus) anchored at its two nodes; in the midpoint
/// phase the pair is swapped and both sit at the cell midpoint.
struct StrengthVector {
  std::vector<double> sigma;
  std::vector<double> positions;
  double time = 0.0;
};

inline StrengthVector extract_sigma(const GridState& st) {
  if (!st.swept)
    throw ConfigError("no waves exist before the initial sweep");
  StrengthVector sv;
  sv.time = st.time();
  sv.sigma.resize(2 * st.N);
  sv.positions.resize(2 * st.N);
  double sum = 0.0, mass = 0.0;
  for (int j = 0; j < st.N; ++j) {
    const double sp = st.right[j].fp - st.left[j].fp;
    const double sm = st.left[j].fm - st.right[j].fm;
    if (st.midpoint_phase()) {
      const double mid = (j + 0.5) / st.N;
      sv.sigma[2 * j] = sm;
      sv.sigma[2 * j + 1] = sp;
      sv.positions[2 * j] = mid;
      sv.positions[2 * j + 1] = mid;
    } else {
      sv.sigma[2 * j] = sp;
      sv.sigma[2 * j + 1] = sm;
      sv.positions[2 * j] = static_cast<double>(j) / st.N;
      sv.positions[2 * j + 1] = static_cast<double>(j + 1) / st.N;
    }
    sum += sp + sm;
    mass += std::abs(sp) + std::abs(sm);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, mass))
    throw NumericalError("wave sizes lost the zero-sum property");
  return sv;
}

/// One piecewise-constant snapshot of the diagonal fields at the state's own
/// instant: pieces are [x_i, x_{i+1}) with the given values.
struct ProfilePiece {
  double x0, x1;
  double fm, fp;
};

inline std::vector<ProfilePiece> sample_profile(const GridState& st) {
  std::vector<ProfilePiece> out;
  out.reserve(2 * st.N);
  for (int j = 0; j < st.N; ++j) {
    const double a = static_cast<double>(j) / st.N;
    const double b = static_cast<double>(j + 1) / st.N;
    if (st.midpoint_phase()) {
      const double mid = (j + 0.5) / st.N;
      out.push_back({a, mid, st.left[j].fm, st.left[j].fp});
      out.push_back({mid, b, st.right[j].fm, st.right[j].fp});
    } else {
      const auto m = st.middle(j);
      out.push_back({a, b, m.fm, m.fp});
    }
  }
  return out;
}

/// Integral of |f-_A - f-_B| + |f+_A - f+_B| over [0, 1] for two snapshots,
/// exact on the merged breakpoint grid.
inline double l1_distance(const std::vector<ProfilePiece>& A,
                          const std::vector<ProfilePiece>& B) {
  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  double x = 0.0;
  while (ia < A.size() && ib < B.size()) {
    const double next = std::min(A[ia].x1, B[ib].x1);
    if (next > x)
      total += (next - x) * (std::abs(A[ia].fm - B[ib].fm) +
                             std::abs(A[ia].fp - B[ib].fp));
    x = next;
    if (A[ia].x1 <= x) ++ia;
    if (ib < B.size() && B[ib].x1 <= x) ++ib;
  }
  return total;
}

/// L1 distance between two states of the same run divided by the time gap.
inline double lipschitz_ratio(const GridState& a, const GridState& b) {
  const double dt = std::abs(a.time() - b.time());
  if (dt == 0.0) return 0.0;
  return l1_distance(sample_profile(a), sample_profile(b)) / dt;
}

/// Uniform bound on the L1 Lipschitz constant and the total variation of
/// the diagonal fields along the whole evolution.
inline double tv_bound(const GridState& st) {
  const auto& s = st.spec;
  auto profile_tv = [&s](const Profile& p) {
    return p.pc.total_variation() + std::abs(p.a_scale) * s.k.total_mass;
  };
  // TV of f+- at time zero, from the datum profiles
  const double tv_fp =
      0.5 * (profile_tv(s.rho0) + profile_tv(s.J0));
  const double tv_fm = tv_fp;  // same bound for both diagonal fields
  // breakpoints live strictly inside (0, 1), so x = 1 reads the last piece
  const double j_left = std::abs(s.J0_at(0.0));
  const double j_right = std::abs(s.J0_at(1.0));
  return tv_fp + tv_fm + j_left + j_right +
         4.0 * st.consts.C0 * s.k.total_mass;
}

/// Spot diagnostics of one state: distances to the (zero) stationary
/// solution, total variations, and the two wave functionals.
struct Diagnostics {
  double sup_J = 0.0;
  double sup_rho = 0.0;
  double tv_J = 0.0;
  double tv_rho = 0.0;
  double L_pm = 0.0;  // total size mass of the moving waves
  double L_0 = 0.0;   // damping mass seen by the standing jumps
};

inline Diagnostics snapshot_diagnostics(const GridState& st) {
  Diagnostics d;
  // every constant region of the current window, spatial order
  std::vector<HalfState> states;
  states.reserve(3 * st.N);
  for (int j = 0; j < st.N; ++j) {
    states.push_back(st.left[j]);
    states.push_back(st.middle(j));
    states.push_back(st.right[j]);
  }
  for (const auto& u : states) {
    d.sup_J = std::max(d.sup_J, std::abs(u.J()));
    d.sup_rho = std::max(d.sup_rho, std::abs(u.rho()));
  }
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    d.tv_J += std::abs(states[i + 1].J() - states[i].J());
    d.tv_rho += std::abs(states[i + 1].rho() - states[i].rho());
  }
  for (int j = 0; j < st.N; ++j) {
    const double sp = st.right[j].fp - st.left[j].fp;
    const double sm = st.left[j].fm - st.right[j].fm;
    d.L_pm += std::abs(sp) + std::abs(sm);
  }
  for (int j = 1; j < st.N; ++j)
    d.L_0 += 0.5 * std::abs(st.left[j].rho() - st.right[j - 1].rho());
  return d;
}

struct DecayReport {
  int N = 0;
  double T_final = 0.0;
  std::vector<double> times;
  std::vector<double> sup_J, sup_rho, tv_J, tv_rho, L_pm, L_0;
  std::vector<double> c_min, c_max;  // recorded mixing range per step
  double plateau = 0.0;
  double fitted_rate = 0.0;
  Constants consts;
  double tv_bound_M = 0.0;
};

namespace detail {

/// plateau = mean of the last tenth; rate = least-squares slope of
/// ln(sup_J - plateau) over the middle [10%, 90%] of the decaying phase
/// (samples above 10x plateau).
inline void fit_decay(DecayReport& rep) {
  const auto& y = rep.sup_J;
  const std::size_t n = y.size();
  if (n < 10) return;
  std::size_t tail = std::max<std::size_t>(1, n / 10);
  double acc = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) acc += y[i];
  rep.plateau = acc / tail;

  std::vector<std::size_t> decaying;
  for (std::size_t i = 0; i < n; ++i)
    if (y[i] > 10.0 * rep.plateau && y[i] > rep.plateau) decaying.push_back(i);
  if (decaying.size() < 4) return;
  const std::size_t lo = decaying.size() / 10;
  const std::size_t hi = decaying.size() - decaying.size() / 10;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t idx = lo; idx < hi; ++idx) {
    const std::size_t i = decaying[idx];
    const double excess = y[i] - rep.plateau;
    if (excess <= 0) continue;
    const double t = rep.times[i], v = std::log(excess);
    sx += t;
    sy += v;
    sxx += t * t;
    sxy += t * v;
    count += 1;
  }
  if (count < 2) return;
  const double denom = count * sxx - sx * sx;
  if (denom <= 0) return;
  rep.fitted_rate = -(count * sxy - sx * sy) / denom;
}

}  // namespace detail

inline void record(DecayReport& rep, const GridState& st) {
  const auto d = snapshot_diagnostics(st);
  rep.times.push_back(st.time());
  rep.sup_J.push_back(d.sup_J);
  rep.sup_rho.push_back(d.sup_rho);
  rep.tv_J.push_back(d.tv_J);
  rep.tv_rho.push_back(d.tv_rho);
  rep.L_pm.push_back(d.L_pm);
  rep.L_0.push_back(d.L_0);
}

/// Full simulation: initial sweep, then crossing/interaction pairs until
/// time reaches T_final, with diagnostics at every node instant.
inline DecayReport run(const ProblemSpec& spec, int N, double T_final) {
  if (!(T_final > 0)) throw ConfigError("final time must be positive");
  GridState st = init_grid(spec, N);
  initial_riemann_sweep(st);

  DecayReport rep;
  rep.N = N;
  rep.T_final = T_final;
  rep.consts = st.consts;
  rep.tv_bound_M = tv_bound(st);
  record(rep, st);

  const long long steps =
      static_cast<long long>(std::ceil(T_final * N - 1e-9));
  for (long long s = 0; s < steps; ++s) {
    step_half_crossing(st);
    const auto c = step_node_interactions(st);
    if (!c.empty()) {
      rep.c_min.push_back(*std::min_element(c.begin(), c.end()));
      rep.c_max.push_back(*std::max_element(c.begin(), c.end()));
    }
    record(rep, st);
  }
  detail::fit_decay(rep);
  return rep;
}

}  // namespace wavebal
