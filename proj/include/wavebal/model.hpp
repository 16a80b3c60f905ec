#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wavebal/errors.hpp"
#include "wavebal/piecewise.hpp"
#include "wavebal/quadrature.hpp"

namespace wavebal {

/// Damping nonlinearity g with g(0) = 0 and g' > 0 (except for the odd_power
/// family, whose derivative vanishes at the origin; decay constants degenerate
/// there and compute_constants reports that honestly).
struct DampingLaw {
  std::string family;
  std::function<double(double)> g;
  std::function<double(double)> gprime;
};

inline DampingLaw damping_linear(double c) {
  if (!(c > 0)) throw ConfigError("linear damping needs slope > 0");
  return {"linear", [c](double J) { return c * J; },
          [c](double) { return c; }};
}

/// g(J) = J + alpha J^3, increasing for alpha >= 0.
inline DampingLaw damping_cubic(double alpha) {
  if (!(alpha >= 0)) throw ConfigError("cubic damping needs alpha >= 0");
  return {"cubic", [alpha](double J) { return J + alpha * J * J * J; },
          [alpha](double J) { return 1.0 + 3.0 * alpha * J * J; }};
}

/// g(J) = sinh(beta J) / beta, normalized so g'(0) = 1.
inline DampingLaw damping_sinh(double beta) {
  if (!(beta > 0)) throw ConfigError("sinh damping needs beta > 0");
  return {"sinh", [beta](double J) { return std::sinh(beta * J) / beta; },
          [beta](double J) { return std::cosh(beta * J); }};
}

/// g(J) = |J|^(p-1) J, p > 1: strictly increasing but g'(0) = 0.
inline DampingLaw damping_odd_power(double p) {
  if (!(p > 1)) throw ConfigError("odd_power damping needs exponent > 1");
  return {"odd_power",
          [p](double J) { return std::pow(std::abs(J), p - 1.0) * J; },
          [p](double J) { return p * std::pow(std::abs(J), p - 1.0); }};
}

/// w -> g(Jb + w) - g(Jb); exact zero at w = 0 by construction.
inline DampingLaw shift_damping(const DampingLaw& base, double Jb) {
  auto g = base.g;
  auto gp = base.gprime;
  return {"shifted(" + base.family + ")",
          [g, Jb](double w) { return g(Jb + w) - g(Jb); },
          [gp, Jb](double w) { return gp(Jb + w); }};
}

/// Nonnegative damping coefficient k on [0, 1] together with its
/// antiderivative a(x) = int_0^x k, its range, and its total mass.
struct SpaceCoefficient {
  std::string family;
  std::function<double(double)> k;
  std::function<double(double)> antiderivative;
  double lower = 0.0;       // ess inf k
  double upper = 0.0;       // ess sup k
  double total_mass = 0.0;  // a(1) = ||k||_L1
};

inline SpaceCoefficient coeff_constant(double v) {
  if (!(v >= 0)) throw ConfigError("damping coefficient must be nonnegative");
  return {"constant", [v](double) { return v; }, [v](double x) { return v * x; },
          v, v, v};
}

inline SpaceCoefficient coeff_affine(double a0, double slope) {
  const double at0 = a0, at1 = a0 + slope;
  if (!(at0 >= 0) || !(at1 >= 0))
    throw ConfigError("affine damping coefficient must stay nonnegative on [0,1]");
  return {"affine",
          [a0, slope](double x) { return a0 + slope * x; },
          [a0, slope](double x) { return a0 * x + 0.5 * slope * x * x; },
          std::min(at0, at1), std::max(at0, at1), at0 + 0.5 * slope};
}

inline SpaceCoefficient coeff_piecewise(PiecewiseConstant pc) {
  if (pc.min_value() < 0)
    throw ConfigError("piecewise damping coefficient must be nonnegative");
  // Cumulative masses at the breakpoints make a(x) a closed form.
  const auto& bp = pc.breakpoints();
  const auto& vals = pc.values();
  std::vector<double> cum(bp.size(), 0.0);
  for (std::size_t i = 1; i < bp.size(); ++i)
    cum[i] = cum[i - 1] + vals[i - 1] * (bp[i] - bp[i - 1]);
  const double mass = cum.back() + vals.back() * (1.0 - bp.back());
  auto anti = [pc, bp, cum, vals](double x) {
    std::size_t lo = 0, hi = bp.size();
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (bp[mid] <= x)
        lo = mid;
      else
        hi = mid;
    }
    return cum[lo] + vals[lo] * (x - bp[lo]);
  };
  return {"piecewise", [pc](double x) { return pc.at(x); }, anti,
          pc.min_value(), pc.max_value(), mass};
}

/// base + amp * exp(-((x - center)/width)^2); antiderivative by quadrature.
inline SpaceCoefficient coeff_bump(double base, double amp, double center,
                                   double width) {
  if (!(width > 0)) throw ConfigError("bump width must be positive");
  if (!(base >= 0) || !(base + amp >= 0) || !(amp >= -base))
    throw ConfigError("bump coefficient must stay nonnegative");
  auto k = [base, amp, center, width](double x) {
    const double t = (x - center) / width;
    return base + amp * std::exp(-t * t);
  };
  auto anti = [k](double x) { return integrate(k, 0.0, x, 1e-12); };
  // The exponential is monotone away from the center, so the range over
  // [0, 1] is attained at {0, 1, center clamped into [0, 1]}.
  double lo = k(0.0), hi = k(0.0);
  for (double x : {1.0, std::clamp(center, 0.0, 1.0)}) {
    lo = std::min(lo, k(x));
    hi = std::max(hi, k(x));
  }
  return {"bump", k, anti, lo, hi, integrate(k, 0.0, 1.0, 1e-12)};
}

/// Initial-datum profile: a piecewise-constant part plus an optional multiple
/// of a(x) = int_0^x k. The smooth part appears when normalization folds the
/// stationary profile into the datum; raw user input always has a_scale = 0.
struct Profile {
  PiecewiseConstant pc;
  double a_scale = 0.0;
};

struct ProblemSpec {
  DampingLaw g;
  SpaceCoefficient k;
  Profile rho0;
  Profile J0;
  double Jb = 0.0;

  double rho0_at(double x) const {
    return rho0.pc.at(x) + (rho0.a_scale != 0.0 ? rho0.a_scale * k.antiderivative(x) : 0.0);
  }
  double J0_at(double x) const {
    return J0.pc.at(x) + (J0.a_scale != 0.0 ? J0.a_scale * k.antiderivative(x) : 0.0);
  }
  /// Diagonal initial data, sampled right-continuously.
  double f0_minus(double x) const { return 0.5 * (rho0_at(x) - J0_at(x)); }
  double f0_plus(double x) const { return 0.5 * (rho0_at(x) + J0_at(x)); }
};

/// The unique stationary solution compatible with the boundary flux and the
/// initial mass: J = Jb, rho(x) = C - 2 g(Jb) a(x).
struct StationarySolution {
  double Jtilde = 0.0;
  double C = 0.0;
  double g_at_Jb = 0.0;
  std::function<double(double)> a;

  double rho(double x) const { return C - 2.0 * g_at_Jb * a(x); }
};

inline double profile_integral(const Profile& p, const SpaceCoefficient& k) {
  double v = p.pc.integral();
  if (p.a_scale != 0.0)
    v += p.a_scale * integrate(k.antiderivative, 0.0, 1.0, 1e-12);
  return v;
}

inline StationarySolution stationary_solution(const ProblemSpec& spec) {
  StationarySolution st;
  st.Jtilde = spec.Jb;
  st.g_at_Jb = spec.g.g(spec.Jb);
  st.a = spec.k.antiderivative;
  // Mass balance fixes the constant: int rho0 = int rho_stationary, i.e.
  // C = int rho0 + 2 g(Jb) int_0^1 k(y)(1-y) dy. The weighted moment equals
  // int_0^1 a(y) dy after integrating by parts, and a is continuous even
  // when k jumps, which keeps the quadrature honest.
  const double weighted = integrate(spec.k.antiderivative, 0.0, 1.0, 1e-12);
  st.C = profile_integral(spec.rho0, spec.k) + 2.0 * st.g_at_Jb * weighted;
  return st;
}

/// Rewrites the problem in the variables (rho - rho_stationary, J - Jb): the
/// boundary flux becomes 0, the damping becomes w -> g(Jb + w) - g(Jb), and
/// the new rho datum has zero mean. Idempotent on already-normalized input.
inline ProblemSpec normalize(const ProblemSpec& spec) {
  const StationarySolution st = stationary_solution(spec);
  ProblemSpec out = spec;
  out.Jb = 0.0;
  const bool g_fixes_zero = spec.Jb == 0.0 && spec.g.g(0.0) == 0.0;
  out.g = g_fixes_zero ? spec.g : shift_damping(spec.g, spec.Jb);
  out.rho0.pc = spec.rho0.pc.shifted(-st.C);
  out.rho0.a_scale = spec.rho0.a_scale + 2.0 * st.g_at_Jb;
  out.J0.pc = spec.J0.pc.shifted(-spec.Jb);
  out.J0.a_scale = spec.J0.a_scale;
  return out;
}

struct Interval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {

/// Max of f over [lo, hi]: coarse scan plus golden-section refinement of the
/// best bracket. Good for the smooth monotone-ish derivative profiles the
/// registry families produce; 1024 samples pin the right bracket easily.
inline double scan_max(const std::function<double(double)>& f, double lo,
                       double hi, double rel_tol = 1e-10) {
  if (hi <= lo) return f(lo);
  constexpr int kSamples = 1024;
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < kSamples; ++i) {
    const double x = lo + (hi - lo) * i / (kSamples - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / (kSamples - 1);
  double b = lo + (hi - lo) * std::min(kSamples - 1, best_i + 1) / (kSamples - 1);
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace detail

/// Everything the decay theory derives from a J-range: bounds on g', the
/// contraction exponents d1, d2, the limit constant and the decay rate.
struct Constants {
  Interval DJ;
  double C0 = 0.0;           // max |g| over DJ
  double C1 = 0.0;           // sup g' over DJ
  double gprime_min = 0.0;   // inf g' over DJ
  double d1 = 0.0;           // k_lower * inf g'
  double d2 = 0.0;           // k_upper * sup g'
  double Cd1d2 = 0.0;        // e^{-2 d1} (e^{2 d2} - 2 d2)
  double Chat3 = 0.0;        // 0.5 |log Cd1d2|, meaningful iff condition_holds
  bool condition_holds = false;  // e^{2 d2} - 2 d2 < e^{2 d1}
  bool k_has_mass = false;       // ||k||_L1 > 0
  bool k_uniformly_positive = false;
};

inline Constants compute_constants(const ProblemSpec& spec, Interval DJ) {
  if (!(DJ.hi >= DJ.lo)) throw ConfigError("empty J-range");
  Constants c;
  c.DJ = DJ;
  c.C0 = std::max(spec.g.g(DJ.hi), -spec.g.g(DJ.lo));
  c.C0 = std::max(c.C0, 0.0);
  c.C1 = detail::scan_max(spec.g.gprime, DJ.lo, DJ.hi);
  c.gprime_min =
      -detail::scan_max([&spec](double J) { return -spec.g.gprime(J); }, DJ.lo,
                        DJ.hi);
  c.d1 = spec.k.lower * c.gprime_min;
  c.d2 = spec.k.upper * c.C1;
  c.Cd1d2 = std::exp(-2.0 * c.d1) * (std::exp(2.0 * c.d2) - 2.0 * c.d2);
  c.Chat3 = 0.5 * std::abs(std::log(c.Cd1d2));
  c.condition_holds =
      std::exp(2.0 * c.d2) - 2.0 * c.d2 < std::exp(2.0 * c.d1);
  c.k_has_mass = spec.k.total_mass > 0.0;
  c.k_uniformly_positive = spec.k.lower > 0.0;
  return c;
}

}  // namespace wavebal
