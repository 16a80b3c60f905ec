#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "wavebal/errors.hpp"
#include "wavebal/model.hpp"

namespace wavebal {

/// State in diagonal variables: f- = (rho - J)/2, f+ = (rho + J)/2.
struct HalfState {
  double fm = 0.0;
  double fp = 0.0;

  double rho() const { return fm + fp; }
  double J() const { return fp - fm; }
};

/// Solution of the node problem with left state ul, right state ur and a
/// standing discontinuity of antiderivative jump delta between them.
/// Wave order, left to right:
///   ul | -1 wave | star_l | 0 wave | star_r | +1 wave | ur
/// f+ is continuous across the -1 wave, f- across the +1 wave, and J is
/// continuous across the 0 wave (J = Jstar there) while rho drops by
/// 2 g(Jstar) delta.
struct RiemannFan {
  HalfState star_l;
  HalfState star_r;
  double Jstar = 0.0;
  double g_at_Jstar = 0.0;
  double rho_jump = 0.0;   // star_r.rho() - star_l.rho() = -2 g(Jstar) delta
  double sigma_m1 = 0.0;   // size of the -1 wave: Jstar - ul.J()
  double sigma_p1 = 0.0;   // size of the +1 wave: ur.J() - Jstar
  int iterations = 0;
};

/// Bracket for Jstar that simultaneously pins the root of
/// phi(J) = J + delta g(J) - (ul.fp - ur.fm) and forces both star states
/// into the componentwise envelope [m, M] of the four input components.
inline Interval riemann_bracket(HalfState ul, HalfState ur) {
  const double m = std::min({ul.fm, ul.fp, ur.fm, ur.fp});
  const double M = std::max({ul.fm, ul.fp, ur.fm, ur.fp});
  Interval b;
  b.lo = std::max(ul.fp - M, m - ur.fm);
  b.hi = std::min(ul.fp - m, M - ur.fm);
  return b;
}

inline RiemannFan solve_riemann(const DampingLaw& g, HalfState ul,
                                HalfState ur, double delta) {
  if (!(delta >= 0) || !std::isfinite(delta))
    throw NumericalError("riemann solve needs finite delta >= 0, got " +
                         std::to_string(delta));
  if (!std::isfinite(ul.fm) || !std::isfinite(ul.fp) ||
      !std::isfinite(ur.fm) || !std::isfinite(ur.fp))
    throw NumericalError("riemann solve got a non-finite state");

  const double rhs = ul.fp - ur.fm;
  const Interval br = riemann_bracket(ul, ur);
  double lo = br.lo, hi = br.hi;

  RiemannFan fan;
  double J = 0.0;
  if (delta == 0.0) {
    J = rhs;  // phi is the identity shift; rhs already lies in the bracket
  } else {
    auto phi = [&](double x) { return x + delta * g.g(x) - rhs; };
    const double tol = 1e-14 * std::max(1.0, std::abs(rhs));
    // phi is strictly increasing and straddles zero on the bracket in real
    // arithmetic; allow last-ulp noise in the float evaluation before
    // declaring the setup broken.
    if (phi(lo) > tol || phi(hi) < -tol)
      throw NumericalError("riemann bracket failed to straddle the root");
    // Safeguarded Newton, falling back to bisection whenever a step leaves
    // the bracket.
    J = std::clamp(rhs / (1.0 + delta * g.gprime(0.0)), lo, hi);
    for (int it = 0; it < 200; ++it) {
      fan.iterations = it + 1;
      const double fJ = phi(J);
      if (std::abs(fJ) <= tol) break;
      if (fJ > 0)
        hi = J;
      else
        lo = J;
      const double slope = 1.0 + delta * g.gprime(J);
      double next = J - fJ / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == J) break;  // bracket exhausted at float resolution
      J = next;
    }
    if (std::abs(phi(J)) > 1e-10 * std::max(1.0, std::abs(rhs)) * (1.0 + delta))
      throw NumericalError("riemann newton iteration did not converge");
  }

  J = std::clamp(J, br.lo, br.hi);
  fan.Jstar = J;
  fan.g_at_Jstar = g.g(J);
  fan.rho_jump = -2.0 * fan.g_at_Jstar * delta;
  fan.sigma_m1 = J - ul.J();
  fan.sigma_p1 = ur.J() - J;

  // Componentwise clamp into the input envelope. The bracket already puts
  // the real-arithmetic values inside; this absorbs the last-ulp rounding
  // of the subtractions so containment holds with no tolerance at all.
  const double m = std::min({ul.fm, ul.fp, ur.fm, ur.fp});
  const double M = std::max({ul.fm, ul.fp, ur.fm, ur.fp});
  fan.star_l = {std::clamp(ul.fp - J, m, M), ul.fp};
  fan.star_r = {ur.fm, std::clamp(ur.fm + J, m, M)};
  return fan;
}

/// Reflection at x = 0 for the normalized boundary flux J = 0. The arriving
/// state keeps its f- (outgoing characteristic) and the emitted +1 wave
/// carries the mismatch: post state (fm, fm), size u.J().
struct BoundaryWave {
  HalfState post;
  double sigma = 0.0;
};

inline BoundaryWave solve_boundary_left(HalfState u) {
  BoundaryWave w;
  w.post = {u.fm, u.fm};
  w.sigma = u.J();  // +1 wave: ahead state u, behind state post
  return w;
}

/// Reflection at x = 1: f+ survives, emitted -1 wave has size -u.J().
inline BoundaryWave solve_boundary_right(HalfState u) {
  BoundaryWave w;
  w.post = {u.fp, u.fp};
  w.sigma = -u.J();
  return w;
}

/// Mixing weight of a node interaction, recovered from the incoming and
/// outgoing wave sizes:
///
///   sigma_p_out = (1-c) sigma_p_in + c sigma_m_in
///   sigma_m_out = c sigma_p_in + (1-c) sigma_m_in
///
/// When the incoming sizes are too close for the ratio to be meaningful the
/// exact secant identity degrades gracefully to the tangent form
/// c = g'(J*) delta / (g'(J*) delta + 1).
///
/// c lives in [0, 1/2) whenever the mesh resolves the damping mass; a value
/// at or above 1/2 means the cell carries too much mass and the caller's
/// mesh must be refined, which is reported as a numerical error.
inline double interaction_coefficient(double sigma_p_in, double sigma_m_in,
                                      double sigma_p_out, double sigma_m_out,
                                      const DampingLaw& g, double Jstar_post,
                                      double delta, int node = -1) {
  const double den = sigma_p_in - sigma_m_in;
  double c;
  if (std::abs(den) >
      1e-12 * std::max(1.0, std::abs(sigma_p_in) + std::abs(sigma_m_in))) {
    c = 0.5 * (1.0 - (sigma_p_out - sigma_m_out) / den);
  } else {
    const double s = g.gprime(Jstar_post) * delta;
    c = s / (s + 1.0);
  }
  const std::string where =
      node >= 0 ? " at node " + std::to_string(node) : "";
  if (!(c > -1e-9 && c < 0.5 + 1e-9))
    throw NumericalError("interaction coefficient " + std::to_string(c) +
                         " out of range" + where);
  c = std::clamp(c, 0.0, 0.5);
  if (c >= 0.5)
    throw NumericalError(
        "mesh too coarse: interaction coefficient reached 1/2" + where);
  return c;
}

}  // namespace wavebal
