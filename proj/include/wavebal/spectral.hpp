#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <vector>

#include "wavebal/errors.hpp"
#include "wavebal/transition.hpp"

namespace wavebal {

/// Full spectrum of a step matrix, sorted by modulus, largest first.
/// Validation is tolerance-based only; nothing in the simulation pipeline
/// consumes eigenvalues.
struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_modulus = 0.0;
  int unit_count = 0;        // eigenvalues with |lambda| >= 1 - 1e-10
  double third_modulus = 0.0;
  double gap = 0.0;          // 1 - third_modulus
  bool loop_condition = false;  // some pair c_j, c_{j+1} both positive
};

inline SpectralReport spectral_check(const std::vector<double>& c) {
  const auto B = build_B(c);
  const int n = B.size();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = B(i, j);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed on step matrix");

  SpectralReport rep;
  rep.eigenvalues.reserve(n);
  for (int i = 0; i < n; ++i) rep.eigenvalues.push_back(solver.eigenvalues()[i]);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return std::abs(a) > std::abs(b);
            });
  rep.max_modulus = std::abs(rep.eigenvalues.front());
  for (const auto& ev : rep.eigenvalues)
    if (std::abs(ev) >= 1.0 - 1e-10) ++rep.unit_count;
  rep.third_modulus = n >= 3 ? std::abs(rep.eigenvalues[2]) : 0.0;
  rep.gap = 1.0 - rep.third_modulus;
  for (std::size_t j = 0; j + 1 < c.size(); ++j)
    if (c[j] > 0.0 && c[j + 1] > 0.0) rep.loop_condition = true;

  if (rep.max_modulus > 1.0 + 1e-10)
    throw NumericalError("step matrix has an eigenvalue outside the unit disk");
  if (rep.loop_condition && rep.unit_count != 2)
    throw NumericalError(
        "expected exactly two unit-modulus eigenvalues under the loop "
        "condition, found " +
        std::to_string(rep.unit_count));
  return rep;
}

}  // namespace wavebal
