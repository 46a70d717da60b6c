#pragma once

#include "elastireg/geometry/deformation.hpp"

#include <functional>
#include <vector>

namespace elastireg {

/// Strictly convex C^2 stored energy on (0, inf) with Psi(1) = 0.
struct Convex1D {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  /// Psi(p) = p + 1/p - 2.
  static Convex1D default_psi();
};

/// Problem data: c1 = indicator of (0, c1_jump), c2 = indicator of (0, c2_jump).
struct Demo1DOptions {
  double c1_jump = 0.5;
  double c2_jump = 0.75;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-12;
};

struct Demo1DResult {
  Monotone1DMap map;
  double energy = 0.0;
  double identity_energy = 0.0;
  /// Energy of the two-slope candidate through (c1_jump, c2_jump).
  double candidate_energy = 0.0;
  /// Slopes of the maximal runs of (nearly) equal cell slopes, left to right.
  std::vector<double> slopes;
  /// Grid points where the slope changes.
  std::vector<double> kinks;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trajectory;
};

/// Exact value of int_0^1 eps Psi(y') + (1 + y') |c1(x) - c2(y(x))|^2 dx for a piecewise-linear y.
double energy_1d(const Convex1D& Psi, double eps, const Monotone1DMap& y, const Demo1DOptions& options = {});

/// Minimizes the 1D energy over monotone piecewise-linear maps on J uniform cells with y(0)=0, y(1)=1.
///
/// Newton steps on a tridiagonal Hessian; nodes reaching the jump of c2 are held there while that
/// lowers the energy (the energy has a kink when a node sits on the jump).
Demo1DResult demo_1d(const Convex1D& Psi, double eps, int J, const Demo1DOptions& options = {});

} // namespace elastireg
