#pragma once

#include "elastireg/core.hpp"

#include <string>

namespace elastireg {

/// h(delta) = a delta^2 + b / delta + c delta + d.
///
/// The reflection identity h(delta) = delta h(1/delta) holds iff a = b and c = d.
struct HFunction {
  std::string family = "default";
  double a = 1.0, b = 1.0, c = -3.0, d = -3.0;

  /// delta^2 + 1/delta - (n+1)(delta+1): convex, h(d) = d h(1/d), h'(1) = -n, Psi(1) = 0.
  static HFunction standard(int n);
  /// delta^2 + 1/delta - delta - 1: same shape with h(1) = h'(1) = 0.
  static HFunction normalized();
  /// (delta - 1)^2, used only as a convex probe.
  static HFunction quadratic_well();
  static HFunction custom(double a, double b, double c, double d);

  template <class T>
  T operator()(const T& x) const {
    return a * x * x + b / x + c * x + d;
  }
  double derivative(double x) const { return 2.0 * a * x - b / (x * x) + c; }
  double second_derivative(double x) const { return 2.0 * a + 2.0 * b / (x * x * x); }

  /// H(delta) = n (delta^{alpha/n} + delta^{1 - alpha/n}) + h(delta).
  double H(double delta, double alpha, int n) const;
};

} // namespace elastireg
