#include "elastireg/energy/hfunction.hpp"

#include <cmath>

namespace elastireg {

HFunction HFunction::standard(int n) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  return {"default", 1.0, 1.0, -(n + 1.0), -(n + 1.0)};
}

HFunction HFunction::normalized() { return {"normalized", 1.0, 1.0, -1.0, -1.0}; }

HFunction HFunction::quadratic_well() { return {"quadratic", 1.0, 0.0, -2.0, 1.0}; }

HFunction HFunction::custom(double a, double b, double c, double d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw InvalidInput("h coefficients must be finite");
  }
  return {"custom", a, b, c, d};
}

double HFunction::H(double delta, double alpha, int n) const {
  return n * (std::pow(delta, alpha / n) + std::pow(delta, 1.0 - alpha / n)) + (*this)(delta);
}

} // namespace elastireg
