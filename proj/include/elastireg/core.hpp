#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace elastireg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Boundary tolerance in reference units.
inline constexpr double kBoundaryTolerance = 1e-9;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad polygon, det <= 0, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// A constrained problem with no admissible point (landmarks, part matching).
class Infeasible : public Error {
public:
  using Error::Error;
};

/// Refusal to allocate an unreasonable amount of work.
class ResourceLimit : public Error {
public:
  using Error::Error;
};

/// An element determinant dropped below the admissible floor.
class Degenerate : public Error {
public:
  using Error::Error;
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline Mat2 rotation2(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

} // namespace elastireg
