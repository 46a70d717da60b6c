#pragma once

#include "elastireg/geometry/deformation.hpp"

namespace elastireg {

/// Continuous radial map in the plane with piecewise constant Jacobian determinant:
/// p for R <= sqrt(lambda), q for sqrt(lambda) <= R <= 1, m = lambda p + (1-lambda) q for R >= 1.
class RadialMap {
public:
  RadialMap(double p, double q, double lambda, const Vec2& center);

  double p() const { return p_; }
  double q() const { return q_; }
  double lambda() const { return lambda_; }
  double m() const { return m_; }
  const Vec2& center() const { return center_; }

  /// Image radius r(R).
  double radius(double R) const;
  /// det Dy at reference radius R.
  double det_at_radius(double R) const;

  Vec2 operator()(const Vec2& x) const;
  Mat2 gradient(const Vec2& x) const;

  /// Nodal interpolant on a mesh of `domain`; the target is the domain scaled by sqrt(m) about the center.
  MeshDeformation sample(std::shared_ptr<const Mesh> mesh, const Domain2& domain) const;

private:
  double p_, q_, lambda_, m_;
  Vec2 center_;
};

/// Validating factory; only n = 2 is supported.
RadialMap radial_map(double p, double q, double lambda, const Vec2& center, int n = 2);

} // namespace elastireg
