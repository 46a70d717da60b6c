#include "elastireg/geometry/radial_map.hpp"

#include <cmath>

namespace elastireg {

RadialMap::RadialMap(double p, double q, double lambda, const Vec2& center)
    : p_(p), q_(q), lambda_(lambda), m_(lambda * p + (1.0 - lambda) * q), center_(center) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("radial map needs lambda in (0,1)");
  if (!(p > 0.0) || !(q > 0.0)) throw InvalidInput("radial map needs p, q > 0");
  if (p > q) throw InvalidInput("radial map needs p <= q");
}

RadialMap radial_map(double p, double q, double lambda, const Vec2& center, int n) {
  if (n != 2) throw InvalidInput("radial maps are only available in two dimensions");
  return RadialMap(p, q, lambda, center);
}

double RadialMap::det_at_radius(double R) const {
  if (R * R <= lambda_) return p_;
  if (R <= 1.0) return q_;
  return m_;
}

double RadialMap::radius(double R) const {
  const double R2 = R * R;
  if (R2 <= lambda_) return std::sqrt(p_ * R2);
  if (R <= 1.0) return std::sqrt(q_ * R2 + lambda_ * (p_ - q_));
  return std::sqrt(m_ * R2);
}

Vec2 RadialMap::operator()(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double R = d.norm();
  if (R == 0.0) return center_;
  return center_ + (radius(R) / R) * d;
}

Mat2 RadialMap::gradient(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double R = d.norm();
  if (R == 0.0) return std::sqrt(p_) * Mat2::Identity();
  const double r = radius(R);
  const double k = det_at_radius(R);
  // r' = k R / r since d(r^2)/d(R^2) = k.
  const double rp = k * R / r;
  const Vec2 u = d / R;
  return (r / R) * Mat2::Identity() + (rp - r / R) * (u * u.transpose());
}

MeshDeformation RadialMap::sample(std::shared_ptr<const Mesh> mesh, const Domain2& domain) const {
  if (!domain.contains(center_) || domain.boundary_distance(center_) < 2.0 - 1e-12) {
    throw InvalidInput("radial map needs the ball of radius 2 about the center inside the domain");
  }
  std::vector<Vec2> pos;
  pos.reserve(mesh->node_count());
  for (const auto& x : mesh->nodes()) pos.push_back((*this)(x));
  const double s = std::sqrt(m_);
  const AffineMap scale(s * Mat2::Identity(), (1.0 - s) * center_);
  return MeshDeformation(std::move(mesh), std::move(pos), domain.transformed(scale));
}

} // namespace elastireg
