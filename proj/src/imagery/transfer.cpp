#include "elastireg/imagery/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace elastireg {

double mass_rescale_factor(const GridImage& img, const AffineMap& map) {
  const double peak = img.max_value() / map.det();
  return peak > 1.0 ? 1.0 / peak : 1.0;
}

GridImage make_related_pair(const GridImage& img, const AffineMap& map, TransferMode mode, int nx, int ny) {
  const double det = map.det();
  if (mode == TransferMode::Mass) {
    const double s = mass_rescale_factor(img, map);
    if (s < 1.0) {
      std::ostringstream os;
      os << "mass transfer leaves [0,1]: rescale c_1 by a factor <= " << s;
      throw InvalidInput(os.str());
    }
  }
  if (nx <= 0) nx = img.nx();
  if (ny <= 0) ny = img.ny();
  const Domain2 target = img.domain().transformed(map);
  const Vec2 lo = target.bbox_min();
  const Vec2 ext = target.bbox_max() - lo;
  const AffineMap inv = map.inverse();
  const Vec2 lat_lo = img.origin(), lat_hi = img.origin() + img.extent();
  const double scale = mode == TransferMode::Mass ? 1.0 / det : 1.0;
  GridImage out = GridImage::from_function(
      lo, ext, nx, ny, img.channels(),
      [&](const Vec2& z) {
        const Vec2 x = inv(z).cwiseMax(lat_lo).cwiseMin(lat_hi);
        return Intensity(scale * img.sample(x));
      },
      img.interpolation());
  const bool same_rect = target.kind() == Domain2::Kind::Rectangle;
  return same_rect ? out : out.with_support(target);
}

const std::vector<QuadPoint>& quadrature_points(QuadratureRule rule) {
  static const std::vector<QuadPoint> midpoint{{Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3), 1.0}};
  static const std::vector<QuadPoint> three{{Eigen::Vector3d(2.0 / 3, 1.0 / 6, 1.0 / 6), 1.0 / 3},
                                            {Eigen::Vector3d(1.0 / 6, 2.0 / 3, 1.0 / 6), 1.0 / 3},
                                            {Eigen::Vector3d(1.0 / 6, 1.0 / 6, 2.0 / 3), 1.0 / 3}};
  return rule == QuadratureRule::Midpoint ? midpoint : three;
}

std::vector<Intensity> pullback(const GridImage& img2, const MeshDeformation& def, QuadratureRule rule) {
  const auto& qp = quadrature_points(rule);
  const auto& tris = def.mesh->triangles();
  std::vector<Intensity> out(tris.size() * qp.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    for (std::size_t k = 0; k < qp.size(); ++k) {
      const auto& b = qp[k].barycentric;
      const Vec2 z = b[0] * def.positions[tri[0]] + b[1] * def.positions[tri[1]] + b[2] * def.positions[tri[2]];
      if (!img2.in_lattice(z)) throw InvalidInput("deformed point outside the image domain");
      out[t * qp.size() + k] = img2.sample(z);
    }
  }
  return out;
}

double change_of_variables_check(const GridImage& img2, const MeshDeformation& def, QuadratureRule rule) {
  const auto& qp = quadrature_points(rule);
  const auto values = pullback(img2, def, rule);
  const Mesh& mesh = *def.mesh;
  Intensity lhs = Intensity::Zero(img2.channels());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const double w = mesh.triangle_area(t) * def.det(t);
    for (std::size_t k = 0; k < qp.size(); ++k) lhs += qp[k].weight * w * values[t * qp.size() + k];
  }
  const GridImage restricted = img2.with_support(def.target);
  return (lhs - restricted.integral()).cwiseAbs().sum();
}

} // namespace elastireg
