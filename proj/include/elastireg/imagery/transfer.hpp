#pragma once

#include "elastireg/geometry/deformation.hpp"
#include "elastireg/imagery/image.hpp"

#include <vector>

namespace elastireg {

enum class TransferMode { Intensity, Mass };

/// Required factor s so that s * c_1 / det M stays in [0,1]; 1 if no rescale is needed.
double mass_rescale_factor(const GridImage& img, const AffineMap& map);

/// Image P_2 on the domain map(Omega_1) with c_2(Mx+a) = c_1(x) (intensity mode) or
/// c_2(Mx+a) = c_1(x) / det M (mass mode). Resolution defaults to that of img.
/// The lattice is the bounding box of the image domain; the support is the exact image polygon.
GridImage make_related_pair(const GridImage& img, const AffineMap& map, TransferMode mode, int nx = 0, int ny = 0);

enum class QuadratureRule { Midpoint, ThreePoint };

struct QuadPoint {
  Eigen::Vector3d barycentric;
  double weight;  // fraction of the triangle area
};

const std::vector<QuadPoint>& quadrature_points(QuadratureRule rule);

/// c_2(y(x_q)) for every triangle and quadrature point, triangle-major.
std::vector<Intensity> pullback(const GridImage& img2, const MeshDeformation& def,
                                QuadratureRule rule = QuadratureRule::Midpoint);

/// |int_{Omega_1} c_2(y) det Dy dx - int_{Omega_2} c_2 dz| summed over channels.
double change_of_variables_check(const GridImage& img2, const MeshDeformation& def,
                                 QuadratureRule rule = QuadratureRule::Midpoint);

} // namespace elastireg
