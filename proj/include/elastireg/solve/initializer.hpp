#pragma once

#include "elastireg/geometry/deformation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace elastireg {

/// Boundary node forced onto a given target point (boundary landmarks).
struct BoundaryAnchor {
  int node;
  Vec2 point;
};

/// Exact affine maps of the source polygon onto the target polygon (one per cyclic vertex shift)
/// with positive determinant.
std::vector<AffineMap> affine_fits(const Domain2& source, const Domain2& target);

/// Boundary by arclength fraction with target corners snapped to the nearest nodes, interior by a
/// uniform-weight Tutte embedding. Throws InvalidInput if the result is not a valid homeomorphism.
MeshDeformation arclength_initializer(std::shared_ptr<const Mesh> mesh, const Domain2& source, const Domain2& target,
                                      const std::vector<BoundaryAnchor>& anchors = {});

/// Affine fits when available (lowest `energy` wins), otherwise the arclength initializer.
MeshDeformation initial_deformation(std::shared_ptr<const Mesh> mesh, const Domain2& source, const Domain2& target,
                                    const std::function<double(const MeshDeformation&)>& energy = {});

/// Solves the uniform Laplace equation for nodes not in `fixed`, keeping fixed nodes in place.
std::vector<Vec2> harmonic_fill(const Mesh& mesh, const std::vector<Vec2>& values, const std::vector<char>& fixed);

/// Smooth seeded perturbation of the free and sliding nodes; the amplitude is halved until the
/// result is valid.
MeshDeformation perturb_deformation(const MeshDeformation& def, double amplitude, std::uint64_t seed,
                                    const std::vector<int>& pinned = {});

} // namespace elastireg
