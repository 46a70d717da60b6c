#pragma once

#include "elastireg/geometry/mesh.hpp"

#include <vector>

namespace elastireg {

/// Indices of `points` sorted by arclength along the counterclockwise boundary of the mesh.
/// Throws InvalidInput if a point is farther than tol from the boundary cycle.
std::vector<int> boundary_cyclic_order(const Mesh& mesh, const std::vector<Vec2>& points,
                                       double tol = kBoundaryTolerance);
/// Same along the boundary of a domain polygon.
std::vector<int> boundary_cyclic_order(const Domain2& domain, const std::vector<Vec2>& points,
                                       double tol = kBoundaryTolerance);

/// True iff the two label sequences agree up to a cyclic rotation.
bool same_cyclic_order(const std::vector<int>& a, const std::vector<int>& b);

} // namespace elastireg
