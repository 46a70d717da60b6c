#pragma once

#include "elastireg/geometry/deformation.hpp"

#include <string>
#include <utility>
#include <vector>

namespace elastireg {

struct ValidationReport {
  std::vector<double> dets;
  std::vector<int> inverted;  // triangles with det <= 0
  double min_det = 0.0;
  double boundary_residual = 0.0;  // max distance of a deformed boundary node to the target boundary
  double area_mismatch = 0.0;      // |sum of deformed areas - target area|
  bool overlap_free = true;
  std::vector<std::pair<int, int>> overlaps;  // first few overlapping pairs
  bool boundary_simple = true;
  bool passed = false;

  std::string summary() const;
};

/// Checks orientation, boundary placement and global injectivity of def.
ValidationReport validate_homeomorphism(const MeshDeformation& def, double tol_bnd = kBoundaryTolerance);

/// Interiors of two triangles intersect (separating-axis test with relative slack).
bool triangles_overlap(const Vec2& a0, const Vec2& a1, const Vec2& a2, const Vec2& b0, const Vec2& b1,
                       const Vec2& b2);

} // namespace elastireg
