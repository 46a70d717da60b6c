#pragma once

#include "elastireg/geometry/deformation.hpp"

#include <string>

namespace elastireg {

/// Node table `node,ref_x,ref_y,def_x,def_y` with full round-trip precision.
void write_deformation_csv(const std::string& nodes_path, const std::string& triangles_path,
                           const MeshDeformation& def);

/// Inverse of write_deformation_csv; the target domain is supplied by the caller.
MeshDeformation read_deformation_csv(const std::string& nodes_path, const std::string& triangles_path,
                                     const Domain2& target);

/// Two-column table `x,y` of a 1D map.
void write_map1d_csv(const std::string& path, const Monotone1DMap& map);

} // namespace elastireg
