#pragma once

#include "elastireg/geometry/domain.hpp"

#include <array>
#include <optional>
#include <vector>

namespace elastireg {

using Triangle = std::array<int, 3>;

/// Node layout of a structured mesh: (cells_x+1) x (cells_y+1) nodes, node id j*(cells_x+1)+i.
struct GridShape {
  int cells_x = 0;
  int cells_y = 0;
  Vec2 origin = Vec2::Zero();
  Vec2 spacing = Vec2::Ones();

  int node(int i, int j) const { return j * (cells_x + 1) + i; }
};

/// Conforming triangulation of a reference domain.
///
/// Triangles are positively oriented. `boundary` lists the boundary nodes
/// once, in counterclockwise order.
class Mesh {
public:
  Mesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles, std::optional<GridShape> grid = std::nullopt);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<int>& boundary() const { return boundary_; }
  bool on_boundary(int node) const { return on_boundary_[node] != 0; }
  const std::optional<GridShape>& grid() const { return grid_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  double triangle_area(std::size_t t) const { return area_[t]; }
  /// Inverse of the reference edge matrix [x1-x0, x2-x0]; Dy = [y1-y0, y2-y0] * this.
  const Mat2& reference_inverse(std::size_t t) const { return ref_inverse_[t]; }
  double area() const;
  double max_edge_length() const;
  /// Index of the node nearest to p.
  int nearest_node(const Vec2& p) const;
  /// Polygon traced by the boundary cycle in reference coordinates.
  std::vector<Vec2> boundary_polygon() const;

  /// Copy with one node moved; rejects moves that invert a triangle.
  Mesh with_node_moved(int node, const Vec2& p) const;

private:
  void extract_boundary();

  std::vector<Vec2> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_;
  std::vector<char> on_boundary_;
  std::vector<double> area_;
  std::vector<Mat2> ref_inverse_;
  std::optional<GridShape> grid_;
};

/// Hard cap on generated triangles.
inline constexpr std::size_t kMaxTriangles = 4'000'000;

/// Triangulate a domain with edges no longer than 1.5 * target_h.
///
/// Rectangles get a structured grid split along one diagonal per cell;
/// polygons are ear-clipped and then uniformly refined.
Mesh build_mesh(const Domain2& domain, double target_h);

/// Structured grid mesh with a fixed cell count per axis on a rectangle.
Mesh build_grid_mesh(const Vec2& origin, const Vec2& extent, int cells_x, int cells_y);

} // namespace elastireg
