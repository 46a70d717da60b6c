#pragma once

#include "elastireg/core.hpp"

#include <vector>

namespace elastireg {

/// Affine map x -> A x + a with det A > 0.
struct AffineMap {
  Mat2 A = Mat2::Identity();
  Vec2 a = Vec2::Zero();

  AffineMap() = default;
  AffineMap(const Mat2& matrix, const Vec2& offset);

  Vec2 operator()(const Vec2& x) const { return A * x + a; }
  AffineMap inverse() const;
  double det() const { return A.determinant(); }
};

/// Bounded planar domain: an axis-aligned rectangle or a simple polygon.
///
/// Vertices are stored counterclockwise with the origin offset already
/// applied. Construction rejects self-intersecting, clockwise, or
/// zero-area input.
class Domain2 {
public:
  enum class Kind { Rectangle, Polygon };

  static Domain2 rectangle(double width, double height, const Vec2& origin = Vec2::Zero());
  static Domain2 polygon(std::vector<Vec2> vertices, const Vec2& origin = Vec2::Zero());
  /// Inscribed regular polygon approximating a disk. The first vertex sits at angle 0.
  static Domain2 disk(const Vec2& center, double radius, int segments);

  Kind kind() const { return kind_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  double area() const;
  double perimeter() const;
  double diameter() const;
  Vec2 bbox_min() const;
  Vec2 bbox_max() const;
  bool is_convex() const;

  /// Closed containment with tolerance `tol` measured as distance to the boundary.
  bool contains(const Vec2& p, double tol = kBoundaryTolerance) const;
  double boundary_distance(const Vec2& p) const;
  /// Arclength coordinate (from vertex 0, counterclockwise) of the boundary point nearest p.
  double arclength_of(const Vec2& p) const;
  /// Boundary point at arclength s (taken modulo the perimeter) and the unit tangent there.
  Vec2 point_at(double s, Vec2* tangent = nullptr) const;
  /// Cumulative arclength of each vertex; size()+1 entries, last equals the perimeter.
  const std::vector<double>& cumulative_length() const { return cumulative_; }

  /// True iff `other` lies inside this domain (vertices contained, no proper edge crossings).
  bool contains_polygon(const Domain2& other, double tol = kBoundaryTolerance) const;

  Domain2 transformed(const AffineMap& map) const;

private:
  Domain2(Kind kind, std::vector<Vec2> vertices);

  Kind kind_ = Kind::Polygon;
  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;
};

/// Signed area of a closed polygon (shoelace).
double signed_area(const std::vector<Vec2>& polygon);
/// True iff no two non-adjacent edges intersect and no adjacent edges overlap.
bool is_simple_polygon(const std::vector<Vec2>& polygon);
/// Closed segment intersection test.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

} // namespace elastireg
