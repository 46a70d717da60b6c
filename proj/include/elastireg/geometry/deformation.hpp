#pragma once

#include "elastireg/geometry/mesh.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace elastireg {

/// Point location in a set of (deformed) triangles through a uniform bucket grid.
class TriangleLocator {
public:
  struct Hit {
    int triangle = -1;
    Eigen::Vector3d barycentric = Eigen::Vector3d::Zero();
  };

  TriangleLocator(const std::vector<Vec2>& points, const std::vector<Triangle>& triangles);

  /// Triangle containing z, allowing barycentric slack `tol`; nullopt if none.
  std::optional<Hit> locate(const Vec2& z, double tol = 1e-12) const;

private:
  std::vector<Vec2> points_;
  std::vector<Triangle> triangles_;
  Vec2 lo_, cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

Eigen::Vector3d barycentric(const Vec2& z, const Vec2& a, const Vec2& b, const Vec2& c);

/// Piecewise-affine map on a reference mesh, meant to be a homeomorphism onto `target`.
struct MeshDeformation {
  std::shared_ptr<const Mesh> mesh;
  std::vector<Vec2> positions;
  Domain2 target;

  MeshDeformation(std::shared_ptr<const Mesh> m, std::vector<Vec2> pos, Domain2 tgt);

  static MeshDeformation identity(std::shared_ptr<const Mesh> m, const Domain2& target);
  /// y(x) = A x + a on every node; the target must be supplied by the caller.
  static MeshDeformation affine(std::shared_ptr<const Mesh> m, const AffineMap& map, const Domain2& target);

  /// Dy on triangle t.
  Mat2 gradient(std::size_t t) const;
  double det(std::size_t t) const { return gradient(t).determinant(); }
};

/// Piecewise-affine evaluation; throws InvalidInput if x lies outside the reference mesh.
Vec2 evaluate_map(const MeshDeformation& def, const Vec2& x);
/// Preimage of z under def; throws InvalidInput if z is not covered by the deformed mesh.
Vec2 invert_map(const MeshDeformation& def, const Vec2& z);

/// Cached evaluator for repeated forward and inverse queries.
class DeformationEvaluator {
public:
  explicit DeformationEvaluator(const MeshDeformation& def);
  Vec2 evaluate(const Vec2& x) const;
  Vec2 invert(const Vec2& z) const;
  /// Deformed triangle containing z with barycentric coordinates.
  TriangleLocator::Hit locate_deformed(const Vec2& z) const;

private:
  MeshDeformation def_;
  TriangleLocator reference_;
  TriangleLocator deformed_;
  double scale_;
};

/// Increasing piecewise-linear map of [0,1] onto itself.
class Monotone1DMap {
public:
  Monotone1DMap(std::vector<double> grid, std::vector<double> values);
  static Monotone1DMap identity(int cells);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t cells() const { return grid_.size() - 1; }
  double slope(std::size_t cell) const;

  double evaluate(double x) const;
  double invert(double z) const;

private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

double evaluate_map(const Monotone1DMap& map, double x);
double invert_map(const Monotone1DMap& map, double z);

} // namespace elastireg
