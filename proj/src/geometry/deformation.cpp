#include "elastireg/geometry/deformation.hpp"

#include <algorithm>
#include <cmath>

namespace elastireg {

Eigen::Vector3d barycentric(const Vec2& z, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d = cross2(b - a, c - a);
  const double l1 = cross2(z - a, c - a) / d;
  const double l2 = cross2(b - a, z - a) / d;
  return {1.0 - l1 - l2, l1, l2};
}

TriangleLocator::TriangleLocator(const std::vector<Vec2>& points, const std::vector<Triangle>& triangles)
    : points_(points), triangles_(triangles) {
  lo_ = points_.front();
  Vec2 hi = points_.front();
  for (const auto& p : points_) {
    lo_ = lo_.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double side = std::max(1.0, std::sqrt(static_cast<double>(triangles_.size())));
  nx_ = ny_ = static_cast<int>(side);
  Vec2 ext = (hi - lo_).cwiseMax(Vec2::Constant(1e-300));
  cell_ = Vec2(ext.x() / nx_, ext.y() / ny_);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  auto clampi = [](double v, int n) { return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1); };
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    Vec2 tlo = points_[triangles_[t][0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(points_[triangles_[t][k]]);
      thi = thi.cwiseMax(points_[triangles_[t][k]]);
    }
    const int i0 = clampi((tlo.x() - lo_.x()) / cell_.x(), nx_), i1 = clampi((thi.x() - lo_.x()) / cell_.x(), nx_);
    const int j0 = clampi((tlo.y() - lo_.y()) / cell_.y(), ny_), j1 = clampi((thi.y() - lo_.y()) / cell_.y(), ny_);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
    }
  }
}

std::optional<TriangleLocator::Hit> TriangleLocator::locate(const Vec2& z, double tol) const {
  const int i = std::clamp(static_cast<int>(std::floor((z.x() - lo_.x()) / cell_.x())), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((z.y() - lo_.y()) / cell_.y())), 0, ny_ - 1);
  Hit best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = triangles_[t];
    const Eigen::Vector3d b = barycentric(z, points_[tri[0]], points_[tri[1]], points_[tri[2]]);
    const double m = b.minCoeff();
    if (m > best_min) {
      best_min = m;
      best.triangle = t;
      best.barycentric = b;
    }
  }
  if (best.triangle < 0 || best_min < -tol) return std::nullopt;
  return best;
}

MeshDeformation::MeshDeformation(std::shared_ptr<const Mesh> m, std::vector<Vec2> pos, Domain2 tgt)
    : mesh(std::move(m)), positions(std::move(pos)), target(std::move(tgt)) {
  if (!mesh) throw InvalidInput("deformation needs a mesh");
  if (positions.size() != mesh->node_count()) throw InvalidInput("deformation has wrong number of positions");
}

MeshDeformation MeshDeformation::identity(std::shared_ptr<const Mesh> m, const Domain2& target) {
  auto pos = m->nodes();
  return MeshDeformation(std::move(m), std::move(pos), target);
}

MeshDeformation MeshDeformation::affine(std::shared_ptr<const Mesh> m, const AffineMap& map, const Domain2& target) {
  std::vector<Vec2> pos;
  pos.reserve(m->node_count());
  for (const auto& x : m->nodes()) pos.push_back(map(x));
  return MeshDeformation(std::move(m), std::move(pos), target);
}

Mat2 MeshDeformation::gradient(std::size_t t) const {
  const auto& tri = mesh->triangles()[t];
  Mat2 e;
  e.col(0) = positions[tri[1]] - positions[tri[0]];
  e.col(1) = positions[tri[2]] - positions[tri[0]];
  return e * mesh->reference_inverse(t);
}

DeformationEvaluator::DeformationEvaluator(const MeshDeformation& def)
    : def_(def), reference_(def.mesh->nodes(), def.mesh->triangles()),
      deformed_(def.positions, def.mesh->triangles()) {
  scale_ = 1e-9;
}

Vec2 DeformationEvaluator::evaluate(const Vec2& x) const {
  const auto hit = reference_.locate(x, scale_);
  if (!hit) throw InvalidInput("point outside the reference domain");
  const auto& tri = def_.mesh->triangles()[hit->triangle];
  const auto& b = hit->barycentric;
  return b[0] * def_.positions[tri[0]] + b[1] * def_.positions[tri[1]] + b[2] * def_.positions[tri[2]];
}

TriangleLocator::Hit DeformationEvaluator::locate_deformed(const Vec2& z) const {
  const auto hit = deformed_.locate(z, scale_);
  if (!hit) throw InvalidInput("point outside the deformed image");
  return *hit;
}

Vec2 DeformationEvaluator::invert(const Vec2& z) const {
  const auto hit = locate_deformed(z);
  const auto& tri = def_.mesh->triangles()[hit.triangle];
  const auto& nodes = def_.mesh->nodes();
  const auto& b = hit.barycentric;
  return b[0] * nodes[tri[0]] + b[1] * nodes[tri[1]] + b[2] * nodes[tri[2]];
}

Vec2 evaluate_map(const MeshDeformation& def, const Vec2& x) { return DeformationEvaluator(def).evaluate(x); }

Vec2 invert_map(const MeshDeformation& def, const Vec2& z) { return DeformationEvaluator(def).invert(z); }

Monotone1DMap::Monotone1DMap(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() < 2 || grid_.size() != values_.size()) throw InvalidInput("1D map needs matching grids of size >= 2");
  if (grid_.front() != 0.0 || grid_.back() != 1.0) throw InvalidInput("1D grid must span [0,1]");
  if (values_.front() != 0.0 || values_.back() != 1.0) throw InvalidInput("1D map must satisfy y(0)=0, y(1)=1");
  for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
    if (!(grid_[j + 1] > grid_[j])) throw InvalidInput("1D grid not strictly increasing");
    if (!(values_[j + 1] > values_[j])) throw InvalidInput("1D map not strictly increasing");
  }
}

Monotone1DMap Monotone1DMap::identity(int cells) {
  if (cells < 1) throw InvalidInput("1D map needs at least one cell");
  std::vector<double> g(cells + 1);
  for (int j = 0; j <= cells; ++j) g[j] = static_cast<double>(j) / cells;
  g.back() = 1.0;
  return Monotone1DMap(g, g);
}

double Monotone1DMap::slope(std::size_t cell) const {
  return (values_[cell + 1] - values_[cell]) / (grid_[cell + 1] - grid_[cell]);
}

namespace {

double interpolate(const std::vector<double>& from, const std::vector<double>& to, double s) {
  if (s < 0.0 || s > 1.0) throw InvalidInput("1D point outside [0,1]");
  auto it = std::upper_bound(from.begin(), from.end(), s);
  std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - from.begin())) - 1;
  j = std::min(j, from.size() - 2);
  const double t = (s - from[j]) / (from[j + 1] - from[j]);
  return to[j] + t * (to[j + 1] - to[j]);
}

} // namespace

double Monotone1DMap::evaluate(double x) const { return interpolate(grid_, values_, x); }

double Monotone1DMap::invert(double z) const { return interpolate(values_, grid_, z); }

double evaluate_map(const Monotone1DMap& map, double x) { return map.evaluate(x); }

double invert_map(const Monotone1DMap& map, double z) { return map.invert(z); }

} // namespace elastireg
