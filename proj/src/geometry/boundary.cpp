#include "elastireg/geometry/boundary.hpp"

#include <algorithm>
#include <numeric>

namespace elastireg {

namespace {

std::vector<int> order_along(const std::vector<Vec2>& cycle, const std::vector<Vec2>& points, double tol) {
  const std::size_t n = cycle.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative[i + 1] = cumulative[i] + (cycle[(i + 1) % n] - cycle[i]).norm();
  std::vector<double> s(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    double best = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = cycle[i];
      const Vec2 ab = cycle[(i + 1) % n] - a;
      const double t = std::clamp((points[k] - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      const double d = (points[k] - (a + t * ab)).norm();
      if (d < best) {
        best = d;
        s[k] = cumulative[i] + t * ab.norm();
      }
    }
    if (best > tol) throw InvalidInput("point " + std::to_string(k) + " is not on the boundary");
    if (s[k] >= cumulative[n] - 1e-15 * cumulative[n]) s[k] = 0.0;
  }
  std::vector<int> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return s[a] < s[b]; });
  return idx;
}

} // namespace

std::vector<int> boundary_cyclic_order(const Mesh& mesh, const std::vector<Vec2>& points, double tol) {
  return order_along(mesh.boundary_polygon(), points, tol);
}

std::vector<int> boundary_cyclic_order(const Domain2& domain, const std::vector<Vec2>& points, double tol) {
  return order_along(domain.vertices(), points, tol);
}

bool same_cyclic_order(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  auto it = std::find(b.begin(), b.end(), a.front());
  if (it == b.end()) return false;
  const std::size_t off = static_cast<std::size_t>(it - b.begin());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[(k + off) % b.size()]) return false;
  }
  return true;
}

} // namespace elastireg
