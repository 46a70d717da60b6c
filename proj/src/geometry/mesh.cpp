#include "elastireg/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace elastireg {

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles, std::optional<GridShape> grid)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), grid_(grid) {
  area_.resize(triangles_.size());
  ref_inverse_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k : tri) {
      if (k < 0 || static_cast<std::size_t>(k) >= nodes_.size()) throw InvalidInput("triangle references missing node");
    }
    Mat2 e;
    e.col(0) = nodes_[tri[1]] - nodes_[tri[0]];
    e.col(1) = nodes_[tri[2]] - nodes_[tri[0]];
    const double d = e.determinant();
    if (!(d > 0.0)) throw InvalidInput("mesh triangle " + std::to_string(t) + " is not positively oriented");
    area_[t] = 0.5 * d;
    ref_inverse_[t] = e.inverse();
  }
  extract_boundary();
}

void Mesh::extract_boundary() {
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::unordered_map<int, int> next;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      const int c = count[{std::min(a, b), std::max(a, b)}];
      if (c > 2) throw InvalidInput("mesh edge shared by more than two triangles");
      if (c == 1) {
        if (next.count(a)) throw InvalidInput("mesh boundary is not a single simple cycle");
        next[a] = b;
      }
    }
  }
  on_boundary_.assign(nodes_.size(), 0);
  boundary_.clear();
  if (next.empty()) throw InvalidInput("mesh has no boundary");
  int start = std::numeric_limits<int>::max();
  for (const auto& [a, b] : next) start = std::min(start, a);
  int cur = start;
  do {
    boundary_.push_back(cur);
    on_boundary_[cur] = 1;
    auto it = next.find(cur);
    if (it == next.end()) throw InvalidInput("mesh boundary is open");
    cur = it->second;
    if (boundary_.size() > next.size()) throw InvalidInput("mesh boundary is not a single cycle");
  } while (cur != start);
  if (boundary_.size() != next.size()) throw InvalidInput("mesh boundary has several components");
}

double Mesh::area() const {
  double s = 0.0;
  for (double a : area_) s += a;
  return s;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) m = std::max(m, (nodes_[tri[k]] - nodes_[tri[(k + 1) % 3]]).norm());
  }
  return m;
}

int Mesh::nearest_node(const Vec2& p) const {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = (nodes_[i] - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<Vec2> Mesh::boundary_polygon() const {
  std::vector<Vec2> poly;
  poly.reserve(boundary_.size());
  for (int b : boundary_) poly.push_back(nodes_[b]);
  return poly;
}

Mesh Mesh::with_node_moved(int node, const Vec2& p) const {
  auto nodes = nodes_;
  nodes.at(node) = p;
  return Mesh(std::move(nodes), triangles_, std::nullopt);
}

Mesh build_grid_mesh(const Vec2& origin, const Vec2& extent, int cells_x, int cells_y) {
  if (cells_x < 1 || cells_y < 1) throw InvalidInput("grid mesh needs at least one cell per axis");
  if (2.0 * cells_x * static_cast<double>(cells_y) > static_cast<double>(kMaxTriangles)) {
    throw ResourceLimit("grid mesh would exceed " + std::to_string(kMaxTriangles) + " triangles");
  }
  GridShape shape{cells_x, cells_y, origin, Vec2(extent.x() / cells_x, extent.y() / cells_y)};
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(cells_x + 1) * (cells_y + 1));
  for (int j = 0; j <= cells_y; ++j) {
    for (int i = 0; i <= cells_x; ++i) {
      // Exact end coordinates so the boundary matches the rectangle.
      const double x = i == cells_x ? origin.x() + extent.x() : origin.x() + i * shape.spacing.x();
      const double y = j == cells_y ? origin.y() + extent.y() : origin.y() + j * shape.spacing.y();
      nodes.emplace_back(x, y);
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<std::size_t>(cells_x) * cells_y);
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) {
      const int n00 = shape.node(i, j), n10 = shape.node(i + 1, j);
      const int n01 = shape.node(i, j + 1), n11 = shape.node(i + 1, j + 1);
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }
  }
  return Mesh(std::move(nodes), std::move(tris), shape);
}

namespace {

// Closed triangle minus its corners: a vertex lying on a candidate diagonal blocks the ear.
bool point_blocks_ear(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  if (p == a || p == b || p == c) return false;
  return cross2(b - a, p - a) >= 0 && cross2(c - b, p - b) >= 0 && cross2(a - c, p - c) >= 0;
}

std::vector<Triangle> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<Triangle> out;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    if (++guard > 10 * poly.size() * poly.size()) throw InvalidInput("ear clipping failed; polygon degenerate");
    bool clipped = false;
    // Prefer the ear with the best minimum angle for slightly better shapes.
    double best_quality = -1.0;
    std::size_t best = 0;
    const std::size_t n = idx.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2& a = poly[idx[(k + n - 1) % n]];
      const Vec2& b = poly[idx[k]];
      const Vec2& c = poly[idx[(k + 1) % n]];
      if (cross2(b - a, c - b) <= 0) continue;
      bool empty = true;
      for (std::size_t m = 0; m < n && empty; ++m) {
        if (m == k || m == (k + 1) % n || m == (k + n - 1) % n) continue;
        if (point_blocks_ear(poly[idx[m]], a, b, c)) empty = false;
      }
      if (!empty) continue;
      const double area2 = cross2(b - a, c - a);
      const double q = area2 / ((b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm());
      if (q > best_quality) {
        best_quality = q;
        best = k;
        clipped = true;
      }
    }
    if (!clipped) throw InvalidInput("ear clipping found no ear; polygon degenerate");
    out.push_back({idx[(best + n - 1) % n], idx[best], idx[(best + 1) % n]});
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

} // namespace

Mesh build_mesh(const Domain2& domain, double target_h) {
  if (!(target_h > 0.0)) throw InvalidInput("target_h must be positive");
  if (!(target_h < domain.diameter())) throw InvalidInput("target_h must be smaller than the domain diameter");
  const double estimate = 2.0 * domain.area() / (0.5 * target_h * target_h);
  if (estimate > static_cast<double>(kMaxTriangles)) {
    throw ResourceLimit("mesh with h=" + std::to_string(target_h) + " would need ~" +
                        std::to_string(static_cast<long long>(estimate)) + " triangles");
  }
  if (domain.kind() == Domain2::Kind::Rectangle) {
    const Vec2 lo = domain.bbox_min();
    const Vec2 ext = domain.bbox_max() - lo;
    const int nx = std::max(1, static_cast<int>(std::ceil(ext.x() / target_h - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil(ext.y() / target_h - 1e-9)));
    return build_grid_mesh(lo, ext, nx, ny);
  }

  std::vector<Vec2> nodes = domain.vertices();
  std::vector<Triangle> tris = ear_clip(nodes);
  auto max_edge = [&] {
    double m = 0.0;
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) m = std::max(m, (nodes[t[k]] - nodes[t[(k + 1) % 3]]).norm());
    }
    return m;
  };
  // Uniform red refinement keeps the mesh conforming.
  while (max_edge() > 1.5 * target_h) {
    if (4 * tris.size() > kMaxTriangles) throw ResourceLimit("mesh refinement exceeded triangle cap");
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      nodes.push_back(0.5 * (nodes[a] + nodes[b]));
      const int id = static_cast<int>(nodes.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> refined;
    refined.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const int a = t[0], b = t[1], c = t[2];
      const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      refined.push_back({a, ab, ca});
      refined.push_back({ab, b, bc});
      refined.push_back({ca, bc, c});
      refined.push_back({ab, bc, ca});
    }
    tris = std::move(refined);
  }
  return Mesh(std::move(nodes), std::move(tris));
}

} // namespace elastireg
