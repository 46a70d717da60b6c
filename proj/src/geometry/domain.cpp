#include "elastireg/geometry/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace elastireg {

AffineMap::AffineMap(const Mat2& matrix, const Vec2& offset) : A(matrix), a(offset) {
  if (!(A.determinant() > 0.0)) {
    throw InvalidInput("affine map requires det A > 0");
  }
}

AffineMap AffineMap::inverse() const {
  const Mat2 inv = A.inverse();
  return AffineMap(inv, -inv * a);
}

double signed_area(const std::vector<Vec2>& polygon) {
  double s = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    s += cross2(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * s;
}

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-15 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-15 &&
         std::min(a.y(), b.y()) - 1e-15 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-15;
}

} // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool is_simple_polygon(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b - a).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one endpoint; they must not fold back onto each other.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& other1 = (j == i + 1) ? a : b;
        const Vec2& other2 = (j == i + 1) ? d : c;
        if (orientation(shared, other1, other2) == 0 && (other1 - shared).dot(other2 - shared) > 0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

Domain2::Domain2(Kind kind, std::vector<Vec2> vertices) : kind_(kind), vertices_(std::move(vertices)) {
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidInput("domain vertex is not finite");
  }
  if (vertices_.size() < 3) throw InvalidInput("domain polygon needs at least 3 vertices");
  const double a = signed_area(vertices_);
  if (!(std::abs(a) > 0.0)) throw InvalidInput("domain polygon has zero area");
  if (a < 0.0) throw InvalidInput("domain polygon must be counterclockwise");
  if (!is_simple_polygon(vertices_)) throw InvalidInput("domain polygon is not simple");
  cumulative_.assign(vertices_.size() + 1, 0.0);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + (vertex(i + 1) - vertex(i)).norm();
  }
}

Domain2 Domain2::rectangle(double width, double height, const Vec2& origin) {
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidInput("rectangle needs positive width and height");
  return Domain2(Kind::Rectangle, {origin, origin + Vec2(width, 0), origin + Vec2(width, height),
                                   origin + Vec2(0, height)});
}

Domain2 Domain2::polygon(std::vector<Vec2> vertices, const Vec2& origin) {
  for (auto& v : vertices) v += origin;
  return Domain2(Kind::Polygon, std::move(vertices));
}

Domain2 Domain2::disk(const Vec2& center, double radius, int segments) {
  if (segments < 3 || !(radius > 0.0)) throw InvalidInput("disk needs radius > 0 and >= 3 segments");
  std::vector<Vec2> v;
  v.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * k / segments;
    v.push_back(center + radius * Vec2(std::cos(t), std::sin(t)));
  }
  return Domain2(Kind::Polygon, std::move(v));
}

double Domain2::area() const { return signed_area(vertices_); }

double Domain2::perimeter() const { return cumulative_.back(); }

double Domain2::diameter() const {
  double d = 0.0;
  for (const auto& p : vertices_) {
    for (const auto& q : vertices_) d = std::max(d, (p - q).norm());
  }
  return d;
}

Vec2 Domain2::bbox_min() const {
  Vec2 m = vertices_.front();
  for (const auto& v : vertices_) m = m.cwiseMin(v);
  return m;
}

Vec2 Domain2::bbox_max() const {
  Vec2 m = vertices_.front();
  for (const auto& v : vertices_) m = m.cwiseMax(v);
  return m;
}

bool Domain2::is_convex() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (cross2(vertex(i + 1) - vertex(i), vertex(i + 2) - vertex(i + 1)) < -1e-14 * perimeter()) return false;
  }
  return true;
}

double Domain2::boundary_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) d = std::min(d, point_segment_distance(p, vertex(i), vertex(i + 1)));
  return d;
}

bool Domain2::contains(const Vec2& p, double tol) const {
  if (boundary_distance(p) <= tol) return true;
  // Winding by crossing number.
  bool inside = false;
  const std::size_t n = size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double Domain2::arclength_of(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec2 a = vertex(i);
    const Vec2 ab = vertex(i + 1) - a;
    double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double d = (p - (a + t * ab)).norm();
    if (d < best) {
      best = d;
      s = cumulative_[i] + t * ab.norm();
    }
  }
  return s >= perimeter() ? s - perimeter() : s;
}

Vec2 Domain2::point_at(double s, Vec2* tangent) const {
  const double len = perimeter();
  s = std::fmod(s, len);
  if (s < 0) s += len;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - cumulative_.begin()) - 1));
  i = std::min(i, size() - 1);
  const Vec2 a = vertex(i);
  const Vec2 ab = vertex(i + 1) - a;
  const double el = cumulative_[i + 1] - cumulative_[i];
  if (tangent) *tangent = ab / el;
  return a + ab * ((s - cumulative_[i]) / el);
}

bool Domain2::contains_polygon(const Domain2& other, double tol) const {
  for (const auto& v : other.vertices()) {
    if (!contains(v, tol)) return false;
  }
  if (is_convex()) return true;
  for (std::size_t i = 0; i < other.size(); ++i) {
    const Vec2 a = other.vertex(i), b = other.vertex(i + 1);
    for (std::size_t j = 0; j < size(); ++j) {
      const Vec2 c = vertex(j), d = vertex(j + 1);
      if (orientation(a, b, c) * orientation(a, b, d) < 0 && orientation(c, d, a) * orientation(c, d, b) < 0) {
        return false;
      }
    }
    if (!contains(0.5 * (a + b), tol)) return false;
  }
  return true;
}

Domain2 Domain2::transformed(const AffineMap& map) const {
  std::vector<Vec2> v;
  v.reserve(size());
  for (const auto& p : vertices_) v.push_back(map(p));
  const bool axis_aligned = kind_ == Kind::Rectangle && map.A(0, 1) == 0.0 && map.A(1, 0) == 0.0;
  return Domain2(axis_aligned ? Kind::Rectangle : Kind::Polygon, std::move(v));
}

} // namespace elastireg
