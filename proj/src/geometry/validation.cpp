#include "elastireg/geometry/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace elastireg {

bool triangles_overlap(const Vec2& a0, const Vec2& a1, const Vec2& a2, const Vec2& b0, const Vec2& b1,
                       const Vec2& b2) {
  const Vec2 a[3] = {a0, a1, a2};
  const Vec2 b[3] = {b0, b1, b2};
  double scale = 0.0;
  for (int k = 0; k < 3; ++k) {
    scale = std::max(scale, (a[k] - a[(k + 1) % 3]).norm());
    scale = std::max(scale, (b[k] - b[(k + 1) % 3]).norm());
  }
  const double slack = 1e-12 * scale;
  auto separated_by = [&](const Vec2* tri) {
    for (int k = 0; k < 3; ++k) {
      Vec2 e = tri[(k + 1) % 3] - tri[k];
      const double len = e.norm();
      if (len == 0.0) continue;
      const Vec2 nrm(-e.y() / len, e.x() / len);
      double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
      for (int m = 0; m < 3; ++m) {
        const double pa = nrm.dot(a[m]), pb = nrm.dot(b[m]);
        amin = std::min(amin, pa);
        amax = std::max(amax, pa);
        bmin = std::min(bmin, pb);
        bmax = std::max(bmax, pb);
      }
      if (std::min(amax, bmax) - std::max(amin, bmin) <= slack) return true;
    }
    return false;
  };
  return !separated_by(a) && !separated_by(b);
}

ValidationReport validate_homeomorphism(const MeshDeformation& def, double tol_bnd) {
  ValidationReport r;
  const Mesh& mesh = *def.mesh;
  const auto& tris = mesh.triangles();
  const auto& y = def.positions;
  r.dets.resize(tris.size());
  r.min_det = INFINITY;
  double deformed_area = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    r.dets[t] = def.det(t);
    r.min_det = std::min(r.min_det, r.dets[t]);
    if (!(r.dets[t] > 0.0)) r.inverted.push_back(static_cast<int>(t));
    deformed_area += r.dets[t] * mesh.triangle_area(t);
  }
  r.area_mismatch = std::abs(deformed_area - def.target.area());

  for (int b : mesh.boundary()) r.boundary_residual = std::max(r.boundary_residual, def.target.boundary_distance(y[b]));

  std::vector<Vec2> cycle;
  for (int b : mesh.boundary()) cycle.push_back(y[b]);
  r.boundary_simple = is_simple_polygon(cycle) && signed_area(cycle) > 0.0;

  // Candidate pairs from a bucket grid over deformed bounding boxes.
  Vec2 lo = y.front(), hi = y.front();
  for (const auto& p : y) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(tris.size()))));
  const Vec2 cell = ((hi - lo) / nb).cwiseMax(Vec2::Constant(1e-300));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nb) * nb);
  auto index = [&](double v, double o, double c) { return std::clamp(static_cast<int>(std::floor((v - o) / c)), 0, nb - 1); };
  std::vector<std::array<int, 4>> range(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    Vec2 tlo = y[tris[t][0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(y[tris[t][k]]);
      thi = thi.cwiseMax(y[tris[t][k]]);
    }
    range[t] = {index(tlo.x(), lo.x(), cell.x()), index(thi.x(), lo.x(), cell.x()), index(tlo.y(), lo.y(), cell.y()),
                index(thi.y(), lo.y(), cell.y())};
    for (int j = range[t][2]; j <= range[t][3]; ++j) {
      for (int i = range[t][0]; i <= range[t][1]; ++i) buckets[static_cast<std::size_t>(j) * nb + i].push_back(static_cast<int>(t));
    }
  }
  std::vector<int> stamp(tris.size(), -1);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int j = range[t][2]; j <= range[t][3]; ++j) {
      for (int i = range[t][0]; i <= range[t][1]; ++i) {
        for (int s : buckets[static_cast<std::size_t>(j) * nb + i]) {
          if (s <= static_cast<int>(t) || stamp[s] == static_cast<int>(t)) continue;
          stamp[s] = static_cast<int>(t);
          const auto& A = tris[t];
          const auto& B = tris[s];
          if (triangles_overlap(y[A[0]], y[A[1]], y[A[2]], y[B[0]], y[B[1]], y[B[2]])) {
            r.overlap_free = false;
            if (r.overlaps.size() < 16) r.overlaps.emplace_back(static_cast<int>(t), s);
          }
        }
      }
    }
  }

  r.passed = r.inverted.empty() && r.boundary_residual <= tol_bnd && r.overlap_free && r.boundary_simple &&
             r.area_mismatch <= 1e-8 * std::max(1.0, def.target.area());
  return r;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (passed ? "valid" : "invalid") << ": min det " << min_det << ", " << inverted.size()
     << " inverted triangle(s)";
  if (!inverted.empty()) {
    os << " [";
    for (std::size_t k = 0; k < std::min<std::size_t>(inverted.size(), 8); ++k) os << (k ? "," : "") << inverted[k];
    os << (inverted.size() > 8 ? ",...]" : "]");
  }
  os << ", boundary residual " << boundary_residual << ", area mismatch " << area_mismatch
     << (overlap_free ? ", no overlaps" : ", overlapping triangles")
     << (boundary_simple ? "" : ", boundary image not simple");
  return os.str();
}

} // namespace elastireg
