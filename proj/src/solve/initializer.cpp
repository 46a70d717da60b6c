#include "elastireg/solve/initializer.hpp"

#include "elastireg/geometry/validation.hpp"
#include "elastireg/solve/parametrization.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace elastireg {

std::vector<AffineMap> affine_fits(const Domain2& source, const Domain2& target) {
  std::vector<AffineMap> out;
  if (source.size() != target.size()) return out;
  const Eigen::Index n = static_cast<Eigen::Index>(source.size());
  Eigen::MatrixXd X(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) << source.vertex(i).x(), source.vertex(i).y(), 1.0;
  const double tol = 1e-9 * std::max(1.0, target.diameter());
  for (Eigen::Index s = 0; s < n; ++s) {
    Eigen::MatrixXd W(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) W.row(i) = target.vertex(i + s).transpose();
    const Eigen::MatrixXd B = X.colPivHouseholderQr().solve(W);
    if ((X * B - W).cwiseAbs().maxCoeff() > tol) continue;
    const Mat2 A = B.topRows(2).transpose();
    if (!(A.determinant() > 0.0)) continue;
    out.emplace_back(A, Vec2(B(2, 0), B(2, 1)));
  }
  return out;
}

std::vector<Vec2> harmonic_fill(const Mesh& mesh, const std::vector<Vec2>& values, const std::vector<char>& fixed) {
  const std::size_t n = mesh.node_count();
  std::vector<int> index(n, -1);
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fixed[i]) index[i] = m++;
  }
  std::vector<Vec2> out = values;
  if (m == 0) return out;
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) edges.emplace(std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3]));
  }
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 2);
  std::vector<double> diag(m, 0.0);
  for (const auto& [a, b] : edges) {
    for (int pass = 0; pass < 2; ++pass) {
      const int i = pass ? b : a, j = pass ? a : b;
      if (index[i] < 0) continue;
      diag[index[i]] += 1.0;
      if (index[j] >= 0) {
        trip.emplace_back(index[i], index[j], -1.0);
      } else {
        rhs.row(index[i]) += values[j].transpose();
      }
    }
  }
  for (int i = 0; i < m; ++i) trip.emplace_back(i, i, diag[i]);
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw InvalidInput("harmonic fill: singular Laplacian (a component has no fixed node)");
  const Eigen::MatrixXd sol = solver.solve(rhs);
  for (std::size_t i = 0; i < n; ++i) {
    if (index[i] >= 0) out[i] = sol.row(index[i]).transpose();
  }
  return out;
}

MeshDeformation arclength_initializer(std::shared_ptr<const Mesh> mesh, const Domain2& source, const Domain2& target,
                                      const std::vector<BoundaryAnchor>& anchors) {
  const auto& cycle = mesh->boundary();
  const std::size_t K = cycle.size();
  const double P1 = source.perimeter(), P2 = target.perimeter();
  if (K < target.size()) throw InvalidInput("mesh has fewer boundary nodes than the target has corners");
  std::vector<double> sigma(K), tau(K);
  for (std::size_t k = 0; k < K; ++k) {
    sigma[k] = source.arclength_of(mesh->nodes()[cycle[k]]);
    tau[k] = sigma[k] / P1 * P2;
  }
  auto wrap = [](double v, double p) {
    v = std::fmod(v, p);
    return v < 0 ? v + p : v;
  };

  std::map<std::size_t, double> fixed;  // cycle position -> target arclength
  std::map<int, std::size_t> pos;
  for (std::size_t k = 0; k < K; ++k) pos[cycle[k]] = k;
  for (const auto& a : anchors) {
    auto it = pos.find(a.node);
    if (it == pos.end()) throw InvalidInput("boundary anchor is not a boundary node");
    if (target.boundary_distance(a.point) > kBoundaryTolerance) throw InvalidInput("boundary anchor is not on the target boundary");
    fixed[it->second] = target.arclength_of(a.point);
  }
  const auto& cum = target.cumulative_length();
  for (std::size_t c = 0; c < target.size(); ++c) {
    bool occupied = false;
    for (const auto& [k, t] : fixed) occupied = occupied || std::abs(wrap(t - cum[c] + 0.5 * P2, P2) - 0.5 * P2) < 1e-12 * P2;
    if (occupied) continue;
    std::size_t best = K;
    double bd = INFINITY;
    for (std::size_t k = 0; k < K; ++k) {
      if (fixed.count(k)) continue;
      const double d = std::abs(wrap(tau[k] - cum[c] + 0.5 * P2, P2) - 0.5 * P2);
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    if (best == K) throw InvalidInput("not enough boundary nodes to occupy the target corners");
    fixed[best] = cum[c];
  }

  // Anchors must appear in increasing cyclic arclength along the boundary cycle.
  std::vector<std::pair<std::size_t, double>> order(fixed.begin(), fixed.end());
  const double t0 = order.front().second;
  double prev = -1.0;
  for (const auto& [k, t] : order) {
    const double u = wrap(t - t0, P2);
    if (!(u > prev)) throw InvalidInput("boundary anchors and target corners are not in cyclic order");
    prev = u;
  }

  std::vector<double> result(K);
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto [k1, t1] = order[a];
    const auto [k2, t2raw] = order[(a + 1) % order.size()];
    double t2 = t1 + wrap(t2raw - t1, P2);
    if (order.size() == 1) t2 = t1 + P2;
    const double s1 = sigma[k1];
    double span = wrap(sigma[k2] - s1, P1);
    if (span == 0.0) span = P1;
    result[k1] = t1;
    for (std::size_t m = (k1 + 1) % K; m != k2; m = (m + 1) % K) {
      const double frac = wrap(sigma[m] - s1, P1) / span;
      result[m] = t1 + frac * (t2 - t1);
    }
  }

  std::vector<Vec2> y = mesh->nodes();
  std::vector<char> is_fixed(mesh->node_count(), 0);
  for (std::size_t k = 0; k < K; ++k) {
    y[cycle[k]] = target.point_at(result[k]);
    is_fixed[cycle[k]] = 1;
  }
  for (const auto& [k, t] : order) {
    // Exact corner and anchor placement.
    for (std::size_t c = 0; c < target.size(); ++c) {
      if (std::abs(t - cum[c]) < 1e-12 * P2 || std::abs(t - cum[c] - P2) < 1e-12 * P2) y[cycle[k]] = target.vertex(c);
    }
  }
  for (const auto& a : anchors) y[a.node] = a.point;
  y = harmonic_fill(*mesh, y, is_fixed);
  MeshDeformation def(mesh, std::move(y), target);
  const ValidationReport report = validate_homeomorphism(def);
  if (!report.passed) throw InvalidInput("no valid initial deformation: " + report.summary());
  return def;
}

MeshDeformation initial_deformation(std::shared_ptr<const Mesh> mesh, const Domain2& source, const Domain2& target,
                                    const std::function<double(const MeshDeformation&)>& energy) {
  const auto fits = affine_fits(source, target);
  if (fits.empty()) return arclength_initializer(std::move(mesh), source, target);
  std::optional<MeshDeformation> best;
  double best_e = INFINITY;
  for (const auto& A : fits) {
    MeshDeformation d = MeshDeformation::affine(mesh, A, target);
    // Snap boundary nodes that should sit on target corners.
    for (int b : mesh->boundary()) {
      for (const auto& v : target.vertices()) {
        if ((d.positions[b] - v).norm() <= 1e-9 * std::max(1.0, target.diameter())) d.positions[b] = v;
      }
    }
    const double e = energy ? energy(d) : 0.0;
    if (!best || e < best_e) {
      best = d;
      best_e = e;
    }
  }
  return *best;
}

MeshDeformation perturb_deformation(const MeshDeformation& def, double amplitude, std::uint64_t seed,
                                    const std::vector<int>& pinned) {
  const Mesh& mesh = *def.mesh;
  const BoundaryParametrization param(mesh, def.target, def.positions, pinned);
  const Eigen::VectorXd v0 = param.pack(def.positions);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::numbers::pi;
  double kx[2], ky[2], ph[2], dir[2];
  for (int i = 0; i < 2; ++i) {
    kx[i] = 1.0 + std::floor(2.0 * u(rng));
    ky[i] = 1.0 + std::floor(2.0 * u(rng));
    ph[i] = 2.0 * pi * u(rng);
    dir[i] = 2.0 * pi * u(rng);
  }
  const double slide_phase = 2.0 * pi * u(rng);
  Vec2 lo = mesh.nodes().front(), hi = lo;
  for (const auto& x : mesh.nodes()) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const Vec2 ext = hi - lo;
  for (double amp = amplitude; amp > amplitude * 1e-6; amp *= 0.5) {
    std::vector<Vec2> y = def.positions;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
      const Vec2 r = (mesh.nodes()[i] - lo).cwiseQuotient(ext);
      if (param.is_sliding(static_cast<int>(i))) continue;
      if (param.is_fixed(static_cast<int>(i)) || mesh.on_boundary(static_cast<int>(i))) continue;
      const double bump = std::sin(pi * r.x()) * std::sin(pi * r.y());
      Vec2 d = Vec2::Zero();
      for (int k = 0; k < 2; ++k) {
        d += std::sin(pi * (kx[k] * r.x() + ky[k] * r.y()) + ph[k]) * Vec2(std::cos(dir[k]), std::sin(dir[k]));
      }
      y[i] += amp * bump * d;
    }
    Eigen::VectorXd v = param.pack(y);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (!std::isfinite(param.upper()[k])) continue;
      const double L = param.upper()[k];
      const double s = v0[k] / L;
      v[k] = std::clamp(v0[k] + amp * std::sin(pi * s) * std::sin(2.0 * pi * s + slide_phase), 0.0, L);
    }
    MeshDeformation out(def.mesh, param.unpack(v), def.target);
    if (validate_homeomorphism(out).passed) return out;
  }
  return def;
}

} // namespace elastireg
