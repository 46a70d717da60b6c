#include "elastireg/solve/parametrization.hpp"

#include <cmath>
#include <limits>

namespace elastireg {

BoundaryParametrization::BoundaryParametrization(const Mesh& mesh, const Domain2& target,
                                                 const std::vector<Vec2>& y0, const std::vector<int>& pinned) {
  const std::size_t n = mesh.node_count();
  if (y0.size() != n) throw InvalidInput("parametrization: wrong number of positions");
  kind_.assign(n, Kind::Free);
  var_.assign(n, -1);
  fixed_pos_ = y0;
  origin_.assign(n, Vec2::Zero());
  tangent_.assign(n, Vec2::Zero());
  for (int p : pinned) kind_.at(p) = Kind::Fixed;

  const double tol = 1e-9 * std::max(1.0, target.diameter());
  const auto& cycle = mesh.boundary();
  const std::size_t K = cycle.size();
  std::vector<char> corner_taken(target.size(), 0);
  for (int b : cycle) {
    for (std::size_t c = 0; c < target.size(); ++c) {
      if ((y0[b] - target.vertex(c)).norm() <= tol) {
        kind_[b] = Kind::Fixed;
        corner_taken[c] = 1;
      }
    }
  }
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (!corner_taken[c]) throw InvalidInput("target corner " + std::to_string(c) + " has no boundary node on it");
  }

  std::vector<double> lo, hi;
  int next_var = 0;
  std::size_t start = K;
  for (std::size_t k = 0; k < K; ++k) {
    if (kind_[cycle[k]] == Kind::Fixed) {
      start = k;
      break;
    }
  }
  if (start == K) throw InvalidInput("parametrization needs at least one fixed boundary node");
  // Walk chains between consecutive fixed boundary nodes.
  std::size_t k = start;
  do {
    std::size_t e = (k + 1) % K;
    while (kind_[cycle[e]] != Kind::Fixed) e = (e + 1) % K;
    const Vec2 P = y0[cycle[k]], Q = y0[cycle[e]];
    const double L = (Q - P).norm();
    const Vec2 t = L > 0 ? Vec2((Q - P) / L) : Vec2::Zero();
    for (std::size_t m = (k + 1) % K; m != e; m = (m + 1) % K) {
      const int node = cycle[m];
      const double s = (y0[node] - P).dot(t);
      if ((y0[node] - (P + s * t)).norm() > tol) {
        throw InvalidInput("boundary node " + std::to_string(node) + " is not on the target edge between its fixed neighbours");
      }
      kind_[node] = Kind::Slide;
      origin_[node] = P;
      tangent_[node] = t;
      var_[node] = next_var++;
      lo.push_back(0.0);
      hi.push_back(L);
    }
    k = e;
  } while (k != start);

  for (std::size_t i = 0; i < n; ++i) {
    if (kind_[i] != Kind::Free) continue;
    if (mesh.on_boundary(static_cast<int>(i))) continue;
    var_[i] = next_var;
    next_var += 2;
    for (int c = 0; c < 2; ++c) {
      lo.push_back(-std::numeric_limits<double>::infinity());
      hi.push_back(std::numeric_limits<double>::infinity());
    }
  }
  lower_ = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  upper_ = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
}

Eigen::VectorXd BoundaryParametrization::pack(const std::vector<Vec2>& y) const {
  Eigen::VectorXd v(size());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    if (kind_[i] == Kind::Slide) {
      v[var_[i]] = (y[i] - origin_[i]).dot(tangent_[i]);
    } else if (kind_[i] == Kind::Free) {
      v[var_[i]] = y[i].x();
      v[var_[i] + 1] = y[i].y();
    }
  }
  return v;
}

std::vector<Vec2> BoundaryParametrization::unpack(const Eigen::VectorXd& v) const {
  std::vector<Vec2> y = fixed_pos_;
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    if (kind_[i] == Kind::Slide) {
      y[i] = origin_[i] + v[var_[i]] * tangent_[i];
    } else if (kind_[i] == Kind::Free) {
      y[i] = Vec2(v[var_[i]], v[var_[i] + 1]);
    }
  }
  return y;
}

Eigen::VectorXd BoundaryParametrization::pull_gradient(const std::vector<Vec2>& g) const {
  Eigen::VectorXd out(size());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    if (kind_[i] == Kind::Slide) {
      out[var_[i]] = g[i].dot(tangent_[i]);
    } else if (kind_[i] == Kind::Free) {
      out[var_[i]] = g[i].x();
      out[var_[i] + 1] = g[i].y();
    }
  }
  return out;
}

} // namespace elastireg
