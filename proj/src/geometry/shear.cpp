#include "elastireg/geometry/shear.hpp"

#include <cmath>

namespace elastireg {

Eigen::MatrixXd ShearFactor::matrix() const {
  return Eigen::MatrixXd::Identity(p.size(), p.size()) + p * nu.transpose();
}

Eigen::MatrixXd shear_product(const std::vector<ShearFactor>& factors, int n) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  for (const auto& f : factors) P = P * f.matrix();
  return P;
}

namespace {

struct RowOp {
  int target;
  int source;
  double alpha;  // row[target] += alpha * row[source]
};

} // namespace

std::vector<ShearFactor> shear_decompose(const Eigen::MatrixXd& M, const Eigen::MatrixXd& frame) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n || frame.rows() != n || frame.cols() != n) throw InvalidInput("shear decomposition needs square inputs of equal size");
  if (!M.allFinite() || !frame.allFinite()) throw InvalidInput("shear decomposition input not finite");
  if (!(std::abs(M.determinant() - 1.0) < 1e-10)) throw InvalidInput("shear decomposition needs det M = 1");
  Eigen::MatrixXd N = frame;
  for (int j = 0; j < n; ++j) {
    const double len = N.col(j).norm();
    if (!(len > 0.0)) throw InvalidInput("frame vector has zero length");
    N.col(j) /= len;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(N);
  if (lu.rank() < n || std::abs(N.determinant()) < 1e-12) throw InvalidInput("frame does not span the space");
  const Eigen::MatrixXd NinvT = N.inverse().transpose();

  // Standard-basis transvections for C = N^T M N^{-T}.
  Eigen::MatrixXd C = N.transpose() * M * NinvT;
  std::vector<RowOp> ops;
  auto apply = [&](int t, int s, double a) {
    if (a == 0.0) return;
    C.row(t) += a * C.row(s);
    ops.push_back({t, s, a});
  };
  for (int k = 0; k + 1 < n; ++k) {
    // A unit pivot needs no row operation; identity and single transvections stay minimal.
    if (std::abs(C(k, k) - 1.0) <= 1e-14) {
      for (int i = 0; i < n; ++i) {
        if (i != k) apply(i, k, -C(i, k));
      }
      continue;
    }
    int r = k + 1;
    for (int i = k + 2; i < n; ++i) {
      if (std::abs(C(i, k)) > std::abs(C(r, k))) r = i;
    }
    if (std::abs(C(r, k)) < 1e-300) {
      apply(k + 1, k, 1.0);
      r = k + 1;
    }
    apply(k, r, (1.0 - C(k, k)) / C(r, k));
    for (int i = 0; i < n; ++i) {
      if (i != k) apply(i, k, -C(i, k));
    }
  }
  for (int i = 0; i + 1 < n; ++i) apply(i, n - 1, -C(i, n - 1));

  std::vector<ShearFactor> factors;
  factors.reserve(ops.size());
  for (const auto& op : ops) {
    ShearFactor f;
    f.frame_index = op.source;
    f.nu = N.col(op.source);
    f.p = -op.alpha * NinvT.col(op.target);
    f.p -= f.p.dot(f.nu) * f.nu;
    factors.push_back(std::move(f));
  }
  return factors;
}

} // namespace elastireg
