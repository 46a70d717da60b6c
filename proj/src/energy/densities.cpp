#include "elastireg/energy/densities.hpp"

#include <cmath>

namespace elastireg {

void EnergySpec::validate() const {
  if (n < 1 || n > 3) throw InvalidInput("dimension n must be 1, 2 or 3");
  if (stored.family == StoredEnergySpec::Family::IsoPower && !(stored.alpha >= n)) {
    throw InvalidInput("iso-power stored energy needs alpha >= n");
  }
  if (!(fidelity.epsilon > 0.0)) throw InvalidInput("fidelity epsilon must be positive");
}

Vec2 singular_values2(const Mat2& A) {
  const double f2 = A.squaredNorm();
  const double d = A.determinant();
  const double sp = std::sqrt(std::max(0.0, f2 + 2.0 * d));  // s1 + s2
  const double sm = std::sqrt(std::max(0.0, f2 - 2.0 * d));  // |s1 - s2|
  return {0.5 * (sp + sm), 0.5 * std::abs(sp - sm)};
}

double eval_Psi(const StoredEnergySpec& spec, const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > 3) throw InvalidInput("Psi needs a square matrix of size 1..3");
  if (A.rows() == 2) return eval_Psi2(spec, Mat2(A));
  const double det = A.determinant();
  if (!(det > 0.0)) throw InvalidInput("Psi needs det A > 0");
  if (spec.family == StoredEnergySpec::Family::DetOnly) return spec.h(det);
  const Eigen::VectorXd v = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  double sp = 0.0, sm = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    sp += std::pow(v[i], spec.alpha);
    sm += std::pow(v[i], -spec.alpha);
  }
  return sp + det * sm + spec.h(det);
}

double eval_Psi2(const StoredEnergySpec& spec, const Mat2& A, Mat2* grad) {
  const double det = A.determinant();
  if (!(det > 0.0)) throw InvalidInput("Psi needs det A > 0");
  const double h = spec.h(det);
  if (spec.family == StoredEnergySpec::Family::DetOnly) {
    if (grad) *grad = spec.h.derivative(det) * cofactor2(A);
    return h;
  }
  const double alpha = spec.alpha;
  if (!grad) {
    const Vec2 v = singular_values2(A);
    if (alpha == 2.0) {
      const double f2 = A.squaredNorm();
      // sum v^-2 = |A|^2 / det^2 in 2D.
      return f2 + f2 / det + h;
    }
    const double sp = std::pow(v[0], alpha) + std::pow(v[1], alpha);
    const double sm = std::pow(v[0], -alpha) + std::pow(v[1], -alpha);
    return sp + det * sm + h;
  }
  if (alpha == 2.0) {
    const double f2 = A.squaredNorm();
    const Mat2 cof = cofactor2(A);
    // d(f2/det) = 2A/det - f2 cof / det^2.
    *grad = 2.0 * A + 2.0 * A / det - (f2 / (det * det)) * cof + spec.h.derivative(det) * cof;
    return f2 + f2 / det + h;
  }
  Eigen::JacobiSVD<Mat2> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec2 v = svd.singularValues();
  const Mat2 U = svd.matrixU(), V = svd.matrixV();
  // U, V may carry a reflection pair; singular values stay positive so U diag V^T = A still holds.
  const double sp = std::pow(v[0], alpha) + std::pow(v[1], alpha);
  const double sm = std::pow(v[0], -alpha) + std::pow(v[1], -alpha);
  const Vec2 dsp(alpha * std::pow(v[0], alpha - 1), alpha * std::pow(v[1], alpha - 1));
  const Vec2 dsm(-alpha * std::pow(v[0], -alpha - 1), -alpha * std::pow(v[1], -alpha - 1));
  const Mat2 cof = cofactor2(A);
  *grad = U * dsp.asDiagonal() * V.transpose() + sm * cof + det * (U * dsm.asDiagonal() * V.transpose()) +
          spec.h.derivative(det) * cof;
  return sp + det * sm + h;
}

double eval_fidelity(const FidelitySpec& spec, const Intensity& c1, const Intensity& c2, double delta,
                     double* d_delta, Intensity* d_c2) {
  if (!(delta > 0.0)) throw InvalidInput("fidelity needs det > 0");
  const double w = 1.0 / spec.epsilon;
  if (spec.family == FidelitySpec::Family::GForm) {
    const Intensity diff = c1 - c2;
    const double g = diff.squaredNorm();
    if (d_delta) *d_delta = w * g;
    if (d_c2) *d_c2 = -2.0 * w * (1.0 + delta) * diff;
    return w * (1.0 + delta) * g;
  }
  const Intensity diff = c1 - delta * c2;
  const double g = diff.squaredNorm();
  const double k = 1.0 + 1.0 / delta;
  if (d_delta) *d_delta = w * (-g / (delta * delta) - 2.0 * k * diff.dot(c2));
  if (d_c2) *d_c2 = -2.0 * w * k * delta * diff;
  return w * k * g;
}

double eval_psi(const EnergySpec& spec, const Intensity& c1, const Intensity& c2, const Eigen::MatrixXd& A) {
  const double Psi = eval_Psi(spec.stored, A);
  return Psi + eval_fidelity(spec.fidelity, c1, c2, A.determinant());
}

} // namespace elastireg
