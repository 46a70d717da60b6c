#pragma once

#include "elastireg/energy/hfunction.hpp"
#include "elastireg/imagery/image.hpp"

namespace elastireg {

struct StoredEnergySpec {
  enum class Family { IsoPower, DetOnly };
  Family family = Family::IsoPower;
  double alpha = 2.0;
  HFunction h = HFunction::standard(2);

  static StoredEnergySpec iso_power(double alpha, const HFunction& h) { return {Family::IsoPower, alpha, h}; }
  static StoredEnergySpec det_only(const HFunction& h) { return {Family::DetOnly, 0.0, h}; }
};

struct FidelitySpec {
  enum class Family { GForm, MassForm };
  Family family = Family::GForm;
  /// Weight 1/epsilon on the fidelity term.
  double epsilon = 1.0;
};

struct EnergySpec {
  StoredEnergySpec stored;
  FidelitySpec fidelity;
  int n = 2;

  /// Throws InvalidInput if the spec violates its structural requirements (alpha >= n, epsilon > 0, ...).
  void validate() const;
};

/// Singular values of a 2x2 matrix in decreasing order (closed form).
Vec2 singular_values2(const Mat2& A);

/// Psi(A) for n = 1, 2, 3. Throws InvalidInput if det A <= 0.
double eval_Psi(const StoredEnergySpec& spec, const Eigen::MatrixXd& A);
/// Fast 2x2 path with optional derivative dPsi/dA.
double eval_Psi2(const StoredEnergySpec& spec, const Mat2& A, Mat2* grad = nullptr);

/// f(c1, c2, delta) with optional partial derivatives in delta and c2.
double eval_fidelity(const FidelitySpec& spec, const Intensity& c1, const Intensity& c2, double delta,
                     double* d_delta = nullptr, Intensity* d_c2 = nullptr);

/// psi(c1, c2, A) = Psi(A) + f(c1, c2, det A).
double eval_psi(const EnergySpec& spec, const Intensity& c1, const Intensity& c2, const Eigen::MatrixXd& A);

/// Cofactor matrix, d(det A)/dA.
inline Mat2 cofactor2(const Mat2& A) {
  Mat2 c;
  c << A(1, 1), -A(1, 0), -A(0, 1), A(0, 0);
  return c;
}

} // namespace elastireg
