#pragma once

#include "elastireg/core.hpp"

#include <vector>

namespace elastireg {

/// Transvection 1 + p (x) nu with p . nu = 0.
struct ShearFactor {
  Eigen::VectorXd p;
  Eigen::VectorXd nu;
  int frame_index = 0;

  Eigen::MatrixXd matrix() const;
};

/// Factors M (det M = 1) into transvections whose directions nu are columns of `frame`.
/// The product factors[0] * factors[1] * ... reconstructs M.
std::vector<ShearFactor> shear_decompose(const Eigen::MatrixXd& M, const Eigen::MatrixXd& frame);

/// Ordered product of the factor matrices (identity for an empty list).
Eigen::MatrixXd shear_product(const std::vector<ShearFactor>& factors, int n);

} // namespace elastireg
