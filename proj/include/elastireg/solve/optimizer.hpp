#pragma once

#include "elastireg/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace elastireg {

struct OptimizerParams {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-9;
  /// Relative change of the objective treated as convergence after three consecutive steps.
  double function_tolerance = 1e-14;
  /// Barrier weights mu_b applied in turn; the last stage should be 0.
  std::vector<double> barrier_schedule{1e-4, 1e-6, 0.0};
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  int memory = 8;
  int multistart = 1;
  std::uint64_t seed = 1;
  /// Steps producing an element with det <= det_floor are rejected.
  double det_floor = 1e-8;

  void validate() const;
};

enum class OptimizeStatus { Converged, Stalled, IterationCap };
std::string to_string(OptimizeStatus s);

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  OptimizeStatus status = OptimizeStatus::IterationCap;
  std::vector<double> trajectory;
};

/// f(x, grad) returns +inf for infeasible x; grad may be null.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Limited-memory BFGS with projection onto box bounds and Armijo backtracking.
/// `on_accept` is called with every accepted iterate.
OptimizeResult minimize_lbfgs_box(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const OptimizerParams& params,
                                  const std::function<void(const Eigen::VectorXd&)>& on_accept = {});

} // namespace elastireg
