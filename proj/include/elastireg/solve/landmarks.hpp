#pragma once

#include "elastireg/solve/registration.hpp"

#include <string>
#include <vector>

namespace elastireg {

struct Landmark {
  Vec2 p;  // reference point in the closure of Omega_1
  Vec2 q;  // prescribed image in the closure of Omega_2
  bool boundary = false;
};

struct LandmarkSet {
  std::vector<Landmark> pairs;
};

struct LandmarkVerdict {
  bool distinct = true;
  bool check_a = true;  // boundary to boundary, interior to interior
  bool check_b = true;  // cyclic order of boundary landmarks preserved
  bool passed = true;
  std::string message;
};

/// Necessary conditions for a homeomorphism Omega_1 -> Omega_2 with y(p_i) = q_i.
LandmarkVerdict validate_landmarks(const LandmarkSet& lm, const Domain2& omega1, const Domain2& omega2, int n = 2,
                                   double tol = kBoundaryTolerance);

struct LandmarkResult {
  RegistrationResult registration;
  std::vector<int> nodes;  // mesh node carrying each landmark
  double residual = 0.0;   // max |y(p_i) - q_i|
};

/// Registration with landmark nodes pinned. Throws Infeasible if validate_landmarks fails.
LandmarkResult register_landmarks(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                  const LandmarkSet& lm, const OptimizerParams& params,
                                  const RegisterOptions& options = {});

} // namespace elastireg
