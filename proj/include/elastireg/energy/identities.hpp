#pragma once

#include "elastireg/energy/densities.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace elastireg {

struct CheckResult {
  std::string name;
  double deviation = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Random rotation in SO(n).
Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng);
/// Q diag(s) R with rotations Q, R and singular values log-uniform in [smin, smax].
Eigen::MatrixXd random_positive_matrix(int n, std::mt19937_64& rng, double smin = 0.25, double smax = 4.0);
Intensity random_intensity(int channels, std::mt19937_64& rng);

/// max |psi(c1,c2,QAR) - psi(c1,c2,A)|.
double check_isotropy(const EnergySpec& spec, int trials, std::mt19937_64& rng, int channels = 1);
/// max |psi(c1,c2,A) - det A psi(c2,c1,A^{-1})|.
double check_interchange(const EnergySpec& spec, int trials, std::mt19937_64& rng, int channels = 1);
/// max |f(c1,c2,d) - d f(c2,c1,1/d)|.
double check_fidelity_reflection(const FidelitySpec& spec, int trials, std::mt19937_64& rng, int channels = 1);
/// max |Psi(A) - det A Psi(A^{-1})|.
double check_Psi_reflection(const StoredEnergySpec& spec, int n, int trials, std::mt19937_64& rng);

struct ZeroSetResult {
  double max_on_zero_set = 0.0;  // over constructed zeros
  double min_off_zero_set = 0.0;  // over perturbations at distance >= min_distance
  bool passed = false;
};

/// Zero-set probe: psi vanishes on (c1 = c2, A in SO(n)) and stays >= 1e-6 away from it.
ZeroSetResult check_zero_set(const EnergySpec& spec, int trials, std::mt19937_64& rng, double min_distance = 1e-2);

/// Convexity, reflection identity, h'(1) = -n and boundedness on a log grid over [1e-3, 1e3].
std::vector<CheckResult> check_h_conditions(const HFunction& h, int n);
/// Same with an explicit expected slope h'(1).
std::vector<CheckResult> check_h_conditions(const HFunction& h, int n, double slope);

/// Every checker above with its threshold.
std::vector<CheckResult> verify_spec(const EnergySpec& spec, int trials, std::uint64_t seed);

} // namespace elastireg
