#pragma once

#include "elastireg/solve/registration.hpp"

namespace elastireg {

/// Admissible linear parts A of the template placement y(Omega_1) = a + A Omega_1.
struct AffineSearchSet {
  enum class Kind { ScalingRange, RotScale, General };
  Kind kind = Kind::ScalingRange;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  /// General: entries of A in [entry_min, entry_max] and det A >= det_min.
  double entry_min = -2.0;
  double entry_max = 2.0;
  double det_min = 0.1;

  /// Coarse grid resolution and number of grid winners refined by coordinate descent.
  /// offset_steps = 0 places one offset per scene pixel along each axis.
  int scale_steps = 5;
  int angle_steps = 12;
  int offset_steps = 0;
  int top_k = 3;

  static AffineSearchSet scaling(double lo, double hi);
  static AffineSearchSet rot_scale(double lo, double hi);
  static AffineSearchSet general(double entry_min, double entry_max, double det_min);

  void validate() const;
  bool contains(const Mat2& A) const;
};

struct PartMatchResult {
  AffineMap placement;
  RegistrationResult registration;
  /// Energy of the rigid placement before the inner registration.
  double placement_energy = 0.0;
  int evaluations = 0;
};

/// Searches a + A Omega_1 inside the scene support, then registers the template onto that region.
/// Throws Infeasible when no admissible placement fits inside the scene.
PartMatchResult match_part(const EnergySpec& spec, const GridImage& templ, const GridImage& scene,
                           const AffineSearchSet& S, const OptimizerParams& params,
                           const RegisterOptions& options = {});

} // namespace elastireg
