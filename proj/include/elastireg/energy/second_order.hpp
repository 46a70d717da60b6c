#pragma once

#include "elastireg/energy/functional.hpp"

namespace elastireg {

/// h(det) + (1 + det)|c1 - c2|^2 + |D^2 y|^m, plus |D^2 y^{-1}|^m integrated over Omega_2.
struct SecondOrderSpec {
  HFunction h = HFunction::normalized();
  double m = 2.0;
  int n = 2;

  /// m >= max(1, n/2), h convex, and h(1e-6) > h(1) + 1e3.
  void validate() const;
  EnergySpec first_order_part() const;
};

/// Centered second differences at interior grid nodes; needs a mesh built on a structured grid.
class SecondOrderEnergy {
public:
  SecondOrderEnergy(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                    std::shared_ptr<const Mesh> grid_mesh, QuadratureRule rule = QuadratureRule::Midpoint);

  const Mesh& mesh() const { return first_.mesh(); }

  EnergyBreakdown evaluate(const std::vector<Vec2>& y) const;
  /// As FirstOrderEnergy::value_and_gradient; `parts.second_order` holds both curvature terms.
  double value_and_gradient(const std::vector<Vec2>& y, std::vector<Vec2>* grad, double barrier_mu = 0.0,
                            double det_floor = 0.0, EnergyBreakdown* parts = nullptr) const;

  /// Forward and inverse curvature terms separately (no gradient).
  std::pair<double, double> curvature_terms(const std::vector<Vec2>& y) const;

private:
  SecondOrderSpec spec_;
  FirstOrderEnergy first_;
  GridShape shape_;
};

EnergyBreakdown energy_second_order(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                                    const MeshDeformation& def, QuadratureRule rule = QuadratureRule::Midpoint);

} // namespace elastireg
