#pragma once

#include "elastireg/energy/densities.hpp"
#include "elastireg/geometry/deformation.hpp"
#include "elastireg/imagery/transfer.hpp"

#include <memory>
#include <vector>

namespace elastireg {

struct EnergyBreakdown {
  double stored = 0.0;
  double fidelity = 0.0;
  double second_order = 0.0;
  double total = 0.0;
};

/// Discretized first-order energy on a fixed reference mesh with cached c_1 samples.
///
/// Per-element contributions are computed in parallel and reduced serially in
/// element order, so results do not depend on the thread count.
class FirstOrderEnergy {
public:
  FirstOrderEnergy(const EnergySpec& spec, const GridImage& P1, const GridImage& P2, std::shared_ptr<const Mesh> mesh,
                   QuadratureRule rule = QuadratureRule::Midpoint);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const EnergySpec& spec() const { return spec_; }
  const GridImage& second_image() const { return P2_; }

  /// Energy at node positions y. Throws Degenerate if some det <= 0.
  EnergyBreakdown evaluate(const std::vector<Vec2>& y) const;

  /// Energy plus barrier mu * sum |T| (-log det + det - 1). Returns +inf when an element has
  /// det <= det_floor or a quadrature point leaves the second image. `parts` excludes the barrier.
  double value_and_gradient(const std::vector<Vec2>& y, std::vector<Vec2>* grad, double barrier_mu = 0.0,
                            double det_floor = 0.0, EnergyBreakdown* parts = nullptr) const;

private:
  EnergySpec spec_;
  GridImage P2_;
  std::shared_ptr<const Mesh> mesh_;
  QuadratureRule rule_;
  std::vector<Intensity> c1_;
};

/// Energy of a validated deformation; throws InvalidInput citing the validation report otherwise.
EnergyBreakdown energy_first_order(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                   const MeshDeformation& def, QuadratureRule rule = QuadratureRule::Midpoint);

/// Same energy integrated over Omega_2 through xi = y^{-1}, on an independent mesh of the target
/// (built with a matching size when `omega2_mesh` is null).
double energy_inverse_form(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                           const MeshDeformation& def, QuadratureRule rule = QuadratureRule::Midpoint,
                           const Mesh* omega2_mesh = nullptr);

/// Node gradient of the discretized energy. Boundary nodes are projected onto the target
/// boundary tangent and target corners get zero. Throws Degenerate below det_floor.
std::vector<Vec2> gradient(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                           const MeshDeformation& def, QuadratureRule rule = QuadratureRule::Midpoint,
                           double det_floor = 1e-10);

struct JensenResult {
  double lhs = 0.0;  // area-weighted mean of h(det Dy)
  double rhs = 0.0;  // h(det M)
  bool holds = false;
};

/// Discrete quasiconvexity probe for Psi = h(det) against y(Omega_1) = M Omega_1 + a.
/// Throws InvalidInput if def.target is not the image of `source` under `M`.
JensenResult jensen_bound_check(const StoredEnergySpec& spec, const MeshDeformation& def, const Domain2& source,
                                const AffineMap& M);

} // namespace elastireg
