#pragma once

#include "elastireg/energy/second_order.hpp"
#include "elastireg/solve/initializer.hpp"
#include "elastireg/solve/optimizer.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace elastireg {

struct RegisterOptions {
  /// Target edge length of the reference mesh (ignored when `mesh` is set).
  double mesh_h = 1.0 / 16.0;
  /// Cells per axis of the structured grid used by the second-order functional.
  int grid_cells = 24;
  std::shared_ptr<const Mesh> mesh;
  QuadratureRule rule = QuadratureRule::Midpoint;
  std::optional<MeshDeformation> initial;
  /// Smooth perturbation applied to the initial map (0 disables it).
  double perturbation = 0.0;
  std::vector<int> pinned;
  std::vector<BoundaryAnchor> anchors;
  /// Re-run validate_homeomorphism on every accepted iterate and throw on failure.
  bool validate_each_iteration = false;
};

struct RegistrationResult {
  MeshDeformation deformation;
  EnergyBreakdown energy;
  OptimizeStatus status = OptimizeStatus::IterationCap;
  int iterations = 0;
  /// Objective value after every accepted step, barrier stages concatenated.
  std::vector<double> trajectory;
};

/// Energy of node positions with barrier weight mu and determinant floor; returns +inf when infeasible.
using NodeEnergy = std::function<double(const std::vector<Vec2>& y, std::vector<Vec2>* grad, double mu,
                                        double det_floor, EnergyBreakdown* parts)>;

/// Minimizes `energy` from `init` through the barrier schedule, boundary nodes sliding on the target.
RegistrationResult minimize_deformation(const NodeEnergy& energy, const MeshDeformation& init,
                                        const OptimizerParams& params, const std::vector<int>& pinned = {},
                                        bool validate_each_iteration = false);

/// Free-boundary registration of P1 onto P2 (target domain = support of P2).
RegistrationResult register_images(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                   const OptimizerParams& params, const RegisterOptions& options = {});

/// Registration with the second-order functional on a structured grid over the rectangle of P1.
RegistrationResult register_second_order(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                                         const OptimizerParams& params, const RegisterOptions& options = {});

/// Root-mean-square node distance between def and the affine map.
double rms_distance(const MeshDeformation& def, const AffineMap& map);

} // namespace elastireg
