#pragma once

#include "elastireg/solve/registration.hpp"

#include <vector>

namespace elastireg {

/// Strictly increasing rescale P with P(0) = 0 applied to every registration energy.
enum class Rescale { Identity, Sqrt };

double apply_rescale(Rescale P, double t);
double rescale_derivative(Rescale P, double t);

struct MorphOptions {
  Rescale P = Rescale::Identity;
  QuadratureRule rule = QuadratureRule::Midpoint;
  /// Alternating intensity/map sweeps.
  int max_sweeps = 20;
  /// Stop once a sweep lowers the total by less than this (relative).
  double tolerance = 1e-10;
  bool update_maps = true;
};

/// Discrete morphing path c_1 = c, ..., c_{N+1} = d with maps y_i: Omega -> Omega.
///
/// All values are upper bounds: every inner minimization is local.
struct MorphSequence {
  int N = 0;
  std::vector<GridImage> intensities;
  std::vector<MeshDeformation> maps;
  std::vector<double> step_energies;  // unscaled integral of psi for each step
  Rescale P = Rescale::Identity;
  double F_N = 0.0;                   // sum of P(step energy)
  std::vector<double> history;        // F_N after each block update
};

/// Reference mesh of the morphing domain: two triangles per pixel of the lattice.
std::shared_ptr<const Mesh> morph_mesh(const GridImage& c);

/// P(min_y integral psi(c, d(y), Dy)) with the identity as one of the starting maps.
double morph_F(const EnergySpec& spec, const GridImage& c, const GridImage& d, Rescale P,
               const OptimizerParams& params, QuadratureRule rule = QuadratureRule::Midpoint);

/// Linear intensity path with identity maps.
MorphSequence linear_path(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N,
                          const MorphOptions& options = {});
/// Appends a zero-cost step that repeats the last frame (N -> N+1 at equal cost).
MorphSequence extend_sequence(const EnergySpec& spec, const MorphSequence& s, const MorphOptions& options = {});
/// Joins c -> d and d -> e into c -> e with N + M steps.
MorphSequence concatenate(const EnergySpec& spec, const MorphSequence& a, const MorphSequence& b,
                          const MorphOptions& options = {});

/// Block-coordinate descent from `start`: closed-form interior intensities, then re-registered maps.
/// Updates that do not lower the total are rejected, so history is non-increasing.
MorphSequence morph_descent(const EnergySpec& spec, MorphSequence start, const OptimizerParams& params,
                            const MorphOptions& options = {});

/// F_N estimate: best of a fresh linear path and the optional warm start, each refined by descent.
MorphSequence morph_sequence(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N,
                             const OptimizerParams& params, const MorphOptions& options = {},
                             const MorphSequence* warm_start = nullptr);

/// F_1 .. F_{N_max}, each warm-started from the extension of its predecessor.
std::vector<double> estimate_rho(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N_max,
                                 const OptimizerParams& params, const MorphOptions& options = {});

} // namespace elastireg
