#include "elastireg/solve/registration.hpp"

#include "elastireg/geometry/validation.hpp"
#include "elastireg/solve/parametrization.hpp"

#include <cmath>

namespace elastireg {

namespace {

RegistrationResult run_single(const NodeEnergy& energy, const MeshDeformation& init, const OptimizerParams& params,
                              const std::vector<int>& pinned, bool validate_each) {
  const BoundaryParametrization param(*init.mesh, init.target, init.positions, pinned);
  Eigen::VectorXd x = param.pack(init.positions);
  RegistrationResult out{init, {}, OptimizeStatus::Converged, 0, {}};
  for (double mu : params.barrier_schedule) {
    const Objective f = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
      const std::vector<Vec2> y = param.unpack(v);
      std::vector<Vec2> gy;
      const double val = energy(y, g ? &gy : nullptr, mu, params.det_floor, nullptr);
      if (g && std::isfinite(val)) *g = param.pull_gradient(gy);
      return val;
    };
    std::function<void(const Eigen::VectorXd&)> check;
    if (validate_each) {
      check = [&](const Eigen::VectorXd& v) {
        const ValidationReport rep = validate_homeomorphism(MeshDeformation(init.mesh, param.unpack(v), init.target));
        if (!rep.passed) throw Degenerate("accepted iterate is not a valid homeomorphism: " + rep.summary());
      };
    }
    OptimizeResult r = minimize_lbfgs_box(f, x, param.lower(), param.upper(), params, check);
    x = r.x;
    out.iterations += r.iterations;
    out.status = r.status;
    out.trajectory.insert(out.trajectory.end(), r.trajectory.begin(), r.trajectory.end());
  }
  out.deformation.positions = param.unpack(x);
  energy(out.deformation.positions, nullptr, 0.0, 0.0, &out.energy);
  return out;
}

} // namespace

RegistrationResult minimize_deformation(const NodeEnergy& energy, const MeshDeformation& init,
                                        const OptimizerParams& params, const std::vector<int>& pinned,
                                        bool validate_each_iteration) {
  params.validate();
  const ValidationReport rep = validate_homeomorphism(init);
  if (!rep.passed) throw InvalidInput("initial deformation is not a valid homeomorphism: " + rep.summary());
  RegistrationResult best = run_single(energy, init, params, pinned, validate_each_iteration);
  const double amp = 0.02 * init.target.diameter();
  for (int k = 1; k < params.multistart; ++k) {
    const MeshDeformation start = perturb_deformation(init, amp, params.seed + static_cast<std::uint64_t>(k), pinned);
    RegistrationResult r = run_single(energy, start, params, pinned, validate_each_iteration);
    if (r.energy.total < best.energy.total) best = std::move(r);
  }
  return best;
}

RegistrationResult register_images(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                   const OptimizerParams& params, const RegisterOptions& options) {
  spec.validate();
  params.validate();
  std::shared_ptr<const Mesh> mesh = options.mesh;
  if (!mesh) mesh = std::make_shared<const Mesh>(build_mesh(P1.domain(), options.mesh_h));
  const auto energy = std::make_shared<FirstOrderEnergy>(spec, P1, P2, mesh, options.rule);
  const Domain2& target = P2.domain();

  MeshDeformation init = [&] {
    if (options.initial) return *options.initial;
    if (!options.anchors.empty()) return arclength_initializer(mesh, P1.domain(), target, options.anchors);
    return initial_deformation(mesh, P1.domain(), target, [&](const MeshDeformation& d) {
      return energy->value_and_gradient(d.positions, nullptr);
    });
  }();
  if (options.perturbation > 0.0) init = perturb_deformation(init, options.perturbation, params.seed, options.pinned);

  const NodeEnergy fn = [energy](const std::vector<Vec2>& y, std::vector<Vec2>* g, double mu, double floor,
                                 EnergyBreakdown* parts) { return energy->value_and_gradient(y, g, mu, floor, parts); };
  return minimize_deformation(fn, init, params, options.pinned, options.validate_each_iteration);
}

RegistrationResult register_second_order(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                                         const OptimizerParams& params, const RegisterOptions& options) {
  spec.validate();
  params.validate();
  if (P1.domain().kind() != Domain2::Kind::Rectangle) throw InvalidInput("second-order registration needs a rectangular reference domain");
  std::shared_ptr<const Mesh> mesh = options.mesh;
  if (!mesh) {
    const Vec2 lo = P1.domain().bbox_min();
    mesh = std::make_shared<const Mesh>(
        build_grid_mesh(lo, P1.domain().bbox_max() - lo, options.grid_cells, options.grid_cells));
  }
  const auto energy = std::make_shared<SecondOrderEnergy>(spec, P1, P2, mesh, options.rule);
  const Domain2& target = P2.domain();

  MeshDeformation init = [&] {
    if (options.initial) return *options.initial;
    if (!options.anchors.empty()) return arclength_initializer(mesh, P1.domain(), target, options.anchors);
    return initial_deformation(mesh, P1.domain(), target, [&](const MeshDeformation& d) {
      return energy->value_and_gradient(d.positions, nullptr);
    });
  }();
  if (options.perturbation > 0.0) init = perturb_deformation(init, options.perturbation, params.seed, options.pinned);

  const NodeEnergy fn = [energy](const std::vector<Vec2>& y, std::vector<Vec2>* g, double mu, double floor,
                                 EnergyBreakdown* parts) { return energy->value_and_gradient(y, g, mu, floor, parts); };
  return minimize_deformation(fn, init, params, options.pinned, options.validate_each_iteration);
}

double rms_distance(const MeshDeformation& def, const AffineMap& map) {
  double s = 0.0;
  const auto& x = def.mesh->nodes();
  for (std::size_t i = 0; i < x.size(); ++i) s += (def.positions[i] - map(x[i])).squaredNorm();
  return std::sqrt(s / static_cast<double>(x.size()));
}

} // namespace elastireg
