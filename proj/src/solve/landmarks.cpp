#include "elastireg/solve/landmarks.hpp"

#include "elastireg/geometry/boundary.hpp"
#include "elastireg/geometry/validation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace elastireg {

namespace {

int edge_of(const Domain2& d, const Vec2& x, double tol) {
  for (std::size_t e = 0; e < d.size(); ++e) {
    if (point_segment_distance(x, d.vertex(e), d.vertex(e + 1)) <= tol) return static_cast<int>(e);
  }
  return -1;
}

int corner_of(const Domain2& d, const Vec2& x, double tol) {
  for (std::size_t c = 0; c < d.size(); ++c) {
    if ((d.vertex(c) - x).norm() <= tol) return static_cast<int>(c);
  }
  return -1;
}

} // namespace

LandmarkVerdict validate_landmarks(const LandmarkSet& lm, const Domain2& omega1, const Domain2& omega2, int n,
                                   double tol) {
  LandmarkVerdict v;
  const auto& P = lm.pairs;
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (std::size_t j = i + 1; j < P.size(); ++j) {
      if ((P[i].p - P[j].p).norm() <= tol || (P[i].q - P[j].q).norm() <= tol) {
        v.distinct = false;
        v.message = "landmarks " + std::to_string(i) + " and " + std::to_string(j) + " are not distinct";
      }
    }
  }
  for (std::size_t i = 0; i < P.size() && v.check_a; ++i) {
    const bool pin = omega1.contains(P[i].p, tol), qin = omega2.contains(P[i].q, tol);
    const bool pb = omega1.boundary_distance(P[i].p) <= tol, qb = omega2.boundary_distance(P[i].q) <= tol;
    if (!pin || !qin) {
      v.check_a = false;
      v.message = "(a) landmark " + std::to_string(i) + " lies outside its domain";
    } else if (pb != qb) {
      v.check_a = false;
      v.message = "(a) landmark " + std::to_string(i) + (pb ? " maps a boundary point into the interior"
                                                             : " maps an interior point onto the boundary");
    } else if (pb != P[i].boundary) {
      v.check_a = false;
      v.message = "(a) landmark " + std::to_string(i) + " has a boundary flag inconsistent with the geometry";
    }
  }
  if (n == 2 && v.check_a) {
    std::vector<Vec2> ps, qs;
    for (const auto& l : P) {
      if (!l.boundary) continue;
      ps.push_back(l.p);
      qs.push_back(l.q);
    }
    if (ps.size() >= 3 &&
        !same_cyclic_order(boundary_cyclic_order(omega1, ps, tol), boundary_cyclic_order(omega2, qs, tol))) {
      v.check_b = false;
      v.message = "(b) boundary landmarks are not in the same cyclic order on both boundaries";
    }
  }
  v.passed = v.distinct && v.check_a && v.check_b;
  if (v.passed) v.message = "ok";
  return v;
}

LandmarkResult register_landmarks(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                  const LandmarkSet& lm, const OptimizerParams& params,
                                  const RegisterOptions& options) {
  const Domain2& omega1 = P1.domain();
  const Domain2& omega2 = P2.domain();
  const LandmarkVerdict verdict = validate_landmarks(lm, omega1, omega2);
  if (!verdict.passed) throw Infeasible("landmarks rejected: " + verdict.message);
  spec.validate();
  params.validate();

  Mesh mesh = options.mesh ? *options.mesh : build_mesh(omega1, options.mesh_h);
  const double tol = 1e-9 * std::max(1.0, omega1.diameter());
  std::vector<int> nodes;
  std::set<int> used;
  for (const auto& l : lm.pairs) {
    int best = -1;
    double bd = INFINITY;
    if (l.boundary) {
      const int pc = corner_of(omega1, l.p, tol);
      const int pe = edge_of(omega1, l.p, tol);
      for (int b : mesh.boundary()) {
        const Vec2& x = mesh.nodes()[b];
        const int xc = corner_of(omega1, x, tol);
        const bool ok = pc >= 0 ? xc == pc : (xc < 0 && edge_of(omega1, x, tol) == pe);
        if (!ok || used.count(b)) continue;
        const double d = (x - l.p).norm();
        if (d < bd) {
          bd = d;
          best = b;
        }
      }
    } else {
      for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (mesh.on_boundary(static_cast<int>(i)) || used.count(static_cast<int>(i))) continue;
        const double d = (mesh.nodes()[i] - l.p).norm();
        if (d < bd) {
          bd = d;
          best = static_cast<int>(i);
        }
      }
    }
    if (best < 0) throw InvalidInput("no free mesh node to carry a landmark; refine the mesh");
    mesh = mesh.with_node_moved(best, l.p);
    nodes.push_back(best);
    used.insert(best);
  }
  auto mesh_ptr = std::make_shared<const Mesh>(std::move(mesh));
  const auto energy = std::make_shared<FirstOrderEnergy>(spec, P1, P2, mesh_ptr, options.rule);
  const NodeEnergy fn = [energy](const std::vector<Vec2>& y, std::vector<Vec2>* g, double mu, double floor,
                                 EnergyBreakdown* parts) { return energy->value_and_gradient(y, g, mu, floor, parts); };

  std::vector<BoundaryAnchor> anchors = options.anchors;
  std::vector<int> interior;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (lm.pairs[k].boundary) {
      anchors.push_back({nodes[k], lm.pairs[k].q});
    } else {
      interior.push_back(static_cast<int>(k));
    }
  }
  MeshDeformation def = anchors.empty() ? initial_deformation(mesh_ptr, omega1, omega2, [&](const MeshDeformation& d) {
    return energy->value_and_gradient(d.positions, nullptr);
  })
                                        : arclength_initializer(mesh_ptr, omega1, omega2, anchors);

  std::vector<int> pinned = options.pinned;
  for (int node : nodes) pinned.push_back(node);
  if (!interior.empty()) {
    // Homotopy: move interior landmark nodes towards q in steps, spreading the displacement
    // harmonically and relaxing the energy with the landmarks held in place.
    std::vector<char> fixed(mesh_ptr->node_count(), 0);
    for (int b : mesh_ptr->boundary()) fixed[b] = 1;
    for (int node : nodes) fixed[node] = 1;
    OptimizerParams relax = params;
    relax.max_iterations = std::min(params.max_iterations, 200);
    relax.multistart = 1;
    double t = 0.0, step = 1.0;
    while (t < 1.0) {
      if (step < 1e-6) throw Infeasible("could not move interior landmarks to their targets without folding");
      const double tn = std::min(1.0, t + step);
      std::vector<Vec2> disp(mesh_ptr->node_count(), Vec2::Zero());
      for (int k : interior) {
        const Vec2 cur = def.positions[nodes[k]];
        const Vec2 goal = tn >= 1.0 ? lm.pairs[k].q : Vec2(cur + (lm.pairs[k].q - cur) * (tn - t) / (1.0 - t));
        disp[nodes[k]] = goal - cur;
      }
      disp = harmonic_fill(*mesh_ptr, disp, fixed);
      MeshDeformation trial = def;
      for (std::size_t i = 0; i < disp.size(); ++i) trial.positions[i] += disp[i];
      if (!validate_homeomorphism(trial).passed ||
          !std::isfinite(energy->value_and_gradient(trial.positions, nullptr, 0.0, params.det_floor))) {
        step *= 0.5;
        continue;
      }
      t = tn;
      def = t < 1.0 ? minimize_deformation(fn, trial, relax, pinned).deformation : trial;
      step = std::min(1.0, 2.0 * step);
    }
  }

  LandmarkResult out{minimize_deformation(fn, def, params, pinned, options.validate_each_iteration), nodes, 0.0};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.residual = std::max(out.residual, (out.registration.deformation.positions[nodes[k]] - lm.pairs[k].q).norm());
  }
  return out;
}

} // namespace elastireg
