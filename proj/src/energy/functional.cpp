#include "elastireg/energy/functional.hpp"

#include "elastireg/geometry/validation.hpp"

#include <cmath>
#include <limits>

namespace elastireg {

FirstOrderEnergy::FirstOrderEnergy(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                   std::shared_ptr<const Mesh> mesh, QuadratureRule rule)
    : spec_(spec), P2_(P2), mesh_(std::move(mesh)), rule_(rule) {
  spec_.validate();
  if (spec_.n != 2) throw InvalidInput("mesh energies are two-dimensional");
  if (P1.channels() != P2.channels()) throw InvalidInput("images have different channel counts");
  const auto& qp = quadrature_points(rule_);
  const auto& tris = mesh_->triangles();
  const auto& x = mesh_->nodes();
  c1_.resize(tris.size() * qp.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (std::size_t k = 0; k < qp.size(); ++k) {
      const auto& b = qp[k].barycentric;
      c1_[t * qp.size() + k] = P1.sample(b[0] * x[tris[t][0]] + b[1] * x[tris[t][1]] + b[2] * x[tris[t][2]]);
    }
  }
}

namespace {

struct ElementTerm {
  double stored = 0.0;
  double fidelity = 0.0;
  double barrier = 0.0;
  Vec2 g[3];
  bool ok = true;
};

} // namespace

double FirstOrderEnergy::value_and_gradient(const std::vector<Vec2>& y, std::vector<Vec2>* grad, double barrier_mu,
                                            double det_floor, EnergyBreakdown* parts) const {
  const auto& qp = quadrature_points(rule_);
  const auto& tris = mesh_->triangles();
  const std::size_t nt = tris.size();
  const bool want_grad = grad != nullptr;
  std::vector<ElementTerm> terms(nt);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(nt); ++ti) {
    const std::size_t t = static_cast<std::size_t>(ti);
    ElementTerm& e = terms[t];
    const auto& tri = tris[t];
    Mat2 E;
    E.col(0) = y[tri[1]] - y[tri[0]];
    E.col(1) = y[tri[2]] - y[tri[0]];
    const Mat2& Rinv = mesh_->reference_inverse(t);
    const Mat2 F = E * Rinv;
    const double det = F.determinant();
    if (!(det > det_floor) || !(det > 0.0)) {
      e.ok = false;
      continue;
    }
    const double area = mesh_->triangle_area(t);
    Mat2 dPsi = Mat2::Zero();
    e.stored = area * eval_Psi2(spec_.stored, F, want_grad ? &dPsi : nullptr);
    double dfd = 0.0;
    Vec2 gq[3] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    for (std::size_t k = 0; k < qp.size(); ++k) {
      const auto& b = qp[k].barycentric;
      const Vec2 z = b[0] * y[tri[0]] + b[1] * y[tri[1]] + b[2] * y[tri[2]];
      if (!P2_.in_lattice(z)) {
        e.ok = false;
        break;
      }
      IntensityGradient dc;
      const Intensity c2 = P2_.sample(z, want_grad ? &dc : nullptr);
      double d_delta = 0.0;
      Intensity d_c2;
      const double w = qp[k].weight * area;
      e.fidelity += w * eval_fidelity(spec_.fidelity, c1_[t * qp.size() + k], c2, det, &d_delta,
                                      want_grad ? &d_c2 : nullptr);
      if (want_grad) {
        dfd += w * d_delta;
        const Vec2 dz = w * (dc.transpose() * d_c2);
        for (int m = 0; m < 3; ++m) gq[m] += b[m] * dz;
      }
    }
    if (!e.ok) continue;
    if (barrier_mu > 0.0) e.barrier = barrier_mu * area * (-std::log(det) + det - 1.0);
    if (want_grad) {
      const Mat2 cof = cofactor2(F);
      Mat2 dF = area * dPsi + dfd * cof;
      if (barrier_mu > 0.0) dF += barrier_mu * area * (1.0 - 1.0 / det) * cof;
      const Mat2 G = dF * Rinv.transpose();
      e.g[1] = G.col(0) + gq[1];
      e.g[2] = G.col(1) + gq[2];
      e.g[0] = -G.col(0) - G.col(1) + gq[0];
    }
  }

  EnergyBreakdown bd;
  double barrier = 0.0;
  if (want_grad) grad->assign(y.size(), Vec2::Zero());
  for (std::size_t t = 0; t < nt; ++t) {
    const ElementTerm& e = terms[t];
    if (!e.ok) return std::numeric_limits<double>::infinity();
    bd.stored += e.stored;
    bd.fidelity += e.fidelity;
    barrier += e.barrier;
    if (want_grad) {
      for (int m = 0; m < 3; ++m) (*grad)[tris[t][m]] += e.g[m];
    }
  }
  bd.total = bd.stored + bd.fidelity;
  if (parts) *parts = bd;
  return bd.total + barrier;
}

EnergyBreakdown FirstOrderEnergy::evaluate(const std::vector<Vec2>& y) const {
  EnergyBreakdown bd;
  const double v = value_and_gradient(y, nullptr, 0.0, 0.0, &bd);
  if (!std::isfinite(v)) throw Degenerate("deformation has a collapsed element or leaves the second image");
  return bd;
}

EnergyBreakdown energy_first_order(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                                   const MeshDeformation& def, QuadratureRule rule) {
  const ValidationReport report = validate_homeomorphism(def);
  if (!report.passed) throw InvalidInput("deformation rejected: " + report.summary());
  return FirstOrderEnergy(spec, P1, P2, def.mesh, rule).evaluate(def.positions);
}

double energy_inverse_form(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                           const MeshDeformation& def, QuadratureRule rule, const Mesh* omega2_mesh) {
  const ValidationReport report = validate_homeomorphism(def);
  if (!report.passed) throw InvalidInput("deformation rejected: " + report.summary());
  std::unique_ptr<Mesh> own;
  if (!omega2_mesh) {
    own = std::make_unique<Mesh>(build_mesh(def.target, def.mesh->max_edge_length() / std::sqrt(2.0)));
    omega2_mesh = own.get();
  }
  const DeformationEvaluator eval(def);
  const auto& qp = quadrature_points(rule);
  const auto& nodes = def.mesh->nodes();
  const auto& tris = def.mesh->triangles();
  std::vector<double> Psi(tris.size()), det(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Mat2 F = def.gradient(t);
    det[t] = F.determinant();
    Psi[t] = eval_Psi2(spec.stored, F);
  }
  const auto& z_nodes = omega2_mesh->nodes();
  double total = 0.0;
  for (std::size_t s = 0; s < omega2_mesh->triangle_count(); ++s) {
    const auto& tri2 = omega2_mesh->triangles()[s];
    for (const auto& q : qp) {
      const auto& bz = q.barycentric;
      const Vec2 z = bz[0] * z_nodes[tri2[0]] + bz[1] * z_nodes[tri2[1]] + bz[2] * z_nodes[tri2[2]];
      const auto hit = eval.locate_deformed(z);
      const auto& tri = tris[hit.triangle];
      const auto& b = hit.barycentric;
      const Vec2 x = b[0] * nodes[tri[0]] + b[1] * nodes[tri[1]] + b[2] * nodes[tri[2]];
      const double d = det[hit.triangle];
      // psi(c1(xi), c2, (D xi)^{-1}) det D xi with (D xi)^{-1} = Dy on the preimage element.
      const double psi = Psi[hit.triangle] + eval_fidelity(spec.fidelity, P1.sample(x), P2.sample(z), d);
      total += q.weight * omega2_mesh->triangle_area(s) * psi / d;
    }
  }
  return total;
}

std::vector<Vec2> gradient(const EnergySpec& spec, const GridImage& P1, const GridImage& P2,
                           const MeshDeformation& def, QuadratureRule rule, double det_floor) {
  for (std::size_t t = 0; t < def.mesh->triangle_count(); ++t) {
    if (def.det(t) < det_floor) {
      throw Degenerate("element " + std::to_string(t) + " has det " + std::to_string(def.det(t)) +
                       " below the floor; increase the barrier weight");
    }
  }
  std::vector<Vec2> g;
  FirstOrderEnergy(spec, P1, P2, def.mesh, rule).value_and_gradient(def.positions, &g);
  const Domain2& target = def.target;
  for (int b : def.mesh->boundary()) {
    const Vec2& p = def.positions[b];
    bool corner = false;
    for (const auto& v : target.vertices()) corner = corner || (v - p).norm() <= kBoundaryTolerance;
    if (corner) {
      g[b].setZero();
      continue;
    }
    Vec2 tangent;
    target.point_at(target.arclength_of(p), &tangent);
    g[b] = g[b].dot(tangent) * tangent;
  }
  return g;
}

JensenResult jensen_bound_check(const StoredEnergySpec& spec, const MeshDeformation& def, const Domain2& source,
                                const AffineMap& M) {
  if (spec.family != StoredEnergySpec::Family::DetOnly) throw InvalidInput("Jensen check needs a det-only stored energy");
  const Domain2 image = source.transformed(M);
  const auto& tv = def.target.vertices();
  const auto& iv = image.vertices();
  const double tol = 1e-9 * std::max(1.0, image.diameter());
  bool match = tv.size() == iv.size();
  if (match) {
    match = false;
    for (std::size_t s = 0; s < iv.size() && !match; ++s) {
      bool ok = true;
      for (std::size_t i = 0; i < iv.size() && ok; ++i) ok = (tv[(i + s) % tv.size()] - iv[i]).norm() <= tol;
      match = ok;
    }
  }
  if (!match) throw InvalidInput("deformation target is not the affine image of the source domain");
  double sum = 0.0, area = 0.0;
  for (std::size_t t = 0; t < def.mesh->triangle_count(); ++t) {
    const double a = def.mesh->triangle_area(t);
    sum += a * spec.h(def.det(t));
    area += a;
  }
  JensenResult r;
  r.lhs = sum / area;
  r.rhs = spec.h(M.det());
  r.holds = r.lhs >= r.rhs - 1e-9;
  return r;
}

} // namespace elastireg
