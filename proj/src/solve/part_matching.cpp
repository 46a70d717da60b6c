#include "elastireg/solve/part_matching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace elastireg {

AffineSearchSet AffineSearchSet::scaling(double lo, double hi) {
  AffineSearchSet s;
  s.kind = Kind::ScalingRange;
  s.lambda_min = lo;
  s.lambda_max = hi;
  return s;
}

AffineSearchSet AffineSearchSet::rot_scale(double lo, double hi) {
  AffineSearchSet s = scaling(lo, hi);
  s.kind = Kind::RotScale;
  return s;
}

AffineSearchSet AffineSearchSet::general(double entry_min, double entry_max, double det_min) {
  AffineSearchSet s;
  s.kind = Kind::General;
  s.entry_min = entry_min;
  s.entry_max = entry_max;
  s.det_min = det_min;
  s.lambda_min = std::sqrt(det_min);
  s.lambda_max = std::max(s.lambda_min, entry_max);
  return s;
}

void AffineSearchSet::validate() const {
  if (!(lambda_min > 0.0 && lambda_min <= lambda_max)) throw InvalidInput("search set needs 0 < lambda_min <= lambda_max");
  if (kind == Kind::General && !(det_min > 0.0 && entry_min < entry_max)) {
    throw InvalidInput("general search set needs det_min > 0 and a nonempty entry box");
  }
  if (scale_steps < 1 || angle_steps < 1 || offset_steps < 0 || top_k < 1) throw InvalidInput("search grid counts must be positive");
}

bool AffineSearchSet::contains(const Mat2& A) const {
  const double tol = 1e-12;
  switch (kind) {
    case Kind::ScalingRange: {
      const double mu = A(0, 0);
      return std::abs(A(0, 1)) <= tol && std::abs(A(1, 0)) <= tol && std::abs(A(1, 1) - mu) <= tol &&
             mu >= lambda_min - tol && mu <= lambda_max + tol;
    }
    case Kind::RotScale: {
      const double mu = std::sqrt(std::max(0.0, A.determinant()));
      const bool conformal = std::abs(A(0, 0) - A(1, 1)) <= 1e-9 * mu && std::abs(A(0, 1) + A(1, 0)) <= 1e-9 * mu;
      return conformal && mu >= lambda_min - tol && mu <= lambda_max + tol;
    }
    case Kind::General:
      return A.minCoeff() >= entry_min && A.maxCoeff() <= entry_max && A.determinant() >= det_min;
  }
  return false;
}

namespace {

struct Placement {
  Eigen::VectorXd theta;  // parameters in the layout of the search set kind
  double cost = INFINITY;
};

AffineMap to_map(const AffineSearchSet& S, const Eigen::VectorXd& th) {
  switch (S.kind) {
    case AffineSearchSet::Kind::ScalingRange: return {th[0] * Mat2::Identity(), Vec2(th[1], th[2])};
    case AffineSearchSet::Kind::RotScale: return {th[0] * rotation2(th[1]), Vec2(th[2], th[3])};
    case AffineSearchSet::Kind::General: {
      Mat2 A;
      A << th[0], th[1], th[2], th[3];
      return {A, Vec2(th[4], th[5])};
    }
  }
  return {};
}

Eigen::VectorXd from_parts(const AffineSearchSet& S, double mu, double phi, const Vec2& a) {
  Eigen::VectorXd th;
  switch (S.kind) {
    case AffineSearchSet::Kind::ScalingRange: th.resize(3); th << mu, a.x(), a.y(); break;
    case AffineSearchSet::Kind::RotScale: th.resize(4); th << mu, phi, a.x(), a.y(); break;
    case AffineSearchSet::Kind::General: {
      const Mat2 A = mu * rotation2(phi);
      th.resize(6);
      th << A(0, 0), A(0, 1), A(1, 0), A(1, 1), a.x(), a.y();
      break;
    }
  }
  return th;
}

} // namespace

PartMatchResult match_part(const EnergySpec& spec, const GridImage& templ, const GridImage& scene,
                           const AffineSearchSet& S, const OptimizerParams& params, const RegisterOptions& options) {
  S.validate();
  spec.validate();
  params.validate();
  const Domain2& omega1 = templ.domain();
  const Domain2& omega2 = scene.domain();
  std::shared_ptr<const Mesh> mesh = options.mesh;
  if (!mesh) mesh = std::make_shared<const Mesh>(build_mesh(omega1, options.mesh_h));
  const FirstOrderEnergy energy(spec, templ, scene, mesh, options.rule);

  int evaluations = 0;
  auto cost = [&](const Eigen::VectorXd& th) -> double {
    ++evaluations;
    const AffineMap m = to_map(S, th);
    if (!(m.det() > 0.0) || !S.contains(m.A)) return INFINITY;
    if (!omega2.contains_polygon(omega1.transformed(m))) return INFINITY;
    std::vector<Vec2> y(mesh->node_count());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = m(mesh->nodes()[i]);
    return energy.value_and_gradient(y, nullptr);
  };

  auto linspace = [](double lo, double hi, int k, int i) { return k == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (k - 1); };
  const int ns = S.kind == AffineSearchSet::Kind::ScalingRange && S.lambda_min == S.lambda_max ? 1 : S.scale_steps;
  const int na = S.kind == AffineSearchSet::Kind::ScalingRange ? 1 : S.angle_steps;
  std::vector<Placement> grid;
  double offset_step = INFINITY;
  for (int is = 0; is < ns; ++is) {
    const double mu = linspace(S.lambda_min, S.lambda_max, ns, is);
    for (int ia = 0; ia < na; ++ia) {
      const double phi = na == 1 ? 0.0 : 2.0 * std::numbers::pi * ia / na;
      const Domain2 shape = omega1.transformed(AffineMap(mu * rotation2(phi), Vec2::Zero()));
      const Vec2 lo = omega2.bbox_min() - shape.bbox_min();
      const Vec2 hi = omega2.bbox_max() - shape.bbox_max();
      if (lo.x() > hi.x() || lo.y() > hi.y()) continue;
      // Automatic offset grid: one offset per scene pixel, so narrow features are not stepped over.
      const int k = S.offset_steps > 0
                        ? S.offset_steps
                        : 1 + static_cast<int>(std::ceil((hi - lo).maxCoeff() / scene.spacing().minCoeff() - 1e-9));
      if (k > 1) offset_step = std::min(offset_step, std::max((hi - lo).maxCoeff() / (k - 1), 1e-12));
      for (int ix = 0; ix < k; ++ix) {
        for (int iy = 0; iy < k; ++iy) {
          const Vec2 a(linspace(lo.x(), hi.x(), k, ix), linspace(lo.y(), hi.y(), k, iy));
          Placement p{from_parts(S, mu, phi, a), 0.0};
          p.cost = cost(p.theta);
          if (std::isfinite(p.cost)) grid.push_back(std::move(p));
        }
      }
    }
  }
  if (grid.empty()) throw Infeasible("no admissible placement a + A Omega_1 fits inside the scene");
  std::stable_sort(grid.begin(), grid.end(), [](const Placement& a, const Placement& b) { return a.cost < b.cost; });
  if (!std::isfinite(offset_step)) offset_step = omega2.diameter() / 8.0;

  // Coordinate descent on the top-k grid winners.
  const double min_offset = 0.02 * scene.spacing().minCoeff();
  Placement best;
  for (int w = 0; w < std::min<int>(S.top_k, static_cast<int>(grid.size())); ++w) {
    Placement p = grid[w];
    Eigen::VectorXd step(p.theta.size());
    for (Eigen::Index i = 0; i < step.size(); ++i) step[i] = 0.25 * (S.lambda_max - S.lambda_min) / std::max(1, ns - 1) + 1e-3;
    if (S.kind == AffineSearchSet::Kind::RotScale) step[1] = std::numbers::pi / na;
    for (Eigen::Index i = step.size() - 2; i < step.size(); ++i) step[i] = 0.5 * offset_step;
    if (S.kind == AffineSearchSet::Kind::ScalingRange && S.lambda_min == S.lambda_max) step[0] = 0.0;
    for (int sweep = 0; sweep < 200 && step.tail(2).maxCoeff() > min_offset; ++sweep) {
      bool improved = false;
      for (Eigen::Index i = 0; i < step.size(); ++i) {
        if (step[i] == 0.0) continue;
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd t = p.theta;
          t[i] += sgn * step[i];
          const double c = cost(t);
          if (c < p.cost) {
            p = {t, c};
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (p.cost < best.cost) best = p;
  }

  const AffineMap placement = to_map(S, best.theta);
  const Domain2 region = omega1.transformed(placement);
  RegisterOptions inner = options;
  inner.mesh = mesh;
  inner.initial = MeshDeformation::affine(mesh, placement, region);
  RegistrationResult reg = register_images(spec, templ, scene.with_support(region), params, inner);
  return {placement, std::move(reg), best.cost, evaluations};
}

} // namespace elastireg
