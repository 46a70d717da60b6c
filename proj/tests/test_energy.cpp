#include "elastireg/energy/identities.hpp"
#include "elastireg/energy/second_order.hpp"
#include "elastireg/geometry/radial_map.hpp"
#include "elastireg/geometry/validation.hpp"
#include "elastireg/imagery/transfer.hpp"
#include "elastireg/solve/initializer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace elastireg;

namespace {

Intensity scalar(double v) {
  Intensity c(1);
  c << v;
  return c;
}

const HFunction kStd = HFunction::standard(2);

EnergySpec iso(FidelitySpec::Family fam = FidelitySpec::Family::GForm, double eps = 1.0) {
  return {StoredEnergySpec::iso_power(2.0, kStd), {fam, eps}, 2};
}

GridImage smooth_image(int res, double phase = 0.0, Interpolation interp = Interpolation::Bilinear) {
  return GridImage::from_function(Vec2::Zero(), Vec2::Ones(), res, res, 1, [=](const Vec2& x) {
    return scalar(0.5 + 0.3 * std::sin(3.0 * x.x() + phase) * std::cos(2.0 * x.y()) + 0.1 * x.y());
  }, interp);
}

std::shared_ptr<const Mesh> grid_mesh(int cells) {
  return std::make_shared<const Mesh>(build_grid_mesh(Vec2::Zero(), Vec2::Ones(), cells, cells));
}

const Domain2 kSquare = Domain2::rectangle(1.0, 1.0);

} // namespace

TEST(HFunction, StandardConditions) {
  for (const auto& c : check_h_conditions(kStd, 2)) EXPECT_TRUE(c.passed) << c.name;
  EXPECT_DOUBLE_EQ(kStd(1.0), -4.0);
}

TEST(HFunction, NormalizedHasZeroSlopeAndValue) {
  const HFunction h = HFunction::normalized();
  EXPECT_DOUBLE_EQ(h(1.0), 0.0);
  EXPECT_NEAR(h.derivative(1.0), 0.0, 1e-15);
  for (const auto& c : check_h_conditions(h, 2, 0.0)) EXPECT_TRUE(c.passed) << c.name;
}

TEST(HFunction, WrongSlopeIsReported) {
  bool slope_failed = false;
  for (const auto& c : check_h_conditions(HFunction::normalized(), 2)) {
    if (c.name == "h_slope_at_one") slope_failed = !c.passed;
  }
  EXPECT_TRUE(slope_failed);
}

TEST(Psi, VanishesOnRotations) {
  for (double a : {0.0, 0.3, 2.0, -1.1}) EXPECT_NEAR(eval_Psi2(StoredEnergySpec::iso_power(2.0, kStd), rotation2(a)), 0.0, 1e-12);
}

TEST(Psi, HandValueDiagonal) {
  Mat2 A;
  A << 2.0, 0.0, 0.0, 0.5;
  EXPECT_NEAR(eval_Psi2(StoredEnergySpec::iso_power(2.0, kStd), A), 4.5, 1e-12);
}

TEST(Psi, UniformScaling) {
  for (double l : {0.5, 1.0, 1.5, 3.0}) {
    const double expected = std::pow(l, 4) - l * l + std::pow(l, -2) - 1.0;
    EXPECT_NEAR(eval_Psi2(StoredEnergySpec::iso_power(2.0, kStd), l * Mat2::Identity()), expected,
                1e-12 * std::max(1.0, expected));
  }
}

TEST(Psi, ThreeDimensionalRotationZero) {
  std::mt19937_64 rng(3);
  EXPECT_NEAR(eval_Psi(StoredEnergySpec::iso_power(3.0, HFunction::standard(3)), random_rotation(3, rng)), 0.0, 1e-10);
}

TEST(Psi, RejectsNonPositiveDeterminant) {
  Mat2 A;
  A << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(eval_Psi2(StoredEnergySpec::iso_power(2.0, kStd), A), InvalidInput);
}

TEST(Psi, AlphaBelowDimensionRejected) {
  EnergySpec s = iso();
  s.stored.alpha = 1.5;
  EXPECT_THROW(s.validate(), InvalidInput);
}

TEST(Integrand, ZeroOnMatchedRotation) {
  EXPECT_NEAR(eval_psi(iso(), scalar(0.3), scalar(0.3), rotation2(0.7)), 0.0, 1e-12);
}

TEST(Integrand, MassFormZeroSet) {
  const EnergySpec s = iso(FidelitySpec::Family::MassForm);
  EXPECT_NEAR(eval_fidelity(s.fidelity, scalar(1.0), scalar(0.5), 2.0), 0.0, 1e-15);
}

TEST(Integrand, GFormUnitMismatch) {
  EXPECT_NEAR(eval_psi(iso(), scalar(1.0), scalar(0.0), Eigen::MatrixXd::Identity(2, 2)), 2.0, 1e-14);
}

TEST(Integrand, MassFormHandValues) {
  const FidelitySpec f{FidelitySpec::Family::MassForm, 1.0};
  EXPECT_DOUBLE_EQ(eval_fidelity(f, scalar(1.0), scalar(1.0), 2.0), 1.5);
  EXPECT_DOUBLE_EQ(2.0 * eval_fidelity(f, scalar(1.0), scalar(1.0), 0.5), 1.5);
}

TEST(Checkers, IsotropyTrivialAndRandom) {
  std::mt19937_64 rng(1);
  EXPECT_LE(check_isotropy(iso(), 1000, rng), 1e-9);
  const EnergySpec det{StoredEnergySpec::det_only(HFunction::normalized()), {}, 2};
  EXPECT_LE(check_isotropy(det, 1000, rng), 1e-12);
}

TEST(Checkers, InterchangeDiagonal) {
  Mat2 A;
  A << 2.0, 0.0, 0.0, 0.5;
  const StoredEnergySpec st = StoredEnergySpec::iso_power(2.0, kStd);
  EXPECT_NEAR(eval_Psi2(st, A), A.determinant() * eval_Psi2(st, A.inverse()), 1e-12);
  std::mt19937_64 rng(2);
  EXPECT_LE(check_interchange(iso(FidelitySpec::Family::MassForm), 1000, rng), 1e-9);
}

TEST(Checkers, ZeroSet) {
  std::mt19937_64 rng(5);
  const ZeroSetResult z = check_zero_set(iso(), 1000, rng);
  EXPECT_TRUE(z.passed);
  EXPECT_LE(z.max_on_zero_set, 1e-10);
  EXPECT_GE(z.min_off_zero_set, 1e-6);
}

TEST(Checkers, VerifyDefaultSpecPasses) {
  for (const auto& c : verify_spec(iso(FidelitySpec::Family::MassForm), 200, 9)) EXPECT_TRUE(c.passed) << c.name;
}

TEST(FirstOrder, MatchedPairIdentityIsZero) {
  const GridImage P = smooth_image(16);
  const auto d = MeshDeformation::identity(grid_mesh(8), kSquare);
  EXPECT_NEAR(energy_first_order(iso(), P, P, d).total, 0.0, 1e-12);
}

TEST(FirstOrder, UniformMagnification) {
  const GridImage P1 = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(0.4));
  const AffineMap M(1.5 * Mat2::Identity(), Vec2::Zero());
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity);
  const auto d = MeshDeformation::affine(grid_mesh(8), M, P2.domain());
  const double expected = std::pow(1.5, 4) - 2.25 + 1.0 / 2.25 - 1.0;
  EXPECT_NEAR(energy_first_order(iso(), P1, P2, d).total, expected, 1e-12);
}

TEST(FirstOrder, ConstantMismatchFidelity) {
  const GridImage one = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 4, 4, scalar(1.0));
  const GridImage zero = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 4, 4, scalar(0.0));
  const auto e = energy_first_order(iso(), one, zero, MeshDeformation::identity(grid_mesh(4), kSquare));
  EXPECT_NEAR(e.fidelity, 2.0, 1e-13);
}

TEST(FirstOrder, InvalidDeformationRejected) {
  const auto mesh = grid_mesh(4);
  MeshDeformation d = MeshDeformation::identity(mesh, kSquare);
  d.positions[mesh->grid()->node(2, 2)] += Vec2(0.4, 0.0);
  const GridImage P = smooth_image(8);
  EXPECT_THROW(energy_first_order(iso(), P, P, d), InvalidInput);
}

TEST(FirstOrder, RigidMotionEquivariance) {
  // Quarter turns map cell centres onto cell centres, so the moved images are exact copies.
  const auto fn = [](const Vec2& x) { return scalar(0.5 + 0.3 * std::sin(3.0 * x.x()) * std::cos(2.0 * x.y())); };
  const GridImage P1 = GridImage::from_function(Vec2::Zero(), Vec2::Ones(), 16, 16, 1, fn, Interpolation::Bilinear);
  const GridImage P2 = GridImage::from_function(Vec2(-0.2, -0.2), Vec2(1.4, 1.4), 24, 24, 1, fn, Interpolation::Bilinear);
  const auto mesh = grid_mesh(6);
  const auto y = perturb_deformation(MeshDeformation::identity(mesh, kSquare), 0.05, 7);
  const EnergySpec s = iso(FidelitySpec::Family::MassForm);
  const double base = FirstOrderEnergy(s, P1, P2, mesh).value_and_gradient(y.positions, nullptr);

  const AffineMap E1(rotation2(std::numbers::pi / 2), Vec2(0.3, -0.2)), E2(rotation2(-std::numbers::pi / 2), Vec2(2.0, 1.0));
  const GridImage Q1 = make_related_pair(P1, E1, TransferMode::Intensity);
  const GridImage Q2 = make_related_pair(P2, E2, TransferMode::Intensity);
  std::vector<Vec2> ref, def;
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    ref.push_back(E1(mesh->nodes()[i]));
    def.push_back(E2(y.positions[i]));
  }
  const auto moved = std::make_shared<const Mesh>(ref, mesh->triangles());
  const double rotated = FirstOrderEnergy(s, Q1, Q2, moved).value_and_gradient(def, nullptr);
  EXPECT_GT(base, 1e-4);
  EXPECT_NEAR(rotated, base, 1e-9 * base);
}

TEST(InverseForm, IdentityEqualsForward) {
  const GridImage P1 = smooth_image(16, 0.0, Interpolation::Nearest), P2 = smooth_image(16, 0.5, Interpolation::Nearest);
  const auto mesh = grid_mesh(8);
  const auto d = MeshDeformation::identity(mesh, kSquare);
  EXPECT_NEAR(energy_inverse_form(iso(FidelitySpec::Family::MassForm), P1, P2, d, QuadratureRule::Midpoint, mesh.get()),
              energy_first_order(iso(FidelitySpec::Family::MassForm), P1, P2, d).total, 1e-12);
}

TEST(InverseForm, DoublingConstants) {
  const GridImage P1 = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 4, 4, scalar(0.8));
  const GridImage P2 = GridImage::constant(Vec2::Zero(), Vec2(2.0, 2.0), 8, 8, scalar(0.3));
  const AffineMap two(2.0 * Mat2::Identity(), Vec2::Zero());
  const auto d = MeshDeformation::affine(grid_mesh(4), two, kSquare.transformed(two));
  const EnergySpec s = iso(FidelitySpec::Family::MassForm);
  EXPECT_NEAR(energy_inverse_form(s, P1, P2, d), energy_first_order(s, P1, P2, d).total, 1e-10);
}

TEST(InverseForm, RefinementAgreement) {
  const GridImage P1 = smooth_image(64, 0.0, Interpolation::Nearest), P2 = smooth_image(64, 0.4, Interpolation::Nearest);
  const EnergySpec s = iso(FidelitySpec::Family::MassForm);
  double prev = INFINITY;
  for (int cells : {8, 16, 32}) {
    const auto mesh = grid_mesh(cells);
    std::vector<Vec2> pos = mesh->nodes();
    for (auto& p : pos) p += 0.04 * std::sin(std::numbers::pi * p.x()) * std::sin(std::numbers::pi * p.y()) * Vec2(1.0, -0.5);
    const MeshDeformation d(mesh, pos, kSquare);
    const double gap = std::abs(energy_inverse_form(s, P1, P2, d) - energy_first_order(s, P1, P2, d).total);
    EXPECT_LT(gap, prev * 1.05);
    prev = gap;
  }
  EXPECT_LT(prev, 2e-2);
}

TEST(SecondOrder, AffineHasNoCurvature) {
  const GridImage P1 = smooth_image(32);
  Mat2 A;
  A << 1.2, 0.3, 0.0, 0.9;
  const AffineMap M(A, Vec2::Zero());
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity, 96, 64);
  const auto mesh = grid_mesh(8);
  const auto d = MeshDeformation::affine(mesh, M, P2.domain());
  const SecondOrderEnergy E(SecondOrderSpec{}, P1, P2, mesh);
  const auto [fwd, inv] = E.curvature_terms(d.positions);
  EXPECT_NEAR(fwd, 0.0, 1e-18);
  EXPECT_NEAR(inv, 0.0, 1e-18);
  EXPECT_NEAR(E.evaluate(d.positions).total, HFunction::normalized()(A.determinant()), 5e-4);
}

TEST(SecondOrder, IdentityMatchedIsZero) {
  const GridImage P = smooth_image(16);
  const auto mesh = grid_mesh(8);
  EXPECT_NEAR(energy_second_order(SecondOrderSpec{}, P, P, MeshDeformation::identity(mesh, kSquare)).total, 0.0, 1e-12);
}

TEST(SecondOrder, SingleNodeBumpStencil) {
  // Moving one node by delta in x: the node itself contributes 4/h^4 + 4/h^4, the four axial
  // neighbours 1/h^4 each, the four diagonal neighbours 2 (1/4h^2)^2 each; times delta^2 h^2.
  const int cells = 8;
  const double h = 1.0 / cells, delta = 0.01;
  const auto mesh = grid_mesh(cells);
  std::vector<Vec2> pos = mesh->nodes();
  pos[mesh->grid()->node(4, 4)].x() += delta;
  const GridImage P = smooth_image(16);
  const SecondOrderEnergy E(SecondOrderSpec{}, P, P, mesh);
  const double hand = delta * delta * h * h * (8.0 / std::pow(h, 4) + 4.0 / std::pow(h, 4) + 4.0 * 2.0 / (16.0 * std::pow(h, 4)));
  EXPECT_NEAR(E.curvature_terms(pos).first, hand, 1e-12 * hand);
}

TEST(SecondOrder, NeedsGridMesh) {
  const GridImage P = smooth_image(16);
  const auto mesh = std::make_shared<const Mesh>(build_mesh(Domain2::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 0.25));
  if (!mesh->grid()) EXPECT_THROW(SecondOrderEnergy(SecondOrderSpec{}, P, P, mesh), InvalidInput);
}

TEST(Gradient, StationaryAtMatchedIdentity) {
  const GridImage P = smooth_image(16);
  const auto g = gradient(iso(), P, P, MeshDeformation::identity(grid_mesh(4), kSquare));
  double norm = 0.0;
  for (const auto& v : g) norm = std::max(norm, v.norm());
  EXPECT_LE(norm, 1e-8);
}

TEST(Gradient, CentralDifferences) {
  const auto fn = [](const Vec2& x) { return scalar(0.5 + 0.3 * std::sin(3.0 * x.x()) * std::cos(2.0 * x.y())); };
  const GridImage P1 = GridImage::from_function(Vec2::Zero(), Vec2::Ones(), 16, 16, 1, fn, Interpolation::Bilinear);
  const GridImage P2 = GridImage::from_function(Vec2(-0.2, -0.2), Vec2(1.4, 1.4), 24, 24, 1, fn, Interpolation::Bilinear);
  const auto mesh = grid_mesh(5);
  const auto y = perturb_deformation(MeshDeformation::identity(mesh, kSquare), 0.06, 21);
  const FirstOrderEnergy E(iso(FidelitySpec::Family::MassForm), P1, P2, mesh);
  std::vector<Vec2> g;
  E.value_and_gradient(y.positions, &g);
  const double step = 1e-6;
  double num = 0.0, den = 0.0;
  std::vector<Vec2> z = y.positions;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      z[i][c] += step;
      const double fp = E.value_and_gradient(z, nullptr);
      z[i][c] -= 2.0 * step;
      const double fm = E.value_and_gradient(z, nullptr);
      z[i][c] += step;
      const double fd = (fp - fm) / (2.0 * step);
      num += std::pow(fd - g[i][c], 2);
      den += fd * fd;
    }
  }
  EXPECT_LE(std::sqrt(num / den), 1e-5);
}

TEST(Gradient, TranslationOfPeriodicPatternHasNoDrift) {
  // Doubly periodic pattern matched by the identity: moving all interior nodes together
  // does not change the energy to first order.
  const auto fn = [](const Vec2& x) {
    return scalar(0.5 + 0.25 * std::cos(2.0 * std::numbers::pi * x.x()) * std::cos(2.0 * std::numbers::pi * x.y()));
  };
  const GridImage P = GridImage::from_function(Vec2::Zero(), Vec2::Ones(), 32, 32, 1, fn, Interpolation::Bilinear);
  const auto mesh = grid_mesh(8);
  const auto g = gradient(iso(), P, P, MeshDeformation::identity(mesh, kSquare));
  Vec2 sum = Vec2::Zero();
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    if (!mesh->on_boundary(static_cast<int>(i))) sum += g[i];
  }
  EXPECT_LE(sum.norm(), 1e-10);
}

TEST(Jensen, AffineMapIsEquality) {
  const StoredEnergySpec st = StoredEnergySpec::det_only(HFunction::normalized());
  Mat2 A;
  A << 1.3, 0.2, -0.1, 0.8;
  const AffineMap M(A, Vec2::Zero());
  const auto d = MeshDeformation::affine(grid_mesh(4), M, kSquare.transformed(M));
  const JensenResult j = jensen_bound_check(st, d, kSquare, M);
  EXPECT_NEAR(j.lhs, j.rhs, 1e-13);
  EXPECT_TRUE(j.holds);
}

TEST(Jensen, RadialMapGap) {
  // Radial map inside a disk domain: h(det) averages to lambda h(p) + (1-lambda) h(q) on the
  // unit disk and h(m) elsewhere.
  const double p = 0.5, q = 1.5, lambda = 0.5;
  const RadialMap r = radial_map(p, q, lambda, Vec2::Zero());
  const double R = 3.0;
  const Domain2 disk = Domain2::disk(Vec2::Zero(), R, 96);
  auto mesh = std::make_shared<const Mesh>(build_mesh(disk, 0.08));
  const MeshDeformation d = r.sample(mesh, disk);
  const HFunction h = HFunction::normalized();
  const StoredEnergySpec st = StoredEnergySpec::det_only(h);
  const double m = r.m();
  const JensenResult j = jensen_bound_check(st, d, disk, AffineMap(std::sqrt(m) * Mat2::Identity(), Vec2::Zero()));
  const double ratio = std::numbers::pi / disk.area();
  const double expected = ratio * (lambda * h(p) + (1.0 - lambda) * h(q) - h(m));
  EXPECT_GE(j.lhs - j.rhs, 0.0);
  EXPECT_NEAR(j.lhs - j.rhs, expected, 0.15 * expected);
}

TEST(Jensen, RandomCompetitorsNeverViolate) {
  const StoredEnergySpec st = StoredEnergySpec::det_only(kStd);
  std::mt19937_64 rng(8);
  const auto mesh = grid_mesh(6);
  for (int k = 0; k < 3; ++k) {
    const AffineMap M(random_positive_matrix(2, rng, 0.5, 2.0), Vec2::Zero());
    const auto base = MeshDeformation::affine(mesh, M, kSquare.transformed(M));
    for (int t = 0; t < 100; ++t) {
      const auto d = perturb_deformation(base, 0.2, rng());
      const JensenResult j = jensen_bound_check(st, d, kSquare, M);
      EXPECT_GE(j.lhs, j.rhs - 1e-9);
    }
  }
}
