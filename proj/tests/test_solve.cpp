#include "elastireg/geometry/validation.hpp"
#include "elastireg/solve/demo1d.hpp"
#include "elastireg/solve/landmarks.hpp"
#include "elastireg/solve/morph.hpp"
#include "elastireg/solve/part_matching.hpp"
#include "elastireg/solve/registration.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace elastireg;

namespace {

Intensity scalar(double v) {
  Intensity c(1);
  c << v;
  return c;
}

EnergySpec iso(FidelitySpec::Family fam = FidelitySpec::Family::GForm, double eps = 1.0) {
  return {StoredEnergySpec::iso_power(2.0, HFunction::standard(2)), {fam, eps}, 2};
}

GridImage smooth_image(int res) {
  return GridImage::from_function(Vec2::Zero(), Vec2::Ones(), res, res, 1, [](const Vec2& x) {
    const double g = std::exp(-(x - Vec2(0.35, 0.6)).squaredNorm() / 0.03);
    return scalar(0.1 + 0.6 * g + 0.2 * x.x() * x.y());
  }, Interpolation::Bilinear);
}

// Background 0.1 with a Gaussian blob of standard width w centred at m.
GridImage blob(const Vec2& origin, const Vec2& extent, int nx, int ny, const Vec2& m, double w) {
  return GridImage::from_function(origin, extent, nx, ny, 1, [=](const Vec2& x) {
    return scalar(0.1 + 0.8 * std::exp(-(x - m).squaredNorm() / (2.0 * w * w)));
  }, Interpolation::Bilinear);
}

std::shared_ptr<const Mesh> grid_mesh(int cells) {
  return std::make_shared<const Mesh>(build_grid_mesh(Vec2::Zero(), Vec2::Ones(), cells, cells));
}

const Domain2 kSquare = Domain2::rectangle(1.0, 1.0);

} // namespace

TEST(Register, MatchedPairStaysAtZero) {
  const GridImage P = smooth_image(32);
  RegisterOptions opt;
  opt.mesh = grid_mesh(8);
  const RegistrationResult r = register_images(iso(), P, P, OptimizerParams{}, opt);
  EXPECT_LE(r.energy.total, 1e-8);
  EXPECT_TRUE(validate_homeomorphism(r.deformation).passed);
}

TEST(Register, RecoversUniformMagnification) {
  const GridImage P1 = smooth_image(48);
  const double lam = 1.3;
  const AffineMap M(lam * Mat2::Identity(), Vec2(0.1, -0.2));
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity, 96, 96);
  RegisterOptions opt;
  opt.mesh = grid_mesh(16);
  opt.perturbation = 0.02;
  const RegistrationResult r = register_images(iso(FidelitySpec::Family::GForm, 1e-2), P1, P2, OptimizerParams{}, opt);
  EXPECT_LE(rms_distance(r.deformation, M), 1e-3);
  EXPECT_NEAR(r.energy.total, std::pow(lam, 4) - lam * lam + std::pow(lam, -2) - 1.0, 1e-3);
}

TEST(Landmarks, InteriorPairsPass) {
  LandmarkSet lm;
  lm.pairs = {{Vec2(0.3, 0.3), Vec2(0.4, 0.35)}, {Vec2(0.7, 0.6), Vec2(0.6, 0.7)}};
  EXPECT_TRUE(validate_landmarks(lm, kSquare, kSquare).passed);
}

TEST(Landmarks, InteriorToBoundaryFails) {
  LandmarkSet lm;
  lm.pairs = {{Vec2(0.5, 0.5), Vec2(1.0, 0.5)}};
  const LandmarkVerdict v = validate_landmarks(lm, kSquare, kSquare);
  EXPECT_FALSE(v.check_a);
  EXPECT_FALSE(v.passed);
}

TEST(Landmarks, ReversedBoundaryOrderFails) {
  LandmarkSet lm;
  lm.pairs = {{Vec2(0.0, 0.5), Vec2(0.0, 0.5), true},
              {Vec2(0.5, 0.0), Vec2(1.0, 0.5), true},
              {Vec2(1.0, 0.5), Vec2(0.5, 0.0), true}};
  const LandmarkVerdict v = validate_landmarks(lm, kSquare, kSquare);
  EXPECT_TRUE(v.check_a);
  EXPECT_FALSE(v.check_b);
  EXPECT_FALSE(v.passed);
}

TEST(Landmarks, CircleCounterexampleIsInfeasible) {
  const Domain2 disk = Domain2::disk(Vec2(0.5, 0.5), 0.5, 64);
  LandmarkSet lm;
  const std::vector<Vec2> p{{1, 0.5}, {0.5, 1}, {0, 0.5}, {0.5, 0}};
  const std::vector<Vec2> q{{1, 0.5}, {0, 0.5}, {0.5, 1}, {0.5, 0}};
  for (int i = 0; i < 4; ++i) lm.pairs.push_back({p[i], q[i], true});
  EXPECT_FALSE(validate_landmarks(lm, disk, disk).passed);
  const GridImage P = smooth_image(16).with_support(disk);
  EXPECT_THROW(register_landmarks(iso(), P, P, lm, OptimizerParams{}), Infeasible);
}

TEST(Landmarks, SingleInteriorLandmarkIsHit) {
  const GridImage P = smooth_image(32);
  LandmarkSet lm;
  lm.pairs = {{Vec2(0.5, 0.5), Vec2(0.56, 0.47)}};
  RegisterOptions opt;
  opt.mesh = grid_mesh(8);
  const LandmarkResult r = register_landmarks(iso(), P, P, lm, OptimizerParams{}, opt);
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_TRUE(validate_homeomorphism(r.registration.deformation).passed);
}

TEST(PartMatching, PastedCopyFoundWithinOneCell) {
  const GridImage templ = blob(Vec2::Zero(), Vec2(0.5, 0.5), 16, 16, Vec2(0.25, 0.25), 0.08);
  const GridImage scene = blob(Vec2::Zero(), Vec2(2.0, 2.0), 64, 64, Vec2(1.25, 0.75), 0.08);
  RegisterOptions opt;
  opt.mesh_h = 0.125;
  const PartMatchResult r = match_part(iso(FidelitySpec::Family::GForm, 0.1), templ, scene,
                                       AffineSearchSet::scaling(1.0, 1.0), OptimizerParams{}, opt);
  EXPECT_LE((r.placement.a - Vec2(1.0, 0.5)).cwiseAbs().maxCoeff(), scene.spacing().x());
}

TEST(PartMatching, HalfScaleCopy) {
  const GridImage templ = blob(Vec2::Zero(), Vec2(0.5, 0.5), 16, 16, Vec2(0.25, 0.25), 0.08);
  const GridImage scene = blob(Vec2::Zero(), Vec2(2.0, 2.0), 64, 64, Vec2(0.625, 1.125), 0.04);
  AffineSearchSet S = AffineSearchSet::scaling(0.4, 1.2);
  S.scale_steps = 9;
  RegisterOptions opt;
  opt.mesh_h = 0.125;
  // Shrinking costs Psi(I/2) |Omega_1| ~ 0.7 of stored energy, so the fidelity must dominate.
  const PartMatchResult r = match_part(iso(FidelitySpec::Family::GForm, 1e-3), templ, scene, S, OptimizerParams{}, opt);
  EXPECT_NEAR(std::sqrt(r.placement.det()), 0.5, 0.025);
}

TEST(PartMatching, TemplateLargerThanSceneIsInfeasible) {
  const GridImage templ = smooth_image(16);
  const GridImage scene = blob(Vec2::Zero(), Vec2(0.5, 0.5), 16, 16, Vec2(0.25, 0.25), 0.08);
  EXPECT_THROW(match_part(iso(), templ, scene, AffineSearchSet::scaling(1.0, 1.0), OptimizerParams{}), Infeasible);
}

TEST(Morph, EqualImagesCostNothing) {
  const GridImage c = smooth_image(8);
  EXPECT_LE(morph_F(iso(), c, c, Rescale::Identity, OptimizerParams{}), 1e-10);
}

TEST(Morph, MassFormNearlySymmetric) {
  const GridImage c = blob(Vec2::Zero(), Vec2::Ones(), 8, 8, Vec2(0.4, 0.5), 0.2);
  const GridImage d = blob(Vec2::Zero(), Vec2::Ones(), 8, 8, Vec2(0.55, 0.45), 0.2);
  const EnergySpec s = iso(FidelitySpec::Family::MassForm);
  const double cd = morph_F(s, c, d, Rescale::Identity, OptimizerParams{});
  const double dc = morph_F(s, d, c, Rescale::Identity, OptimizerParams{});
  EXPECT_GT(cd, 0.0);
  EXPECT_NEAR(cd, dc, 0.05 * std::max(cd, dc));
}

TEST(Morph, ConstantPairBoundedByIdentityCost) {
  const GridImage c = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(0.0));
  const GridImage d = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(1.0));
  EXPECT_LE(morph_F(iso(), c, d, Rescale::Identity, OptimizerParams{}), 2.0 + 1e-9);
}

TEST(Morph, MoreStepsNeverCostMore) {
  const GridImage c = blob(Vec2::Zero(), Vec2::Ones(), 8, 8, Vec2(0.4, 0.5), 0.2);
  const GridImage d = blob(Vec2::Zero(), Vec2::Ones(), 8, 8, Vec2(0.6, 0.5), 0.15);
  MorphOptions mo;
  mo.max_sweeps = 3;
  const std::vector<double> F = estimate_rho(iso(), c, d, 3, OptimizerParams{}, mo);
  ASSERT_EQ(F.size(), 3u);
  for (std::size_t k = 1; k < F.size(); ++k) EXPECT_LE(F[k], F[k - 1] + 1e-12);
}

TEST(Morph, LinearPathEndpoints) {
  const GridImage c = smooth_image(8);
  const GridImage d = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(0.5));
  const MorphSequence s = linear_path(iso(), c, d, 4);
  ASSERT_EQ(s.intensities.size(), 5u);
  EXPECT_EQ(s.maps.size(), 4u);
  EXPECT_DOUBLE_EQ(s.intensities.front().value(3, 3, 0), c.value(3, 3, 0));
  EXPECT_DOUBLE_EQ(s.intensities.back().value(3, 3, 0), 0.5);
}

TEST(SecondOrder, IdentityOnMatchedPair) {
  const GridImage P = smooth_image(32);
  RegisterOptions opt;
  opt.grid_cells = 8;
  const RegistrationResult r = register_second_order(SecondOrderSpec{}, P, P, OptimizerParams{}, opt);
  EXPECT_LE(r.energy.total, 1e-6);
}

TEST(SecondOrder, RecoversShear) {
  const GridImage P1 = smooth_image(48);
  Mat2 A;
  A << 1.1, 0.2, 0.0, 1.0;
  const AffineMap M(A, Vec2::Zero());
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity, 96, 64);
  RegisterOptions opt;
  opt.grid_cells = 12;
  opt.perturbation = 0.02;
  const RegistrationResult r = register_second_order(SecondOrderSpec{}, P1, P2, OptimizerParams{}, opt);
  EXPECT_LE(rms_distance(r.deformation, M), 1e-3);
  EXPECT_NEAR(r.energy.total, HFunction::normalized()(A.determinant()), 1e-3);
}

TEST(Demo1D, StiffMapStaysNearIdentity) {
  const Demo1DResult r = demo_1d(Convex1D::default_psi(), 100.0, 64);
  EXPECT_LE(r.energy, r.identity_energy);
  EXPECT_NEAR(r.identity_energy, 0.5, 1e-12);
  EXPECT_GT(r.energy, 0.45);
  for (double x : {0.25, 0.5, 0.75}) EXPECT_NEAR(r.map.evaluate(x), x, 0.05);
}

TEST(Demo1D, CandidateEnergy) {
  // Slopes 3/2 then 1/2 and no mismatch: eps (Psi(3/2) + Psi(1/2)) / 2 = eps / 3.
  const double eps = 0.01;
  const Demo1DResult r = demo_1d(Convex1D::default_psi(), eps, 64);
  EXPECT_NEAR(r.candidate_energy, eps / 3.0, 1e-14);
  EXPECT_LE(r.energy, r.candidate_energy + 1e-12);
}

TEST(Demo1D, EnergyOfIdentity) {
  const Convex1D psi = Convex1D::default_psi();
  EXPECT_NEAR(energy_1d(psi, 0.3, Monotone1DMap::identity(10)), 0.5, 1e-14);
}
