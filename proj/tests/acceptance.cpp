// Acceptance run: one PASS/FAIL line per criterion. `acceptance N` runs criterion N only.
#include "elastireg/energy/identities.hpp"
#include "elastireg/energy/second_order.hpp"
#include "elastireg/geometry/shear.hpp"
#include "elastireg/geometry/validation.hpp"
#include "elastireg/imagery/transfer.hpp"
#include "elastireg/solve/demo1d.hpp"
#include "elastireg/solve/initializer.hpp"
#include "elastireg/solve/morph.hpp"
#include "elastireg/solve/registration.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace elastireg;

namespace {

// Tolerances and budgets, one block per criterion.
constexpr int kIdentityTrials = 1000;
constexpr double kIdentityTol = 1e-9;
constexpr double kIdentitySeconds = 5.0;

constexpr double kZeroExact = 1e-10;
constexpr double kZeroSeparation = 1e-6;
constexpr double kZeroDistance = 1e-2;
constexpr double kZeroSeconds = 5.0;

constexpr double kDemoEps = 1e-3;
constexpr int kDemoCells = 512;
constexpr double kDemoRelative = 1e-3;
constexpr double kDemoSlopeTol = 0.10;
constexpr double kDemoOracleTol = 1e-4;
constexpr double kDemoSeconds = 10.0;

constexpr int kMagCells = 32;
constexpr double kMagLambda = 1.5;
constexpr double kMagAngleDeg = 20.0;
constexpr double kMagRms = 1e-2;
constexpr double kMagEnergyTol = 1e-3;
constexpr double kMagSeconds = 120.0;

constexpr int kQcMatrices = 10;
constexpr int kQcDeformations = 1000;
constexpr double kQcTol = 1e-9;
constexpr double kQcSeconds = 300.0;

constexpr int kShearTrials = 100;
constexpr double kShearRecon = 1e-8;
constexpr double kShearOrtho = 1e-12;
constexpr double kShearSeconds = 1.0;

constexpr double kMorphBoundSlack = 1e-3;
constexpr double kMorphMonotone = 1e-6;
constexpr double kMorphSeconds = 180.0;

constexpr int kSecondCells = 24;
constexpr double kSecondRms = 1e-2;
constexpr double kSecondEnergyTol = 1e-3;
constexpr double kSecondSeconds = 180.0;

constexpr int kGradTrials = 20;
constexpr double kGradStep = 1e-6;
constexpr double kGradTol = 1e-5;
constexpr double kGradSeconds = 30.0;

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Intensity scalar(double v) {
  Intensity c(1);
  c << v;
  return c;
}

// Two Gaussian bumps of different size plus a ramp: no rigid symmetry of the square.
double asymmetric(const Vec2& x) {
  const double g1 = std::exp(-(x - Vec2(0.32, 0.41)).squaredNorm() / 0.05);
  const double g2 = std::exp(-(x - Vec2(0.71, 0.66)).squaredNorm() / 0.02);
  return 0.1 + 0.45 * g1 + 0.35 * g2 + 0.08 * x.x();
}

GridImage asymmetric_image(int res) {
  return GridImage::from_function(Vec2::Zero(), Vec2::Ones(), res, res, 1,
                                  [](const Vec2& x) { return scalar(asymmetric(x)); }, Interpolation::Bilinear);
}

// Psi for IsoPower from an independent SVD.
double iso_power_oracle(double alpha, const HFunction& h, const Mat2& A) {
  const Eigen::JacobiSVD<Mat2> svd(A);
  const Vec2 v = svd.singularValues();
  const double det = v[0] * v[1];
  const double hd = h.a * det * det + h.b / det + h.c * det + h.d;
  return std::pow(v[0], alpha) + std::pow(v[1], alpha) + det * (std::pow(v[0], -alpha) + std::pow(v[1], -alpha)) + hd;
}

Outcome criterion1() {
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  std::string which;
  auto track = [&](const std::string& name, double d) {
    if (d > worst || which.empty()) {
      worst = std::max(worst, d);
      which = name;
    }
  };
  const HFunction h = HFunction::standard(2);
  for (auto fam : {FidelitySpec::Family::GForm, FidelitySpec::Family::MassForm}) {
    for (const StoredEnergySpec& st : {StoredEnergySpec::iso_power(2.0, h), StoredEnergySpec::iso_power(3.0, h),
                                       StoredEnergySpec::det_only(HFunction::normalized())}) {
      EnergySpec spec{st, {fam, 1.0}, 2};
      track("isotropy", check_isotropy(spec, kIdentityTrials, rng));
      track("interchange", check_interchange(spec, kIdentityTrials, rng));
      track("fidelity reflection", check_fidelity_reflection(spec.fidelity, kIdentityTrials, rng));
      track("Psi reflection", check_Psi_reflection(st, 2, kIdentityTrials, rng));
    }
  }
  // Library Psi against the SVD oracle on the same kind of samples.
  double oracle_dev = 0.0;
  for (int t = 0; t < kIdentityTrials; ++t) {
    const Mat2 A = random_positive_matrix(2, rng);
    const double ref = iso_power_oracle(2.0, h, A);
    oracle_dev = std::max(oracle_dev, std::abs(eval_Psi2(StoredEnergySpec::iso_power(2.0, h), A) - ref) /
                                          std::max(1.0, std::abs(ref)));
  }
  track("Psi vs SVD oracle", oracle_dev);
  return {worst <= kIdentityTol, "max deviation " + fmt("%.3g", worst) + " (" + which + ")"};
}

Outcome criterion2() {
  std::mt19937_64 rng(kSeed + 2);
  bool ok = true;
  double on = 0.0, off = INFINITY;
  for (auto fam : {FidelitySpec::Family::GForm, FidelitySpec::Family::MassForm}) {
    EnergySpec spec{StoredEnergySpec::iso_power(2.0, HFunction::standard(2)), {fam, 1.0}, 2};
    const ZeroSetResult z = check_zero_set(spec, kIdentityTrials, rng, kZeroDistance);
    on = std::max(on, z.max_on_zero_set);
    off = std::min(off, z.min_off_zero_set);
  }
  ok = on <= kZeroExact && off >= kZeroSeparation;
  return {ok, "max psi on zero set " + fmt("%.3g", on) + ", min psi off it " + fmt("%.3g", off)};
}

double Psi1(double p) { return p + 1.0 / p - 2.0; }

// Exact energy of the two-slope map through (k, m), written independently of the library:
// each linear piece is split where x crosses 1/2 or y crosses 3/4, and every mismatched
// sub-piece contributes its x-length plus its y-length.
double two_slope_energy(double eps, double k, double m) {
  const double s1 = m / k, s2 = (1.0 - m) / (1.0 - k);
  double e = eps * (k * Psi1(s1) + (1.0 - k) * Psi1(s2));
  auto y = [&](double x) { return x <= k ? s1 * x : m + s2 * (x - k); };
  auto xinv = [&](double v) { return v <= m ? v / s1 : k + (v - m) / s2; };
  std::vector<double> cuts{0.0, 1.0, k, 0.5, xinv(0.75)};
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    const double mid = 0.5 * (a + b);
    const double c1 = mid < 0.5 ? 1.0 : 0.0, c2 = y(mid) < 0.75 ? 1.0 : 0.0;
    if (c1 != c2) e += (b - a) + (y(b) - y(a));
  }
  return e;
}

Demo1DResult run_demo() { return demo_1d(Convex1D::default_psi(), kDemoEps, kDemoCells); }

Outcome criterion3() {
  const Demo1DResult r = run_demo();
  const double cand = 0.5 * kDemoEps * (Psi1(1.5) + Psi1(0.5));
  const double bound = std::min(0.5, cand) * (1.0 + kDemoRelative);
  double oracle = INFINITY;
  for (int i = 20; i <= 980; ++i) {
    for (int j = 20; j <= 980; ++j) oracle = std::min(oracle, two_slope_energy(kDemoEps, i / 1000.0, j / 1000.0));
  }
  const bool slopes_ok = r.slopes.size() == 2 && std::abs(r.slopes[0] - 1.5) <= kDemoSlopeTol * 1.5 &&
                         std::abs(r.slopes[1] - 0.5) <= kDemoSlopeTol * 0.5;
  const bool ok = r.energy < bound && slopes_ok && std::abs(r.energy - oracle) <= kDemoOracleTol;
  std::string s = "energy " + fmt("%.9g", r.energy) + " < " + fmt("%.9g", bound) + ", oracle " + fmt("%.9g", oracle) +
                  ", slopes";
  for (double v : r.slopes) s += " " + fmt("%.4g", v);
  return {ok, s};
}

RegistrationResult run_magnification(double* rms) {
  const GridImage P1 = asymmetric_image(64);
  const AffineMap M(kMagLambda * rotation2(kMagAngleDeg * std::numbers::pi / 180.0), Vec2(0.2, 0.1));
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity, 128, 128);
  EnergySpec spec{StoredEnergySpec::iso_power(2.0, HFunction::standard(2)), {FidelitySpec::Family::GForm, 1e-2}, 2};
  RegisterOptions opt;
  opt.mesh = std::make_shared<const Mesh>(build_grid_mesh(Vec2::Zero(), Vec2::Ones(), kMagCells, kMagCells));
  opt.perturbation = 0.02;
  OptimizerParams params;
  params.seed = kSeed;
  RegistrationResult r = register_images(spec, P1, P2, params, opt);
  if (rms) *rms = rms_distance(r.deformation, M);
  return r;
}

Outcome criterion4() {
  double rms = 0.0;
  const RegistrationResult r = run_magnification(&rms);
  const double lam = kMagLambda;
  const double expected = std::pow(lam, 4) - lam * lam + std::pow(lam, -2) - 1.0;
  const bool ok = rms <= kMagRms && std::abs(r.energy.total - expected) <= kMagEnergyTol;
  return {ok, "RMS " + fmt("%.3g", rms) + ", energy " + fmt("%.8g", r.energy.total) + " vs " + fmt("%.8g", expected) +
                  " (" + to_string(r.status) + ")"};
}

Outcome criterion5() {
  std::mt19937_64 rng(kSeed + 5);
  const Domain2 square = Domain2::rectangle(1.0, 1.0);
  auto mesh = std::make_shared<const Mesh>(build_mesh(square, 1.0 / 8.0));
  const StoredEnergySpec det_spec = StoredEnergySpec::det_only(HFunction::normalized());
  std::uniform_real_distribution<double> amp(0.01, 0.25);
  int checked = 0, violations = 0;
  double worst_gap = INFINITY;
  for (int k = 0; k < kQcMatrices; ++k) {
    const AffineMap M(random_positive_matrix(2, rng, 0.5, 2.0), Vec2::Zero());
    const MeshDeformation base = MeshDeformation::affine(mesh, M, square.transformed(M));
    for (int t = 0; t < kQcDeformations; ++t) {
      const MeshDeformation d = perturb_deformation(base, amp(rng), rng());
      const JensenResult j = jensen_bound_check(det_spec, d, square, M);
      ++checked;
      worst_gap = std::min(worst_gap, j.lhs - j.rhs);
      if (j.lhs < j.rhs - kQcTol) ++violations;
    }
  }

  // Competitor search for IsoPower at the shear: constant matched images leave only the stored energy.
  Mat2 S;
  S << 1.0, 0.5, 0.0, 1.0;
  const AffineMap shear(S, Vec2::Zero());
  const EnergySpec iso{StoredEnergySpec::iso_power(2.0, HFunction::standard(2)), {}, 2};
  const GridImage P1 = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(0.5));
  const GridImage P2 = GridImage::constant(Vec2::Zero(), Vec2(1.5, 1.0), 12, 8, scalar(0.5))
                           .with_support(square.transformed(shear));
  const double affine_energy = eval_Psi2(iso.stored, S) * square.area();
  RegisterOptions opt;
  opt.mesh = mesh;
  opt.initial = perturb_deformation(MeshDeformation::affine(mesh, shear, P2.domain()), 0.05, kSeed);
  OptimizerParams params;
  params.seed = kSeed;
  const RegistrationResult r = register_images(iso, P1, P2, params, opt);
  const bool found = r.energy.total < affine_energy;
  std::string s = std::to_string(checked) + " h(det) competitors, " + std::to_string(violations) +
                  " violations (min gap " + fmt("%.3g", worst_gap) + "); IsoPower shear competitor " +
                  fmt("%.8g", r.energy.total) + " vs affine " + fmt("%.8g", affine_energy) +
                  (found ? " (found)" : " (none found)");
  return {violations == 0 && checked == kQcMatrices * kQcDeformations, s};
}

Eigen::MatrixXd random_sl(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(n, n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    }
    double d = A.determinant();
    if (std::abs(d) < 1e-2) continue;
    if (d < 0) {
      A.row(0) *= -1.0;
      d = -d;
    }
    return A / std::pow(d, 1.0 / n);
  }
}

Outcome criterion6() {
  std::mt19937_64 rng(kSeed + 6);
  double recon = 0.0, ortho = 0.0;
  for (int n : {2, 3}) {
    for (int t = 0; t < kShearTrials; ++t) {
      const Eigen::MatrixXd M = random_sl(n, rng);
      const auto f = shear_decompose(M, Eigen::MatrixXd::Identity(n, n));
      recon = std::max(recon, (shear_product(f, n) - M).cwiseAbs().maxCoeff());
      for (const auto& s : f) ortho = std::max(ortho, std::abs(s.p.dot(s.nu)));
    }
  }
  return {recon <= kShearRecon && ortho <= kShearOrtho,
          "max reconstruction error " + fmt("%.3g", recon) + ", max orthogonality residual " + fmt("%.3g", ortho)};
}

Outcome criterion7() {
  const EnergySpec spec{StoredEnergySpec::iso_power(2.0, HFunction::standard(2)), {FidelitySpec::Family::GForm, 1.0}, 2};
  const GridImage c = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(0.0));
  const GridImage d = GridImage::constant(Vec2::Zero(), Vec2::Ones(), 8, 8, scalar(1.0));
  OptimizerParams params;
  params.seed = kSeed;
  MorphOptions mo;
  mo.max_sweeps = 5;
  bool bound_ok = true, mono_ok = true;
  std::string s = "F_N:";
  double prev = INFINITY;
  for (int N : {1, 2, 4, 8}) {
    const double F = morph_sequence(spec, c, d, N, params, mo).F_N;
    s += " " + fmt("%.6g", F) + " (1/N=" + fmt("%.4g", 1.0 / N) + ")";
    bound_ok = bound_ok && F <= 1.0 / N + kMorphBoundSlack;
    mono_ok = mono_ok && F <= prev + kMorphMonotone;
    prev = F;
  }

  // Triangle property on a seeded random triple of smooth images.
  std::mt19937_64 rng(kSeed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_image = [&] {
    const double a = u(rng), b = u(rng), cx = u(rng), cy = u(rng);
    return GridImage::from_function(Vec2::Zero(), Vec2::Ones(), 8, 8, 1, [=](const Vec2& x) {
      return scalar(0.5 + 0.25 * a * std::sin(6.0 * x.x() + 3.0 * cx) + 0.25 * b * std::cos(5.0 * x.y() + 3.0 * cy));
    });
  };
  const GridImage i1 = random_image(), i2 = random_image(), i3 = random_image();
  const MorphSequence ab = morph_sequence(spec, i1, i2, 1, params, mo);
  const MorphSequence bc = morph_sequence(spec, i2, i3, 2, params, mo);
  const MorphSequence joined = concatenate(spec, ab, bc, mo);
  const MorphSequence ac = morph_sequence(spec, i1, i3, 3, params, mo, &joined);
  const double tri_tol = 2.0 * params.gradient_tolerance;
  const bool tri_ok = ac.F_N <= ab.F_N + bc.F_N + tri_tol;
  s += "; non-increasing " + std::string(mono_ok ? "yes" : "no") + "; triangle " + fmt("%.6g", ac.F_N) +
       " <= " + fmt("%.6g", ab.F_N + bc.F_N) + (tri_ok ? " holds" : " fails");
  return {bound_ok && mono_ok && tri_ok, s};
}

RegistrationResult run_second_order(double* rms) {
  const GridImage P1 = asymmetric_image(96);
  Mat2 A;
  A << 1.2, 0.3, 0.0, 0.9;
  const AffineMap M(A, Vec2::Zero());
  const GridImage P2 = make_related_pair(P1, M, TransferMode::Intensity, 160, 96);
  RegisterOptions opt;
  opt.grid_cells = kSecondCells;
  opt.perturbation = 0.02;
  OptimizerParams params;
  params.seed = kSeed;
  RegistrationResult r = register_second_order(SecondOrderSpec{}, P1, P2, params, opt);
  if (rms) *rms = rms_distance(r.deformation, M);
  return r;
}

Outcome criterion8() {
  double rms = 0.0;
  const RegistrationResult r = run_second_order(&rms);
  const double det = 1.2 * 0.9;
  const double expected = HFunction::normalized()(det);
  const bool ok = rms <= kSecondRms && std::abs(r.energy.total - expected) <= kSecondEnergyTol;
  return {ok, "RMS " + fmt("%.3g", rms) + ", energy " + fmt("%.8g", r.energy.total) + " vs " + fmt("%.8g", expected) +
                  " (" + to_string(r.status) + ")"};
}

// Relative error between the analytic gradient and central differences over every node coordinate.
double fd_mismatch(const std::function<double(const std::vector<Vec2>&, std::vector<Vec2>*)>& f,
                   const std::vector<Vec2>& y) {
  std::vector<Vec2> g;
  f(y, &g);
  double num = 0.0, den = 0.0;
  std::vector<Vec2> z = y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      z[i][c] = y[i][c] + kGradStep;
      const double fp = f(z, nullptr);
      z[i][c] = y[i][c] - kGradStep;
      const double fm = f(z, nullptr);
      z[i][c] = y[i][c];
      const double fd = (fp - fm) / (2.0 * kGradStep);
      num += (g[i][c] - fd) * (g[i][c] - fd);
      den += fd * fd;
    }
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// Bilinear sampling is only C^0 across lines through cell centres; the energy is differentiable
// only when no quadrature point sits on such a line, so configurations within `margin` are redrawn.
bool away_from_kinks(const MeshDeformation& def, const GridImage& img, double margin) {
  const Vec2 h = img.spacing();
  for (auto rule : {QuadratureRule::Midpoint, QuadratureRule::ThreePoint}) {
    for (const auto& tri : def.mesh->triangles()) {
      for (const auto& q : quadrature_points(rule)) {
        const Vec2 z = q.barycentric[0] * def.positions[tri[0]] + q.barycentric[1] * def.positions[tri[1]] +
                       q.barycentric[2] * def.positions[tri[2]];
        for (int c = 0; c < 2; ++c) {
          const double s = (z[c] - img.origin()[c]) / h[c] - 0.5;
          if (std::abs(s - std::round(s)) * h[c] < margin) return false;
        }
      }
    }
  }
  return true;
}

Outcome criterion9() {
  std::mt19937_64 rng(kSeed + 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Domain2 square = Domain2::rectangle(1.0, 1.0);
  auto grid = std::make_shared<const Mesh>(build_grid_mesh(Vec2::Zero(), Vec2::Ones(), 6, 6));
  double worst = 0.0;
  std::string which;
  auto record = [&](const std::string& name, double e) {
    if (e >= worst) {
      worst = e;
      which = name;
    }
  };
  for (int t = 0; t < kGradTrials; ++t) {
    const double a = u(rng), b = u(rng), ph = 6.0 * u(rng);
    auto fn = [=](const Vec2& x) {
      return scalar(0.5 + 0.3 * std::sin(3.0 * x.x() + ph) * std::cos(2.0 * x.y() + a) + 0.1 * b * x.y());
    };
    const GridImage P1 = GridImage::from_function(Vec2::Zero(), Vec2::Ones(), 16, 16, 1, fn, Interpolation::Bilinear);
    // The second image covers a margin so that every coordinate can be perturbed.
    const GridImage P2 = GridImage::from_function(Vec2(-0.25, -0.25), Vec2(1.5, 1.5), 24, 24, 1, fn,
                                                  Interpolation::Bilinear);
    MeshDeformation def = MeshDeformation::identity(grid, square);
    do {
      def = perturb_deformation(MeshDeformation::identity(grid, square), 0.05 + 0.05 * u(rng), rng());
    } while (!away_from_kinks(def, P2, 10.0 * kGradStep));
    const double alpha = 2.0 + u(rng);
    const StoredEnergySpec stored[] = {StoredEnergySpec::iso_power(alpha, HFunction::standard(2)),
                                       StoredEnergySpec::det_only(HFunction::normalized())};
    for (const auto& st : stored) {
      for (auto fam : {FidelitySpec::Family::GForm, FidelitySpec::Family::MassForm}) {
        const EnergySpec spec{st, {fam, 0.5 + u(rng)}, 2};
        for (auto rule : {QuadratureRule::Midpoint, QuadratureRule::ThreePoint}) {
          const FirstOrderEnergy E(spec, P1, P2, grid, rule);
          record(std::string(st.family == StoredEnergySpec::Family::IsoPower ? "IsoPower" : "DetOnly") +
                     (fam == FidelitySpec::Family::GForm ? "+GForm" : "+MassForm"),
                 fd_mismatch([&](const std::vector<Vec2>& y, std::vector<Vec2>* g) {
                   return E.value_and_gradient(y, g, 1e-3, 0.0);
                 }, def.positions));
        }
      }
    }
    const SecondOrderEnergy E2(SecondOrderSpec{}, P1, P2, grid);
    record("second order", fd_mismatch([&](const std::vector<Vec2>& y, std::vector<Vec2>* g) {
             return E2.value_and_gradient(y, g, 1e-3, 0.0);
           }, def.positions));
  }
  return {worst <= kGradTol, "max relative error " + fmt("%.3g", worst) + " (" + which + ")"};
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

Outcome criterion10() {
  const bool demo = same_bits(run_demo().trajectory, run_demo().trajectory);
  const bool mag = same_bits(run_magnification(nullptr).trajectory, run_magnification(nullptr).trajectory);
  const bool second = same_bits(run_second_order(nullptr).trajectory, run_second_order(nullptr).trajectory);
  return {demo && mag && second, std::string("1D ") + (demo ? "identical" : "differs") + ", magnification " +
                                     (mag ? "identical" : "differs") + ", second order " +
                                     (second ? "identical" : "differs")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

} // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "algebraic identities", kIdentitySeconds, criterion1},
      {2, "zero set", kZeroSeconds, criterion2},
      {3, "1D kinked minimizer", kDemoSeconds, criterion3},
      {4, "uniform magnification", kMagSeconds, criterion4},
      {5, "quasiconvexity probe", kQcSeconds, criterion5},
      {6, "shear decomposition", kShearSeconds, criterion6},
      {7, "morphing degeneracy", kMorphSeconds, criterion7},
      {8, "second-order affine recovery", kSecondSeconds, criterion8},
      {9, "gradient correctness", kGradSeconds, criterion9},
      {10, "determinism", 0.0, criterion10},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-30s %s  %s  [%.2f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
