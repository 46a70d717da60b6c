#include "elastireg/energy/identities.hpp"

#include <algorithm>
#include <cmath>

namespace elastireg {

Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) G(i, j) = g(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

Eigen::MatrixXd random_positive_matrix(int n, std::mt19937_64& rng, double smin, double smax) {
  std::uniform_real_distribution<double> u(std::log(smin), std::log(smax));
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = std::exp(u(rng));
  return random_rotation(n, rng) * s.asDiagonal() * random_rotation(n, rng);
}

Intensity random_intensity(int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Intensity c(channels);
  for (int k = 0; k < channels; ++k) c[k] = u(rng);
  return c;
}

double check_isotropy(const EnergySpec& spec, int trials, std::mt19937_64& rng, int channels) {
  double dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Intensity c1 = random_intensity(channels, rng), c2 = random_intensity(channels, rng);
    const Eigen::MatrixXd A = random_positive_matrix(spec.n, rng);
    const Eigen::MatrixXd Q = random_rotation(spec.n, rng), R = random_rotation(spec.n, rng);
    dev = std::max(dev, std::abs(eval_psi(spec, c1, c2, Q * A * R) - eval_psi(spec, c1, c2, A)));
  }
  return dev;
}

double check_interchange(const EnergySpec& spec, int trials, std::mt19937_64& rng, int channels) {
  double dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Intensity c1 = random_intensity(channels, rng), c2 = random_intensity(channels, rng);
    const Eigen::MatrixXd A = random_positive_matrix(spec.n, rng);
    const double lhs = eval_psi(spec, c1, c2, A);
    const double rhs = eval_psi(spec, c2, c1, A.inverse()) * A.determinant();
    dev = std::max(dev, std::abs(lhs - rhs));
  }
  return dev;
}

double check_fidelity_reflection(const FidelitySpec& spec, int trials, std::mt19937_64& rng, int channels) {
  std::uniform_real_distribution<double> u(std::log(1.0 / 16), std::log(16.0));
  double dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Intensity c1 = random_intensity(channels, rng), c2 = random_intensity(channels, rng);
    const double d = std::exp(u(rng));
    dev = std::max(dev, std::abs(eval_fidelity(spec, c1, c2, d) - d * eval_fidelity(spec, c2, c1, 1.0 / d)));
  }
  return dev;
}

double check_Psi_reflection(const StoredEnergySpec& spec, int n, int trials, std::mt19937_64& rng) {
  double dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd A = random_positive_matrix(n, rng);
    dev = std::max(dev, std::abs(eval_Psi(spec, A) - A.determinant() * eval_Psi(spec, A.inverse())));
  }
  return dev;
}

ZeroSetResult check_zero_set(const EnergySpec& spec, int trials, std::mt19937_64& rng, double min_distance) {
  ZeroSetResult r;
  r.min_off_zero_set = INFINITY;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  const int n = spec.n;
  for (int t = 0; t < trials; ++t) {
    const Intensity c = random_intensity(1, rng);
    const Eigen::MatrixXd Q = random_rotation(n, rng);
    r.max_on_zero_set = std::max(r.max_on_zero_set, std::abs(eval_psi(spec, c, c, Q)));

    // Perturb the intensity, the matrix, or both, each by at least min_distance.
    const int mode = static_cast<int>(u(rng) * 3.0);
    Intensity c2 = c;
    Eigen::MatrixXd A = Q;
    if (mode != 1) {
      const double size = min_distance + u(rng) * (0.5 - min_distance);
      c2[0] = c[0] + size <= 1.0 ? c[0] + size : c[0] - size;
    }
    if (mode != 0 && spec.stored.family == StoredEnergySpec::Family::DetOnly) {
      // Zero set of h(det) is det = 1; move the determinant instead.
      const double size = min_distance + u(rng) * (0.5 - min_distance);
      const double det = u(rng) < 0.5 ? 1.0 - size : 1.0 + size;
      A = std::pow(det, 1.0 / n) * Q * random_positive_matrix(n, rng, 0.5, 2.0);
      A /= std::pow(A.determinant() / det, 1.0 / n);
    } else if (mode != 0) {
      // A = Q P with P symmetric positive definite; dist(A, SO(n)) = |P - 1|.
      Eigen::VectorXd s(n);
      for (int i = 0; i < n; ++i) s[i] = g(rng);
      s *= (min_distance + u(rng) * (0.5 - min_distance)) / s.norm();
      const Eigen::MatrixXd R = random_rotation(n, rng);
      const Eigen::MatrixXd P = R * (Eigen::VectorXd::Ones(n) + s).asDiagonal() * R.transpose();
      A = Q * P;
    }
    r.min_off_zero_set = std::min(r.min_off_zero_set, eval_psi(spec, c, c2, A));
  }
  r.passed = r.max_on_zero_set <= 1e-10 && r.min_off_zero_set >= 1e-6;
  return r;
}

std::vector<CheckResult> check_h_conditions(const HFunction& h, int n) { return check_h_conditions(h, n, -n); }

std::vector<CheckResult> check_h_conditions(const HFunction& h, int, double slope) {
  constexpr int K = 601;
  double convex_min = INFINITY, refl = 0.0, lo = INFINITY;
  double first = 0.0, last = 0.0;
  for (int k = 0; k < K; ++k) {
    const double d = std::pow(10.0, -3.0 + 6.0 * k / (K - 1));
    convex_min = std::min(convex_min, h.second_derivative(d));
    const double v = h(d);
    refl = std::max(refl, std::abs(v - d * h(1.0 / d)) / std::max(1.0, std::abs(v)));
    lo = std::min(lo, v);
    if (k == 0) first = v;
    if (k == K - 1) last = v;
  }
  const double step = 1e-5;
  const double dh1 = (h(1.0 + step) - h(1.0 - step)) / (2.0 * step);
  std::vector<CheckResult> out;
  out.push_back({"h_convex", -convex_min, 0.0, convex_min > 0.0});
  out.push_back({"h_reflection", refl, 1e-10, refl <= 1e-10});
  out.push_back({"h_slope_at_one", std::abs(dh1 - slope), 1e-6, std::abs(dh1 - slope) <= 1e-6});
  // Bounded below: the grid minimum is finite and not attained at either end.
  const bool bounded = std::isfinite(lo) && first > lo && last > lo;
  out.push_back({"h_bounded_below", bounded ? 0.0 : 1.0, 0.0, bounded});
  return out;
}

std::vector<CheckResult> verify_spec(const EnergySpec& spec, int trials, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  const double iso_tol = spec.stored.family == StoredEnergySpec::Family::DetOnly ? 1e-12 : 1e-9;
  double d = check_isotropy(spec, trials, rng);
  out.push_back({"isotropy", d, iso_tol, d <= iso_tol});
  d = check_interchange(spec, trials, rng);
  out.push_back({"interchange", d, 1e-9, d <= 1e-9});
  d = check_fidelity_reflection(spec.fidelity, trials, rng);
  out.push_back({"fidelity_reflection", d, 1e-12, d <= 1e-12});
  d = check_Psi_reflection(spec.stored, spec.n, trials, rng);
  out.push_back({"Psi_reflection", d, 1e-9, d <= 1e-9});
  const ZeroSetResult z = check_zero_set(spec, trials, rng);
  out.push_back({"zero_set_exact", z.max_on_zero_set, 1e-10, z.max_on_zero_set <= 1e-10});
  out.push_back({"zero_set_separation", z.min_off_zero_set, 1e-6, z.min_off_zero_set >= 1e-6});
  // Iso-power needs h'(1) = -n; for h(det) alone the minimum must sit at det = 1.
  const bool det_only = spec.stored.family == StoredEnergySpec::Family::DetOnly;
  for (auto& c : check_h_conditions(spec.stored.h, spec.n, det_only ? 0.0 : -spec.n)) out.push_back(c);
  return out;
}

} // namespace elastireg
