#include "elastireg/energy/second_order.hpp"

#include "elastireg/energy/identities.hpp"
#include "elastireg/geometry/validation.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <limits>

namespace elastireg {

void SecondOrderSpec::validate() const {
  if (n != 2) throw InvalidInput("second-order energy is implemented for n = 2");
  if (!(m >= std::max(1.0, n / 2.0))) throw InvalidInput("second-order exponent needs m >= max(1, n/2)");
  const auto checks = check_h_conditions(h, n, 0.0);
  if (!checks[0].passed) throw InvalidInput("second-order h must be convex");
  if (!(h(1e-6) > h(1.0) + 1e3)) throw InvalidInput("second-order h must blow up at 0");
}

EnergySpec SecondOrderSpec::first_order_part() const {
  EnergySpec e;
  e.stored = StoredEnergySpec::det_only(h);
  e.fidelity = FidelitySpec{FidelitySpec::Family::GForm, 1.0};
  e.n = n;
  return e;
}

namespace {

using Deriv18 = Eigen::Matrix<double, 18, 1>;
using AD = Eigen::AutoDiffScalar<Deriv18>;

template <class T>
T power_half_m(const T& x, double m) {
  if (m == 2.0) return x;
  if (x == 0.0) return T(0.0);
  using std::pow;
  return pow(x, m / 2.0);
}

/// Stencil values at one node: y[(b+1)*3 + (a+1)] is the position of node (i+a, j+b).
/// Returns false if the centered Jacobian is not orientation preserving.
template <class T>
bool stencil_terms(const T (*y)[2], double dx, double dy, double m, T& forward, T& inverse) {
  auto at = [&](int a, int b, int c) -> const T& { return y[(b + 1) * 3 + (a + 1)][c]; };
  T yxx[2], yyy[2], yxy[2], yx[2], yy[2];
  for (int c = 0; c < 2; ++c) {
    yxx[c] = (at(1, 0, c) - 2.0 * at(0, 0, c) + at(-1, 0, c)) / (dx * dx);
    yyy[c] = (at(0, 1, c) - 2.0 * at(0, 0, c) + at(0, -1, c)) / (dy * dy);
    yxy[c] = (at(1, 1, c) - at(1, -1, c) - at(-1, 1, c) + at(-1, -1, c)) / (4.0 * dx * dy);
    yx[c] = (at(1, 0, c) - at(-1, 0, c)) / (2.0 * dx);
    yy[c] = (at(0, 1, c) - at(0, -1, c)) / (2.0 * dy);
  }
  T s = T(0.0);
  for (int c = 0; c < 2; ++c) s += yxx[c] * yxx[c] + 2.0 * yxy[c] * yxy[c] + yyy[c] * yyy[c];
  forward = power_half_m(s, m) * (dx * dy);

  const T det = yx[0] * yy[1] - yy[0] * yx[1];
  if (!(det > 0.0)) return false;
  // G = (Dy)^{-1}; Dy columns are y_x and y_y.
  T G[2][2] = {{yy[1] / det, -yy[0] / det}, {-yx[1] / det, yx[0] / det}};
  // H[l][a][b] = d^2 y_a / dx_b dx_l.
  T H[2][2][2];
  for (int a = 0; a < 2; ++a) {
    H[0][a][0] = yxx[a];
    H[0][a][1] = yxy[a];
    H[1][a][0] = yxy[a];
    H[1][a][1] = yyy[a];
  }
  T t2 = T(0.0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      // (G H_l G)_{ij} for each l.
      T ghg[2];
      for (int l = 0; l < 2; ++l) {
        ghg[l] = T(0.0);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) ghg[l] += G[i][a] * H[l][a][b] * G[b][j];
        }
      }
      for (int k = 0; k < 2; ++k) {
        const T tijk = -(ghg[0] * G[0][k] + ghg[1] * G[1][k]);
        t2 += tijk * tijk;
      }
    }
  }
  inverse = power_half_m(t2, m) * det * (dx * dy);
  return true;
}

} // namespace

SecondOrderEnergy::SecondOrderEnergy(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                                     std::shared_ptr<const Mesh> grid_mesh, QuadratureRule rule)
    : spec_(spec), first_((spec.validate(), spec.first_order_part()), P1, P2, grid_mesh, rule) {
  if (!grid_mesh->grid()) throw InvalidInput("second-order energy needs a structured grid mesh");
  shape_ = *grid_mesh->grid();
  if (shape_.cells_x < 2 || shape_.cells_y < 2) throw InvalidInput("grid too coarse for second differences (< 3 nodes per axis)");
}

double SecondOrderEnergy::value_and_gradient(const std::vector<Vec2>& y, std::vector<Vec2>* grad, double barrier_mu,
                                             double det_floor, EnergyBreakdown* parts) const {
  EnergyBreakdown bd;
  const double base = first_.value_and_gradient(y, grad, barrier_mu, det_floor, &bd);
  if (!std::isfinite(base)) return base;
  const int nx = shape_.cells_x, ny = shape_.cells_y;
  const double dx = shape_.spacing.x(), dy = shape_.spacing.y();
  const int ni = nx - 1;
  const std::size_t count = static_cast<std::size_t>(ni) * (ny - 1);
  std::vector<double> value(count, 0.0);
  std::vector<Deriv18> deriv(grad ? count : 0);
  std::vector<char> ok(count, 1);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(count); ++idx) {
    const int i = 1 + static_cast<int>(idx % ni), j = 1 + static_cast<int>(idx / ni);
    if (grad) {
      AD s[9][2];
      for (int b = -1; b <= 1; ++b) {
        for (int a = -1; a <= 1; ++a) {
          const int k = (b + 1) * 3 + (a + 1);
          const Vec2& p = y[shape_.node(i + a, j + b)];
          s[k][0] = AD(p.x(), 18, 2 * k);
          s[k][1] = AD(p.y(), 18, 2 * k + 1);
        }
      }
      AD f, g;
      if (!stencil_terms(s, dx, dy, spec_.m, f, g)) {
        ok[idx] = 0;
        continue;
      }
      value[idx] = (f + g).value();
      deriv[idx] = (f + g).derivatives();
    } else {
      double s[9][2];
      for (int b = -1; b <= 1; ++b) {
        for (int a = -1; a <= 1; ++a) {
          const Vec2& p = y[shape_.node(i + a, j + b)];
          s[(b + 1) * 3 + (a + 1)][0] = p.x();
          s[(b + 1) * 3 + (a + 1)][1] = p.y();
        }
      }
      double f, g;
      if (!stencil_terms(s, dx, dy, spec_.m, f, g)) {
        ok[idx] = 0;
        continue;
      }
      value[idx] = f + g;
    }
  }

  double curvature = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    if (!ok[idx]) return std::numeric_limits<double>::infinity();
    curvature += value[idx];
    if (grad) {
      const int i = 1 + static_cast<int>(idx % ni), j = 1 + static_cast<int>(idx / ni);
      for (int b = -1; b <= 1; ++b) {
        for (int a = -1; a <= 1; ++a) {
          const int k = (b + 1) * 3 + (a + 1);
          (*grad)[shape_.node(i + a, j + b)] += Vec2(deriv[idx][2 * k], deriv[idx][2 * k + 1]);
        }
      }
    }
  }
  bd.second_order = curvature;
  bd.total = bd.stored + bd.fidelity + curvature;
  if (parts) *parts = bd;
  return base + curvature;
}

std::pair<double, double> SecondOrderEnergy::curvature_terms(const std::vector<Vec2>& y) const {
  const int nx = shape_.cells_x, ny = shape_.cells_y;
  const double dx = shape_.spacing.x(), dy = shape_.spacing.y();
  double fwd = 0.0, inv = 0.0;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      double s[9][2];
      for (int b = -1; b <= 1; ++b) {
        for (int a = -1; a <= 1; ++a) {
          const Vec2& p = y[shape_.node(i + a, j + b)];
          s[(b + 1) * 3 + (a + 1)][0] = p.x();
          s[(b + 1) * 3 + (a + 1)][1] = p.y();
        }
      }
      double f, g;
      if (!stencil_terms(s, dx, dy, spec_.m, f, g)) throw Degenerate("centered Jacobian not orientation preserving");
      fwd += f;
      inv += g;
    }
  }
  return {fwd, inv};
}

EnergyBreakdown SecondOrderEnergy::evaluate(const std::vector<Vec2>& y) const {
  EnergyBreakdown bd;
  const double v = value_and_gradient(y, nullptr, 0.0, 0.0, &bd);
  if (!std::isfinite(v)) throw Degenerate("deformation has a collapsed element or leaves the second image");
  return bd;
}

EnergyBreakdown energy_second_order(const SecondOrderSpec& spec, const GridImage& P1, const GridImage& P2,
                                    const MeshDeformation& def, QuadratureRule rule) {
  const ValidationReport report = validate_homeomorphism(def);
  if (!report.passed) throw InvalidInput("deformation rejected: " + report.summary());
  return SecondOrderEnergy(spec, P1, P2, def.mesh, rule).evaluate(def.positions);
}

} // namespace elastireg
