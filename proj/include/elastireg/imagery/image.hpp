#pragma once

#include "elastireg/geometry/domain.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace elastireg {

inline constexpr int kMaxChannels = 4;
/// Intensity value in K = [0,1]^m.
using Intensity = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxChannels, 1>;
/// Spatial derivative of an intensity, one row per channel.
using IntensityGradient = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, kMaxChannels, 2>;

enum class Interpolation { Nearest, Bilinear };

/// Cell-centred image on a rectangular lattice with values clipped to [0,1].
///
/// The support domain defaults to the lattice rectangle and may be replaced by a
/// polygon inside it (for images of affinely mapped domains).
class GridImage {
public:
  GridImage(const Vec2& origin, const Vec2& extent, int nx, int ny, int channels, std::vector<double> data,
            Interpolation interp = Interpolation::Nearest);

  /// Samples `fn` at cell centres.
  static GridImage from_function(const Vec2& origin, const Vec2& extent, int nx, int ny, int channels,
                                 const std::function<Intensity(const Vec2&)>& fn,
                                 Interpolation interp = Interpolation::Nearest);
  static GridImage constant(const Vec2& origin, const Vec2& extent, int nx, int ny, const Intensity& value,
                            Interpolation interp = Interpolation::Nearest);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int channels() const { return channels_; }
  const Vec2& origin() const { return origin_; }
  const Vec2& extent() const { return extent_; }
  Vec2 spacing() const { return {extent_.x() / nx_, extent_.y() / ny_}; }
  Interpolation interpolation() const { return interp_; }
  const std::vector<double>& data() const { return data_; }

  double value(int i, int j, int c) const { return data_[(static_cast<std::size_t>(j) * nx_ + i) * channels_ + c]; }
  double& value(int i, int j, int c) { return data_[(static_cast<std::size_t>(j) * nx_ + i) * channels_ + c]; }
  Vec2 cell_center(int i, int j) const;
  /// Lattice cell containing x (clamped).
  std::pair<int, int> cell_of(const Vec2& x) const;

  /// Support domain of the image.
  const Domain2& domain() const { return support_; }
  Domain2 lattice_rectangle() const;

  /// Intensity at x; x may lie at most tol outside the lattice rectangle.
  Intensity sample(const Vec2& x, IntensityGradient* grad = nullptr) const;
  bool in_lattice(const Vec2& x, double tol = kBoundaryTolerance) const;

  GridImage with_interpolation(Interpolation interp) const;
  GridImage with_support(const Domain2& support) const;

  /// Integral of each channel over the support domain, exact for both interpolations
  /// on cells fully inside the support.
  Intensity integral() const;
  /// Integral of an arbitrary function over the support, with the same cell subdivision.
  double integrate(const std::function<double(const Vec2&)>& fn) const;

  double max_value() const;

private:
  Vec2 origin_, extent_;
  int nx_, ny_, channels_;
  std::vector<double> data_;
  Interpolation interp_;
  Domain2 support_;
};

/// Piecewise-constant signal on J uniform cells of (0,1).
class Signal1D {
public:
  explicit Signal1D(std::vector<double> values);
  /// Signal equal to 1 on (0, a) and 0 on (a, 1), sampled at cell centres.
  static Signal1D indicator(double a, int cells);

  const std::vector<double>& values() const { return values_; }
  std::size_t cells() const { return values_.size(); }
  double operator()(double x) const;
  /// Cell boundaries where the value changes.
  std::vector<double> breakpoints() const;

private:
  std::vector<double> values_;
};

} // namespace elastireg
