#include "elastireg/imagery/image.hpp"

#include <algorithm>
#include <cmath>

namespace elastireg {

GridImage::GridImage(const Vec2& origin, const Vec2& extent, int nx, int ny, int channels, std::vector<double> data,
                     Interpolation interp)
    : origin_(origin), extent_(extent), nx_(nx), ny_(ny), channels_(channels), data_(std::move(data)),
      interp_(interp), support_(Domain2::rectangle(extent.x(), extent.y(), origin)) {
  if (nx < 1 || ny < 1) throw InvalidInput("image needs at least one pixel per axis");
  if (channels < 1 || channels > kMaxChannels) throw InvalidInput("image channel count must be in [1,4]");
  if (data_.size() != static_cast<std::size_t>(nx) * ny * channels) throw InvalidInput("image data has wrong size");
  for (double& v : data_) {
    if (!std::isfinite(v)) throw InvalidInput("image value not finite");
    v = std::clamp(v, 0.0, 1.0);
  }
}

GridImage GridImage::from_function(const Vec2& origin, const Vec2& extent, int nx, int ny, int channels,
                                   const std::function<Intensity(const Vec2&)>& fn, Interpolation interp) {
  std::vector<double> data(static_cast<std::size_t>(nx) * ny * channels);
  const Vec2 h(extent.x() / nx, extent.y() / ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Intensity v = fn(origin + Vec2((i + 0.5) * h.x(), (j + 0.5) * h.y()));
      if (v.size() != channels) throw InvalidInput("intensity function returned wrong channel count");
      for (int c = 0; c < channels; ++c) data[(static_cast<std::size_t>(j) * nx + i) * channels + c] = v[c];
    }
  }
  return GridImage(origin, extent, nx, ny, channels, std::move(data), interp);
}

GridImage GridImage::constant(const Vec2& origin, const Vec2& extent, int nx, int ny, const Intensity& value,
                              Interpolation interp) {
  return from_function(origin, extent, nx, ny, static_cast<int>(value.size()), [&](const Vec2&) { return value; },
                       interp);
}

Vec2 GridImage::cell_center(int i, int j) const {
  const Vec2 h = spacing();
  return origin_ + Vec2((i + 0.5) * h.x(), (j + 0.5) * h.y());
}

std::pair<int, int> GridImage::cell_of(const Vec2& x) const {
  const Vec2 h = spacing();
  const int i = std::clamp(static_cast<int>(std::floor((x.x() - origin_.x()) / h.x())), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((x.y() - origin_.y()) / h.y())), 0, ny_ - 1);
  return {i, j};
}

Domain2 GridImage::lattice_rectangle() const { return Domain2::rectangle(extent_.x(), extent_.y(), origin_); }

bool GridImage::in_lattice(const Vec2& x, double tol) const {
  const Vec2 hi = origin_ + extent_;
  return x.x() >= origin_.x() - tol && x.y() >= origin_.y() - tol && x.x() <= hi.x() + tol && x.y() <= hi.y() + tol;
}

Intensity GridImage::sample(const Vec2& x, IntensityGradient* grad) const {
  if (!x.allFinite() || !in_lattice(x)) throw InvalidInput("sample point outside the image domain");
  Intensity out(channels_);
  if (grad) grad->setZero(channels_, 2);
  if (interp_ == Interpolation::Nearest) {
    const auto [i, j] = cell_of(x);
    for (int c = 0; c < channels_; ++c) out[c] = value(i, j, c);
    return out;
  }
  const Vec2 h = spacing();
  const double u = (x.x() - origin_.x()) / h.x() - 0.5;
  const double v = (x.y() - origin_.y()) / h.y() - 0.5;
  int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
  double s = u - i0, t = v - j0;
  bool free_x = true, free_y = true;
  // Clamped extension outside the outermost centres.
  if (i0 < 0) { i0 = 0; s = 0.0; free_x = false; }
  if (i0 >= nx_ - 1) { i0 = nx_ - 1; s = 0.0; free_x = false; }
  if (j0 < 0) { j0 = 0; t = 0.0; free_y = false; }
  if (j0 >= ny_ - 1) { j0 = ny_ - 1; t = 0.0; free_y = false; }
  const int i1 = std::min(i0 + 1, nx_ - 1), j1 = std::min(j0 + 1, ny_ - 1);
  for (int c = 0; c < channels_; ++c) {
    const double v00 = value(i0, j0, c), v10 = value(i1, j0, c), v01 = value(i0, j1, c), v11 = value(i1, j1, c);
    const double raw = (1 - s) * (1 - t) * v00 + s * (1 - t) * v10 + (1 - s) * t * v01 + s * t * v11;
    out[c] = std::clamp(raw, 0.0, 1.0);
    if (grad && out[c] == raw) {
      if (free_x) (*grad)(c, 0) = ((1 - t) * (v10 - v00) + t * (v11 - v01)) / h.x();
      if (free_y) (*grad)(c, 1) = ((1 - s) * (v01 - v00) + s * (v11 - v10)) / h.y();
    }
  }
  return out;
}

GridImage GridImage::with_interpolation(Interpolation interp) const {
  GridImage g = *this;
  g.interp_ = interp;
  return g;
}

GridImage GridImage::with_support(const Domain2& support) const {
  const Domain2 rect = lattice_rectangle();
  if (!rect.contains_polygon(support, 1e-9 * extent_.norm())) throw InvalidInput("image support must lie inside the lattice");
  GridImage g = *this;
  g.support_ = support;
  return g;
}

double GridImage::integrate(const std::function<double(const Vec2&)>& fn) const {
  const Vec2 q = 0.5 * spacing();
  const bool full = support_.kind() == Domain2::Kind::Rectangle && support_.bbox_min().isApprox(origin_) &&
                    (support_.bbox_max() - origin_).isApprox(extent_);
  const double g = 0.5 / std::sqrt(3.0);
  double total = 0.0;
  // Quarter cells lie inside a single bilinear patch, so 2x2 Gauss is exact there.
  for (int j = 0; j < 2 * ny_; ++j) {
    for (int i = 0; i < 2 * nx_; ++i) {
      const Vec2 lo = origin_ + Vec2(i * q.x(), j * q.y());
      const Vec2 mid = lo + 0.5 * q;
      bool inside = full;
      bool outside = false;
      if (!full) {
        int count = 0;
        for (int c = 0; c < 4; ++c) count += support_.contains(lo + Vec2((c & 1) * q.x(), (c >> 1) * q.y()), 0.0);
        inside = count == 4 && support_.boundary_distance(mid) >= 0.5 * q.norm();
        outside = count == 0 && !support_.contains(mid, 0.0) && support_.boundary_distance(mid) >= 0.5 * q.norm();
      }
      if (outside) continue;
      if (inside) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) s += fn(mid + Vec2((c & 1 ? g : -g) * q.x(), (c & 2 ? g : -g) * q.y()));
        total += 0.25 * s * q.x() * q.y();
      } else {
        constexpr int k = 8;
        double s = 0.0;
        for (int b = 0; b < k; ++b) {
          for (int a = 0; a < k; ++a) {
            const Vec2 p = lo + Vec2((a + 0.5) / k * q.x(), (b + 0.5) / k * q.y());
            if (support_.contains(p, 0.0)) s += fn(p);
          }
        }
        total += s * q.x() * q.y() / (k * k);
      }
    }
  }
  return total;
}

Intensity GridImage::integral() const {
  Intensity out(channels_);
  for (int c = 0; c < channels_; ++c) out[c] = integrate([&](const Vec2& x) { return sample(x)[c]; });
  return out;
}

double GridImage::max_value() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, v);
  return m;
}

Signal1D::Signal1D(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("signal needs at least one cell");
  for (double& v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("signal value not finite");
    v = std::clamp(v, 0.0, 1.0);
  }
}

Signal1D Signal1D::indicator(double a, int cells) {
  std::vector<double> v(cells);
  for (int j = 0; j < cells; ++j) v[j] = (j + 0.5) / cells < a ? 1.0 : 0.0;
  return Signal1D(std::move(v));
}

double Signal1D::operator()(double x) const {
  if (x < -kBoundaryTolerance || x > 1.0 + kBoundaryTolerance) throw InvalidInput("signal point outside [0,1]");
  const int j = std::clamp(static_cast<int>(std::floor(x * values_.size())), 0, static_cast<int>(values_.size()) - 1);
  return values_[j];
}

std::vector<double> Signal1D::breakpoints() const {
  std::vector<double> b;
  for (std::size_t j = 1; j < values_.size(); ++j) {
    if (values_[j] != values_[j - 1]) b.push_back(static_cast<double>(j) / values_.size());
  }
  return b;
}

} // namespace elastireg
