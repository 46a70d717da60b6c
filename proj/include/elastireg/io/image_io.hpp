#pragma once

#include "elastireg/imagery/image.hpp"

#include <string>

namespace elastireg {

/// Reads a grayscale image from PGM (P2 or P5, first row on top) or CSV (first row is j = 0).
/// Values are scaled to [0,1] and placed on the rectangle origin + [0, extent].
GridImage read_image(const std::string& path, const Vec2& origin, const Vec2& extent,
                     Interpolation interp = Interpolation::Nearest);

/// Binary PGM of one channel, 8 bit, first row on top.
void write_pgm(const std::string& path, const GridImage& img, int channel = 0);
/// CSV of one channel with full precision, first row is j = 0.
void write_image_csv(const std::string& path, const GridImage& img, int channel = 0);

} // namespace elastireg
