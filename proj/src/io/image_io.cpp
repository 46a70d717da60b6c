#include "elastireg/io/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace elastireg {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Next header token of a PGM file, skipping comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw InvalidInput(path + ": truncated PGM header");
}

int pgm_int(std::istream& in, const std::string& path, const char* field) {
  const std::string tok = pgm_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(path + ": invalid PGM " + field + " '" + tok + "'");
  }
}

GridImage read_pgm(const std::string& path, const Vec2& origin, const Vec2& extent, Interpolation interp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read image " + path);
  const std::string magic = pgm_token(in, path);
  if (magic != "P2" && magic != "P5") throw InvalidInput(path + ": not a P2/P5 PGM file");
  const int w = pgm_int(in, path, "width"), h = pgm_int(in, path, "height"), maxval = pgm_int(in, path, "maxval");
  if (maxval > 65535) throw InvalidInput(path + ": PGM maxval above 65535");
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  if (magic == "P2") {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int v;
        if (!(in >> v)) throw InvalidInput(path + ": truncated PGM data");
        data[static_cast<std::size_t>(h - 1 - r) * w + c] = static_cast<double>(v) / maxval;
      }
    }
  } else {
    in.get();
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * bytes);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw InvalidInput(path + ": truncated PGM data");
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t k = (static_cast<std::size_t>(r) * w + c) * bytes;
        const int v = bytes == 2 ? raw[k] * 256 + raw[k + 1] : raw[k];
        data[static_cast<std::size_t>(h - 1 - r) * w + c] = static_cast<double>(v) / maxval;
      }
    }
  }
  return GridImage(origin, extent, w, h, 1, std::move(data), interp);
}

GridImage read_csv(const std::string& path, const Vec2& origin, const Vec2& extent, Interpolation interp) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read image " + path);
  std::vector<double> data;
  int w = -1, h = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        data.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput(path + ": malformed value '" + cell + "' in row " + std::to_string(h));
      }
      ++count;
    }
    if (w >= 0 && count != w) throw InvalidInput(path + ": ragged CSV image (row " + std::to_string(h) + ")");
    w = count;
    ++h;
  }
  if (w <= 0 || h == 0) throw InvalidInput(path + ": empty CSV image");
  return GridImage(origin, extent, w, h, 1, std::move(data), interp);
}

} // namespace

GridImage read_image(const std::string& path, const Vec2& origin, const Vec2& extent, Interpolation interp) {
  if (ends_with(path, ".pgm")) return read_pgm(path, origin, extent, interp);
  if (ends_with(path, ".csv")) return read_csv(path, origin, extent, interp);
  throw InvalidInput("unsupported image format (expected .pgm or .csv): " + path);
}

void write_pgm(const std::string& path, const GridImage& img, int channel) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path);
  f << "P5\n" << img.nx() << ' ' << img.ny() << "\n255\n";
  for (int r = img.ny() - 1; r >= 0; --r) {
    for (int c = 0; c < img.nx(); ++c) {
      f.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * img.value(c, r, channel)))));
    }
  }
}

void write_image_csv(const std::string& path, const GridImage& img, int channel) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  char buf[32];
  for (int j = 0; j < img.ny(); ++j) {
    for (int i = 0; i < img.nx(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", img.value(i, j, channel));
      f << (i ? "," : "") << buf;
    }
    f << '\n';
  }
}

} // namespace elastireg
