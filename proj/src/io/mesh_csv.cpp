#include "elastireg/io/mesh_csv.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace elastireg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  return f;
}

std::vector<std::vector<double>> read_table(const std::string& path, const std::string& header, std::size_t cols) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line != header) throw InvalidInput(path + ": expected header '" + header + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput(path + ": malformed number '" + cell + "'");
      }
    }
    if (row.size() != cols) throw InvalidInput(path + ": wrong number of columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

void write_deformation_csv(const std::string& nodes_path, const std::string& triangles_path,
                           const MeshDeformation& def) {
  auto f = open_out(nodes_path);
  f << "node,ref_x,ref_y,def_x,def_y\n";
  const auto& x = def.mesh->nodes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    f << i << ',' << fmt(x[i].x()) << ',' << fmt(x[i].y()) << ',' << fmt(def.positions[i].x()) << ','
      << fmt(def.positions[i].y()) << '\n';
  }
  auto t = open_out(triangles_path);
  t << "tri,i,j,k\n";
  const auto& tris = def.mesh->triangles();
  for (std::size_t k = 0; k < tris.size(); ++k) t << k << ',' << tris[k][0] << ',' << tris[k][1] << ',' << tris[k][2] << '\n';
}

MeshDeformation read_deformation_csv(const std::string& nodes_path, const std::string& triangles_path,
                                     const Domain2& target) {
  const auto nodes = read_table(nodes_path, "node,ref_x,ref_y,def_x,def_y", 5);
  const auto tris = read_table(triangles_path, "tri,i,j,k", 4);
  std::vector<Vec2> ref(nodes.size()), pos(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i][0] != static_cast<double>(i)) throw InvalidInput(nodes_path + ": node ids must be 0..n-1 in order");
    ref[i] = Vec2(nodes[i][1], nodes[i][2]);
    pos[i] = Vec2(nodes[i][3], nodes[i][4]);
  }
  std::vector<Triangle> T(tris.size());
  for (std::size_t k = 0; k < tris.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      const double v = tris[k][c + 1];
      if (v < 0 || v >= static_cast<double>(nodes.size())) throw InvalidInput(triangles_path + ": node index out of range");
      T[k][c] = static_cast<int>(v);
    }
  }
  auto mesh = std::make_shared<const Mesh>(std::move(ref), std::move(T));
  return MeshDeformation(mesh, std::move(pos), target);
}

void write_map1d_csv(const std::string& path, const Monotone1DMap& map) {
  auto f = open_out(path);
  f << "x,y\n";
  for (std::size_t k = 0; k < map.grid().size(); ++k) f << fmt(map.grid()[k]) << ',' << fmt(map.values()[k]) << '\n';
}

} // namespace elastireg
