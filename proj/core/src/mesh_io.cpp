#include <fstream>
#include <iomanip>
#include <sstream>

#include "thermovem/mesh.hpp"

namespace thermovem {

namespace {

void expect_keyword(std::istream& in, const std::string& keyword) {
  std::string word;
  if (!(in >> word) || word != keyword) throw MeshError("mesh file: expected '" + keyword + "'");
}

}  // namespace

void write_mesh(std::ostream& out, const PolygonalMesh& mesh) {
  out << "polymesh v1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
  out << "cells " << mesh.num_cells() << '\n';
  for (const auto& cell : mesh.cells()) {
    out << cell.size();
    for (int v : cell) out << ' ' << v;
    out << '\n';
  }
  std::vector<EdgeLabel> tagged;
  for (const auto& label : mesh.boundary_labels()) {
    if (label.tag != BoundaryTag::wall) tagged.push_back(label);
  }
  if (!tagged.empty()) {
    out << "edge_labels " << tagged.size() << '\n';
    for (const auto& label : tagged) out << label.a << ' ' << label.b << ' ' << to_string(label.tag) << '\n';
  }
}

void write_mesh(const std::string& path, const PolygonalMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path + "' for writing");
  write_mesh(out, mesh);
  if (!out) throw MeshError("failed writing '" + path + "'");
}

PolygonalMesh read_mesh(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic.rfind("polymesh v1", 0) != 0) throw MeshError("mesh file: missing 'polymesh v1' header");

  expect_keyword(in, "vertices");
  std::size_t nv = 0;
  if (!(in >> nv)) throw MeshError("mesh file: bad vertex count");
  std::vector<Point> vertices(nv);
  for (auto& p : vertices) {
    if (!(in >> p.x() >> p.y())) throw MeshError("mesh file: truncated vertex list");
  }

  expect_keyword(in, "cells");
  std::size_t nc = 0;
  if (!(in >> nc)) throw MeshError("mesh file: bad cell count");
  std::vector<std::vector<int>> cells(nc);
  for (auto& cell : cells) {
    std::size_t k = 0;
    if (!(in >> k) || k < 3) throw MeshError("mesh file: bad cell size");
    cell.resize(k);
    for (auto& v : cell) {
      if (!(in >> v)) throw MeshError("mesh file: truncated cell list");
    }
  }

  std::vector<EdgeLabel> labels;
  std::string word;
  if (in >> word) {
    if (word != "edge_labels") throw MeshError("mesh file: unexpected token '" + word + "'");
    std::size_t nl = 0;
    if (!(in >> nl)) throw MeshError("mesh file: bad label count");
    labels.resize(nl);
    for (auto& label : labels) {
      std::string tag;
      if (!(in >> label.a >> label.b >> tag)) throw MeshError("mesh file: truncated label list");
      label.tag = boundary_tag_from_string(tag);
    }
  }
  return PolygonalMesh(std::move(vertices), std::move(cells), labels);
}

PolygonalMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open '" + path + "'");
  return read_mesh(in);
}

}  // namespace thermovem
