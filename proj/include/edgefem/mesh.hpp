#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "common.hpp"

namespace edgefem {

/// Simplicial mesh: node coordinates plus element-to-node connectivity.
/// Indices are 0-based in memory; the text format is 1-based.
struct Mesh {
  int dim = 2;
  Table<double> nodes2coord;  // #N x d
  Table<Index> elems2nodes;   // #T x (d+1)

  std::size_t num_nodes() const { return nodes2coord.rows(); }
  std::size_t num_elems() const { return elems2nodes.rows(); }
  int nodes_per_elem() const { return dim + 1; }
};

inline void validate(const Mesh& mesh) {
  if (mesh.dim != 2 && mesh.dim != 3) throw Error("mesh dimension must be 2 or 3");
  if (mesh.nodes2coord.cols() != static_cast<std::size_t>(mesh.dim))
    throw Error("nodes2coord must have d columns");
  if (mesh.elems2nodes.cols() != static_cast<std::size_t>(mesh.dim + 1))
    throw Error("elems2nodes must have d+1 columns");
  for (double x : mesh.nodes2coord.data())
    if (!std::isfinite(x)) throw Error("non-finite node coordinate");
  const auto n = static_cast<Index>(mesh.num_nodes());
  for (Index v : mesh.elems2nodes.data())
    if (v < 0 || v >= n) throw Error("element references node " + std::to_string(v + 1) + " out of range");
}

/// Header `d #N #T`, then #N coordinate lines, then #T 1-based connectivity lines.
inline void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.dim << ' ' << mesh.num_nodes() << ' ' << mesh.num_elems() << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    for (int c = 0; c < mesh.dim; ++c) out << (c ? " " : "") << mesh.nodes2coord(i, c);
    out << '\n';
  }
  for (std::size_t e = 0; e < mesh.num_elems(); ++e) {
    for (int c = 0; c <= mesh.dim; ++c) out << (c ? " " : "") << mesh.elems2nodes(e, c) + 1;
    out << '\n';
  }
}

inline Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  std::size_t nn = 0, nt = 0;
  if (!(in >> mesh.dim >> nn >> nt)) throw Error("mesh file: bad header");
  if (mesh.dim != 2 && mesh.dim != 3) throw Error("mesh file: dimension must be 2 or 3");
  mesh.nodes2coord = Table<double>(nn, mesh.dim);
  mesh.elems2nodes = Table<Index>(nt, mesh.dim + 1);
  for (auto& x : mesh.nodes2coord.data())
    if (!(in >> x)) throw Error("mesh file: truncated coordinates");
  for (auto& v : mesh.elems2nodes.data()) {
    if (!(in >> v)) throw Error("mesh file: truncated connectivity");
    --v;
  }
  validate(mesh);
  return mesh;
}

}  // namespace edgefem
