#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "topology.hpp"

namespace edgefem {

enum class Domain { unit_square, unit_cube, l_shape_2d };

inline Domain parse_domain(std::string_view name) {
  if (name == "unit_square" || name == "square") return Domain::unit_square;
  if (name == "unit_cube" || name == "cube") return Domain::unit_cube;
  if (name == "l_shape" || name == "l_shape_2d" || name == "lshape") return Domain::l_shape_2d;
  throw Error("unknown domain '" + std::string(name) + "' (expected unit_square, unit_cube or l_shape)");
}

inline std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::unit_square: return "unit_square";
    case Domain::unit_cube: return "unit_cube";
    case Domain::l_shape_2d: return "l_shape";
  }
  return "";
}

inline int domain_dim(Domain d) { return d == Domain::unit_cube ? 3 : 2; }

namespace detail {

/// n x n grid on [0, s]^2 with every cell split along its (0,0)-(1,1)
/// diagonal. Cells in `skip` are left out; unused nodes are dropped.
template <typename Skip>
Mesh diagonal_grid(int n, double size, Skip skip) {
  std::vector<Index> id((n + 1) * (n + 1), -1);
  std::vector<std::array<Index, 3>> tris;
  auto node = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (skip(i, j)) continue;
      const Index p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
      tris.push_back({p00, p10, p11});
      tris.push_back({p00, p11, p01});
    }
  Index next = 0;
  for (auto& t : tris)
    for (Index& v : t) {
      if (id[v] < 0) id[v] = -2;  // mark used
    }
  Mesh mesh;
  mesh.dim = 2;
  std::vector<double> coords;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (id[node(i, j)] == -2) {
        id[node(i, j)] = next++;
        coords.push_back(size * i / n);
        coords.push_back(size * j / n);
      }
  mesh.nodes2coord = Table<double>(next, 2);
  mesh.nodes2coord.data() = std::move(coords);
  mesh.elems2nodes = Table<Index>(tris.size(), 3);
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (int c = 0; c < 3; ++c) mesh.elems2nodes(t, c) = id[tris[t][c]];
  return mesh;
}

/// n^3 grid on the unit cube, every cell split into the 6 Kuhn tetrahedra
/// sharing the cell's main diagonal.
inline Mesh kuhn_cube(int n) {
  Mesh mesh;
  mesh.dim = 3;
  const std::size_t m = n + 1;
  mesh.nodes2coord = Table<double>(m * m * m, 3);
  auto node = [&](std::size_t i, std::size_t j, std::size_t k) { return static_cast<Index>((k * m + j) * m + i); };
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        const Index v = node(i, j, k);
        mesh.nodes2coord(v, 0) = static_cast<double>(i) / n;
        mesh.nodes2coord(v, 1) = static_cast<double>(j) / n;
        mesh.nodes2coord(v, 2) = static_cast<double>(k) / n;
      }
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  const std::size_t ncells = static_cast<std::size_t>(n) * n * n;
  mesh.elems2nodes = Table<Index>(ncells * 6, 4);
  std::size_t t = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          mesh.elems2nodes(t, 0) = node(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            mesh.elems2nodes(t, s + 1) = node(c[0], c[1], c[2]);
          }
          ++t;
        }
  return mesh;
}

}  // namespace detail

/// Red refinement: every triangle into 4 and every tetrahedron into 8
/// (four corner tetrahedra plus the inner octahedron cut along its shortest
/// diagonal, first one on ties). New nodes are edge midpoints, numbered
/// after the old nodes in global edge order.
inline Mesh uniform_refine(const Mesh& mesh) {
  validate(mesh);
  const auto edges = derive_edges(mesh.elems2nodes);
  const std::size_t nn = mesh.num_nodes(), ne = edges.edges2nodes.rows(), nt = mesh.num_elems();
  const int d = mesh.dim;

  Mesh fine;
  fine.dim = d;
  fine.nodes2coord = Table<double>(nn + ne, d);
  std::copy(mesh.nodes2coord.data().begin(), mesh.nodes2coord.data().end(), fine.nodes2coord.data().begin());
  for (std::size_t e = 0; e < ne; ++e)
    for (int c = 0; c < d; ++c)
      fine.nodes2coord(nn + e, c) =
          0.5 * (mesh.nodes2coord(edges.edges2nodes(e, 0), c) + mesh.nodes2coord(edges.edges2nodes(e, 1), c));

  if (d == 2) {
    fine.elems2nodes = Table<Index>(4 * nt, 3);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto v = mesh.elems2nodes.row(t);
      // local edges: 0 = (1,2), 1 = (2,0), 2 = (0,1)
      const Index m12 = static_cast<Index>(nn) + edges.elems2edges(t, 0);
      const Index m20 = static_cast<Index>(nn) + edges.elems2edges(t, 1);
      const Index m01 = static_cast<Index>(nn) + edges.elems2edges(t, 2);
      const std::array<std::array<Index, 3>, 4> kids{
          {{v[0], m01, m20}, {m01, v[1], m12}, {m20, m12, v[2]}, {m01, m12, m20}}};
      for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 3; ++c) fine.elems2nodes(4 * t + k, c) = kids[k][c];
    }
    return fine;
  }

  fine.elems2nodes = Table<Index>(8 * nt, 4);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto v = mesh.elems2nodes.row(t);
    std::array<std::array<Index, 4>, 4> mid{};
    for (int k = 0; k < 6; ++k) {
      const auto [i, j] = local_edges_3d[k];
      mid[i][j] = mid[j][i] = static_cast<Index>(nn) + edges.elems2edges(t, k);
    }
    std::array<std::array<Index, 4>, 8> kids{};
    kids[0] = {v[0], mid[0][1], mid[0][2], mid[0][3]};
    kids[1] = {mid[0][1], v[1], mid[1][2], mid[1][3]};
    kids[2] = {mid[0][2], mid[1][2], v[2], mid[2][3]};
    kids[3] = {mid[0][3], mid[1][3], mid[2][3], v[3]};

    // Octahedron diagonals and the equatorial ring around each.
    const std::array<std::array<Index, 2>, 3> diag{
        {{mid[0][1], mid[2][3]}, {mid[0][2], mid[1][3]}, {mid[0][3], mid[1][2]}}};
    const std::array<std::array<Index, 4>, 3> ring{{{mid[0][2], mid[1][2], mid[1][3], mid[0][3]},
                                                     {mid[0][1], mid[0][3], mid[2][3], mid[1][2]},
                                                     {mid[0][1], mid[0][2], mid[2][3], mid[1][3]}}};
    int best = 0;
    double best_len = 0.0;
    for (int k = 0; k < 3; ++k) {
      double len = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double dx = fine.nodes2coord(diag[k][0], c) - fine.nodes2coord(diag[k][1], c);
        len += dx * dx;
      }
      if (k == 0 || len < best_len * (1.0 - 1e-12)) {
        best = k;
        best_len = len;
      }
    }
    for (int k = 0; k < 4; ++k)
      kids[4 + k] = {diag[best][0], diag[best][1], ring[best][k], ring[best][(k + 1) % 4]};
    for (int k = 0; k < 8; ++k)
      for (int c = 0; c < 4; ++c) fine.elems2nodes(8 * t + k, c) = kids[k][c];
  }
  return fine;
}

/// Structured meshes of the benchmark domains.
///   unit_square: n = 2^level divisions, cells split along the (0,0)-(1,1)
///                diagonal so the line x1 = x2 is a mesh line; #T = 2 n^2.
///   l_shape:     (0,1)^2 minus (1/2,1)^2, 6-triangle seed refined `level`
///                times; #T = 6 * 4^level.
///   unit_cube:   n = 6 * 2^(level-1) divisions, Kuhn tetrahedra; #T = 6 n^3.
inline Mesh generate_structured_mesh(Domain domain, int level) {
  switch (domain) {
    case Domain::unit_square: {
      if (level < 0 || level > 14) throw Error("unit_square: level must be in [0, 14]");
      return detail::diagonal_grid(1 << level, 1.0, [](int, int) { return false; });
    }
    case Domain::l_shape_2d: {
      if (level < 0 || level > 12) throw Error("l_shape: level must be in [0, 12]");
      Mesh mesh = detail::diagonal_grid(2, 1.0, [](int i, int j) { return i == 1 && j == 1; });
      for (int l = 0; l < level; ++l) mesh = uniform_refine(mesh);
      return mesh;
    }
    case Domain::unit_cube: {
      if (level < 1 || level > 7) throw Error("unit_cube: level must be in [1, 7]");
      return detail::kuhn_cube(6 << (level - 1));
    }
  }
  throw Error("unsupported domain");
}

}  // namespace edgefem
