#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "affine.hpp"
#include "reference.hpp"

namespace edgefem {

using SignTable = Table<std::int8_t>;

struct EdgeTables {
  Table<Index> elems2edges;
  Table<Index> edges2nodes;
};

struct FaceTables {
  Table<Index> elems2faces;
  Table<Index> faces2nodes;
};

namespace detail {

inline Index max_node(const Table<Index>& elems2nodes) {
  Index m = -1;
  for (Index v : elems2nodes.data()) m = std::max(m, v);
  return m + 1;
}

/// Groups (key, slot) entries into buckets indexed by `lead`, sorts each
/// bucket by key and numbers distinct (lead, key) pairs in lexicographic order.
/// Writes the entity id of every slot and returns the entity count.
template <typename Key, typename LeadFn, typename KeyFn, typename EmitFn>
Index number_entities(std::size_t nslots, Index nleads, LeadFn lead_of, KeyFn key_of, std::vector<Index>& slot_ids,
                      EmitFn emit) {
  std::vector<std::size_t> start(static_cast<std::size_t>(nleads) + 1, 0);
  for (std::size_t s = 0; s < nslots; ++s) ++start[lead_of(s) + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());

  struct Entry {
    Key key;
    std::uint32_t slot;
  };
  std::vector<Entry> entries(nslots);
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t s = 0; s < nslots; ++s)
      entries[cursor[lead_of(s)]++] = {key_of(s), static_cast<std::uint32_t>(s)};
  }

  std::vector<Index> distinct(nleads, 0);
  parallel::for_ranges(nleads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      auto first = entries.begin() + start[a], last = entries.begin() + start[a + 1];
      std::sort(first, last, [](const Entry& x, const Entry& y) {
        return x.key < y.key || (x.key == y.key && x.slot < y.slot);
      });
      Index count = 0;
      for (auto it = first; it != last; ++it)
        if (it == first || it->key != (it - 1)->key) ++count;
      distinct[a] = count;
    }
  });

  std::vector<Index> offset(static_cast<std::size_t>(nleads) + 1, 0);
  for (Index a = 0; a < nleads; ++a) offset[a + 1] = offset[a] + distinct[a];

  slot_ids.assign(nslots, -1);
  for (Index a = 0; a < nleads; ++a) {
    Index id = offset[a] - 1;
    for (std::size_t i = start[a]; i < start[a + 1]; ++i) {
      if (i == start[a] || entries[i].key != entries[i - 1].key) {
        ++id;
        emit(id, a, entries[i].key);
      }
      slot_ids[entries[i].slot] = id;
    }
  }
  return offset[nleads];
}

}  // namespace detail

/// Global edges, numbered in lexicographic order of their ascending node
/// pairs. Row K of elems2edges follows the local edge table of the element.
inline EdgeTables derive_edges(const Table<Index>& elems2nodes) {
  const std::size_t nt = elems2nodes.rows();
  const int dim = static_cast<int>(elems2nodes.cols()) - 1;
  if (dim != 2 && dim != 3) throw Error("derive_edges: elements must be triangles or tetrahedra");
  const int ne = dim == 2 ? 3 : 6;
  auto local = [&](int k) { return dim == 2 ? local_edges_2d[k] : local_edges_3d[k]; };
  auto ends = [&](std::size_t s) {
    const auto [i, j] = local(static_cast<int>(s % ne));
    const Index a = elems2nodes(s / ne, i), b = elems2nodes(s / ne, j);
    return std::pair{std::min(a, b), std::max(a, b)};
  };

  std::vector<std::pair<Index, Index>> found;
  found.reserve(nt * ne / 2 + 16);
  std::vector<Index> ids;
  const Index nedges = detail::number_entities<Index>(
      nt * ne, detail::max_node(elems2nodes), [&](std::size_t s) { return ends(s).first; },
      [&](std::size_t s) { return ends(s).second; }, ids,
      [&](Index, Index lo, Index hi) { found.emplace_back(lo, hi); });

  EdgeTables out;
  out.elems2edges = Table<Index>(nt, ne);
  out.elems2edges.data() = std::move(ids);
  out.edges2nodes = Table<Index>(nedges, 2);
  for (Index i = 0; i < nedges; ++i) {
    out.edges2nodes(i, 0) = found[i].first;
    out.edges2nodes(i, 1) = found[i].second;
  }
  return out;
}

/// Global faces of a tetrahedral mesh as ascending node triples, numbered
/// lexicographically. Row K of elems2faces follows the local face table.
inline FaceTables derive_faces(const Table<Index>& elems2nodes) {
  if (elems2nodes.cols() != 4) throw Error("derive_faces: faces exist only for 3D (tetrahedral) meshes");
  const std::size_t nt = elems2nodes.rows();
  auto sorted = [&](std::size_t s) {
    const auto& f = local_faces_3d[s % 4];
    std::array<Index, 3> v{elems2nodes(s / 4, f[0]), elems2nodes(s / 4, f[1]), elems2nodes(s / 4, f[2])};
    std::sort(v.begin(), v.end());
    return v;
  };

  std::vector<Index> found;
  found.reserve(nt * 3 * 3 / 2 + 16);
  std::vector<Index> ids;
  const Index nfaces = detail::number_entities<std::uint64_t>(
      nt * 4, detail::max_node(elems2nodes), [&](std::size_t s) { return sorted(s)[0]; },
      [&](std::size_t s) {
        const auto v = sorted(s);
        return (static_cast<std::uint64_t>(v[1]) << 32) | static_cast<std::uint32_t>(v[2]);
      },
      ids,
      [&](Index, Index lo, std::uint64_t key) {
        found.push_back(lo);
        found.push_back(static_cast<Index>(key >> 32));
        found.push_back(static_cast<Index>(key & 0xffffffffu));
      });

  FaceTables out;
  out.elems2faces = Table<Index>(nt, 4);
  out.elems2faces.data() = std::move(ids);
  out.faces2nodes = Table<Index>(nfaces, 3);
  out.faces2nodes.data() = std::move(found);
  return out;
}

/// +1 when the local edge's start node has the higher global index, -1
/// otherwise. This orients every global edge from its higher to its lower
/// node, independent of the element that sees it.
inline SignTable compute_edge_signs(const Table<Index>& elems2nodes) {
  const std::size_t nt = elems2nodes.rows();
  const int dim = static_cast<int>(elems2nodes.cols()) - 1;
  const int ne = dim == 2 ? 3 : 6;
  SignTable signs(nt, ne);
  for (std::size_t e = 0; e < nt; ++e) {
    for (int k = 0; k < ne; ++k) {
      const auto [i, j] = dim == 2 ? local_edges_2d[k] : local_edges_3d[k];
      signs(e, k) = elems2nodes(e, i) > elems2nodes(e, j) ? 1 : -1;
    }
  }
  return signs;
}

/// Face orientation signs. The global normal of a face is the right-hand
/// normal g of its ascending node triple (a, b, c): g = (x_b - x_a) x (x_c - x_a).
/// The mapped local RT function (1/det B) B η̂ has unit flux along
/// cof(B) n̂ = det(B) B^{-T} n̂, so the sign is that of (cof(B) n̂)·g.
inline SignTable compute_face_signs(const Table<double>& nodes2coord, const Table<Index>& elems2faces,
                                    const Table<Index>& faces2nodes, const AffineMapBatch& maps) {
  static constexpr Vec3 ref_normals[4] = {{0, 0, -1}, {0, -1, 0}, {-1, 0, 0}, {1, 1, 1}};
  const std::size_t nt = elems2faces.rows();
  const std::size_t nf = faces2nodes.rows();
  std::vector<Vec3> global_normal(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto a = nodes2coord.row(faces2nodes(f, 0));
    const auto b = nodes2coord.row(faces2nodes(f, 1));
    const auto c = nodes2coord.row(faces2nodes(f, 2));
    const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    global_normal[f] = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  }
  SignTable signs(nt, 4);
  parallel::for_ranges(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const double* m = maps.matrix(e);
      // det(B) B^{-1}; its transpose is the cofactor matrix.
      const auto adj = invert<3>(m, 1.0);
      for (int k = 0; k < 4; ++k) {
        const Vec3& g = global_normal[elems2faces(e, k)];
        const Vec3& n = ref_normals[k];
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) s += n[r] * adj[r * 3 + c] * g[c];
        signs(e, k) = s > 0 ? 1 : -1;
      }
    }
  });
  return signs;
}

/// All derived mesh tables needed by the edge and face elements.
struct Topology {
  Table<Index> edges2nodes;
  Table<Index> elems2edges;
  Table<Index> faces2nodes;  // 3D only
  Table<Index> elems2faces;  // 3D only
  SignTable signs_e;
  SignTable signs_f;  // 3D only

  std::size_t num_edges() const { return edges2nodes.rows(); }
  std::size_t num_faces() const { return faces2nodes.rows(); }
};

inline Topology build_topology(const Mesh& mesh, const AffineMapBatch& maps) {
  Topology topo;
  auto edges = derive_edges(mesh.elems2nodes);
  topo.edges2nodes = std::move(edges.edges2nodes);
  topo.elems2edges = std::move(edges.elems2edges);
  topo.signs_e = compute_edge_signs(mesh.elems2nodes);
  if (mesh.dim == 3) {
    auto faces = derive_faces(mesh.elems2nodes);
    topo.faces2nodes = std::move(faces.faces2nodes);
    topo.elems2faces = std::move(faces.elems2faces);
    topo.signs_f = compute_face_signs(mesh.nodes2coord, topo.elems2faces, topo.faces2nodes, maps);
  }
  return topo;
}

/// Mesh together with its affine maps and derived topology.
struct Discretization {
  Mesh mesh;
  AffineMapBatch maps;
  Topology topo;

  static Discretization build(Mesh mesh) {
    validate(mesh);
    Discretization disc;
    disc.maps = affine_transformations(mesh);
    disc.topo = build_topology(mesh, disc.maps);
    disc.mesh = std::move(mesh);
    return disc;
  }

  int dim() const { return mesh.dim; }
};

/// Global dof numbering of one element kind: which table maps elements to
/// dofs, which sign table applies (none for nodal elements) and the dof count.
struct DofLayout {
  const Table<Index>* elems2dofs = nullptr;
  const SignTable* signs = nullptr;
  std::size_t ndofs = 0;
};

inline DofLayout dof_layout(ElementKind kind, const Mesh& mesh, const Topology& topo) {
  const auto info = element_info(kind);
  if (info.dim != mesh.dim) throw Error(std::string("element ") + std::string(info.name) + " does not match mesh dimension");
  switch (info.entity) {
    case DofEntity::node: return {&mesh.elems2nodes, nullptr, mesh.num_nodes()};
    case DofEntity::edge: return {&topo.elems2edges, &topo.signs_e, topo.num_edges()};
    case DofEntity::face: return {&topo.elems2faces, &topo.signs_f, topo.num_faces()};
  }
  return {};
}

inline DofLayout dof_layout(ElementKind kind, const Discretization& disc) {
  return dof_layout(kind, disc.mesh, disc.topo);
}

/// Number of elements adjacent to each row of an entity table.
inline std::vector<Index> incidence_counts(const Table<Index>& elems2entities, std::size_t nentities) {
  std::vector<Index> count(nentities, 0);
  for (Index id : elems2entities.data()) ++count[id];
  return count;
}

/// Nodes lying on the boundary: nodes of edges (2D) or faces (3D) that
/// belong to exactly one element.
inline std::vector<Index> boundary_nodes(const Mesh& mesh, const Topology& topo) {
  std::vector<char> on(mesh.num_nodes(), 0);
  const auto& facets = mesh.dim == 2 ? topo.edges2nodes : topo.faces2nodes;
  const auto& incidence = mesh.dim == 2 ? topo.elems2edges : topo.elems2faces;
  const auto count = incidence_counts(incidence, facets.rows());
  for (std::size_t f = 0; f < facets.rows(); ++f)
    if (count[f] == 1)
      for (Index v : facets.row(f)) on[v] = 1;
  std::vector<Index> nodes;
  for (std::size_t v = 0; v < on.size(); ++v)
    if (on[v]) nodes.push_back(static_cast<Index>(v));
  return nodes;
}

}  // namespace edgefem
