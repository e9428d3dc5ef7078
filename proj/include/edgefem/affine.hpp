#pragma once

#include <array>
#include <cmath>

#include "mesh.hpp"
#include "parallel.hpp"

namespace edgefem {

/// Affine element maps F_K(x̂) = B_K x̂ + b_K for all elements, stored as
/// flat batches. B is row-major per element: B[e*d*d + r*d + c].
struct AffineMapBatch {
  int dim = 2;
  std::vector<double> B;
  Table<double> b;
  std::vector<double> det;
  std::vector<double> det_abs;

  std::size_t size() const { return det.size(); }
  const double* matrix(std::size_t e) const { return B.data() + e * dim * dim; }

  /// Physical image of a reference point.
  template <int D>
  std::array<double, D> map(std::size_t e, const double* xhat) const {
    const double* m = matrix(e);
    std::array<double, D> x{};
    for (int r = 0; r < D; ++r) {
      x[r] = b(e, r);
      for (int c = 0; c < D; ++c) x[r] += m[r * D + c] * xhat[c];
    }
    return x;
  }
};

/// Inverse of a small d x d row-major matrix given its determinant.
template <int D>
inline std::array<double, D * D> invert(const double* m, double det) {
  std::array<double, D * D> inv{};
  if constexpr (D == 2) {
    inv = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
  } else {
    inv[0] = (m[4] * m[8] - m[5] * m[7]) / det;
    inv[1] = (m[2] * m[7] - m[1] * m[8]) / det;
    inv[2] = (m[1] * m[5] - m[2] * m[4]) / det;
    inv[3] = (m[5] * m[6] - m[3] * m[8]) / det;
    inv[4] = (m[0] * m[8] - m[2] * m[6]) / det;
    inv[5] = (m[2] * m[3] - m[0] * m[5]) / det;
    inv[6] = (m[3] * m[7] - m[4] * m[6]) / det;
    inv[7] = (m[1] * m[6] - m[0] * m[7]) / det;
    inv[8] = (m[0] * m[4] - m[1] * m[3]) / det;
  }
  return inv;
}

/// b_K = p_0 and the columns of B_K are p_i - p_0, so the reference vertices
/// (origin, unit points) land on the element's nodes in connectivity order.
inline AffineMapBatch affine_transformations(const Mesh& mesh) {
  const int d = mesh.dim;
  const std::size_t nt = mesh.num_elems();
  AffineMapBatch maps;
  maps.dim = d;
  maps.B.assign(nt * d * d, 0.0);
  maps.b = Table<double>(nt, d);
  maps.det.assign(nt, 0.0);
  maps.det_abs.assign(nt, 0.0);

  std::atomic<std::size_t> degenerate{nt};
  parallel::for_ranges(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const auto nodes = mesh.elems2nodes.row(e);
      double* m = maps.B.data() + e * d * d;
      const auto p0 = mesh.nodes2coord.row(nodes[0]);
      double scale = 1.0;
      for (int c = 0; c < d; ++c) {
        const auto pc = mesh.nodes2coord.row(nodes[c + 1]);
        double len2 = 0.0;
        for (int r = 0; r < d; ++r) {
          m[r * d + c] = pc[r] - p0[r];
          len2 += m[r * d + c] * m[r * d + c];
        }
        scale *= std::sqrt(len2);
      }
      for (int r = 0; r < d; ++r) maps.b(e, r) = p0[r];
      double det;
      if (d == 2) {
        det = m[0] * m[3] - m[1] * m[2];
      } else {
        det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
              m[2] * (m[3] * m[7] - m[4] * m[6]);
      }
      maps.det[e] = det;
      maps.det_abs[e] = std::abs(det);
      if (!(std::abs(det) > 1e-13 * scale)) {
        std::size_t cur = degenerate.load();
        while (e < cur && !degenerate.compare_exchange_weak(cur, e)) {
        }
      }
    }
  });
  if (degenerate.load() < nt)
    throw Error("degenerate element " + std::to_string(degenerate.load() + 1) + " (det B_K = 0)");
  return maps;
}

/// Σ_K |det B_K| / d!
inline double mesh_measure(const AffineMapBatch& maps) {
  double sum = 0.0;
  for (double v : maps.det_abs) sum += v;
  return sum / (maps.dim == 2 ? 2.0 : 6.0);
}

}  // namespace edgefem
