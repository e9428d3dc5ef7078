#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>

#include "quadrature.hpp"
#include "reference.hpp"
#include "sparse.hpp"
#include "topology.hpp"

namespace edgefem {

enum class MatrixKind { mass, stiffness };
enum class Pairing { value, derivative };

/// Function of the physical coordinates, evaluated on a batch of points
/// (rows of `points`, #points x d). Writes #points x components values.
/// May be called concurrently from several workers.
struct Function {
  int components = 1;
  std::function<void(const Table<double>& points, std::span<double> values)> eval;
};

template <typename F>
Function scalar_function(F f) {
  return {1, [f](const Table<double>& x, std::span<double> out) {
            for (std::size_t i = 0; i < x.rows(); ++i) out[i] = f(x.row(i).data());
          }};
}

template <int N, typename F>
Function vector_function(F f) {
  return {N, [f](const Table<double>& x, std::span<double> out) {
            for (std::size_t i = 0; i < x.rows(); ++i) {
              const std::array<double, N> v = f(x.row(i).data());
              for (int c = 0; c < N; ++c) out[i * N + c] = v[c];
            }
          }};
}

/// Coefficients of a finite element function in the global basis of `kind`.
struct DiscreteField {
  ElementKind kind{};
  std::vector<double> coeffs;
  const Discretization* disc = nullptr;
};

inline DiscreteField make_field(ElementKind kind, const Discretization& disc, std::vector<double> coeffs) {
  const auto layout = dof_layout(kind, disc);
  if (coeffs.size() != layout.ndofs)
    throw Error("field has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                std::to_string(layout.ndofs));
  return {kind, std::move(coeffs), &disc};
}

namespace detail {

enum class Transform { identity, jacobian, inverse_transpose };

/// Mapped basis = det(B)^power * T v̂, with T per family:
///   RT value (1/det) B η̂, RT div (1/det) div η̂,
///   Nédélec value B^{-T} η̂, curl (1/det) curl η̂ (2D) or (1/det) B curl η̂ (3D),
///   P1 value η̂, gradient B^{-T} ∇η̂.
struct Piola {
  Transform transform;
  int det_power;
};

inline Piola piola(ElementKind kind, bool derivative) {
  const auto info = element_info(kind);
  switch (info.family) {
    case Family::rt: return derivative ? Piola{Transform::identity, -1} : Piola{Transform::jacobian, -1};
    case Family::ned:
      if (!derivative) return {Transform::inverse_transpose, 0};
      return info.dim == 2 ? Piola{Transform::identity, -1} : Piola{Transform::jacobian, -1};
    case Family::p1: break;
  }
  return derivative ? Piola{Transform::inverse_transpose, 0} : Piola{Transform::identity, 0};
}

/// Reference vectors (values or derivatives) tabulated as [i][k][c].
struct ReferenceTable {
  std::size_t nip;
  int nbasis;
  int ncomp;
  std::vector<double> data;
  double operator()(std::size_t i, int k, int c) const { return data[(i * nbasis + k) * ncomp + c]; }
};

inline ReferenceTable reference_table(ElementKind kind, const QuadratureRule& rule, bool derivative) {
  const auto t = eval_basis(kind, rule.points);
  return derivative ? ReferenceTable{t.nip, t.nbasis, t.dcomp, t.dvalues}
                    : ReferenceTable{t.nip, t.nbasis, t.vcomp, t.values};
}

/// Per-element transformation matrix for a block of elements, row-major D x D.
template <int D>
void block_transforms(Transform transform, const AffineMapBatch& maps, std::size_t e0, std::size_t n,
                      std::vector<double>& out) {
  out.resize(n * D * D);
  for (std::size_t j = 0; j < n; ++j) {
    const double* m = maps.matrix(e0 + j);
    double* t = out.data() + j * D * D;
    if (transform == Transform::jacobian) {
      std::copy(m, m + D * D, t);
    } else if (transform == Transform::inverse_transpose) {
      const auto inv = invert<D>(m, maps.det[e0 + j]);
      for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) t[r * D + c] = inv[c * D + r];
    }
  }
}

inline constexpr int pair_index(int m, int k, int nb) { return m * nb - m * (m - 1) / 2 + (k - m); }

/// Upper-triangular local matrices of a block of elements, laid out as
/// L[pair * n + j]. The loop runs over quadrature points and basis pairs,
/// each step acting on the whole block of elements at once.
template <int D>
void local_matrix_block(ElementKind kind, MatrixKind matrix, const QuadratureRule& rule, const ReferenceTable& ref,
                        const AffineMapBatch& maps, const SignTable* signs, std::size_t e0, std::size_t n,
                        std::vector<double>& L) {
  const bool derivative = matrix == MatrixKind::stiffness;
  const Piola p = piola(kind, derivative);
  const int nb = ref.nbasis;
  const int nc_ref = ref.ncomp;
  const int nc = p.transform == Transform::identity ? nc_ref : D;
  const int npairs = nb * (nb + 1) / 2;

  std::vector<double> T;
  if (p.transform != Transform::identity) block_transforms<D>(p.transform, maps, e0, n, T);

  L.assign(static_cast<std::size_t>(npairs) * n, 0.0);
  std::vector<double> mapped(static_cast<std::size_t>(nb) * nc * n);  // [k][c][j]

  for (std::size_t i = 0; i < rule.nip(); ++i) {
    const double w = rule.weights[i];
    for (int k = 0; k < nb; ++k) {
      double* mk = mapped.data() + static_cast<std::size_t>(k) * nc * n;
      if (p.transform == Transform::identity) {
        for (int c = 0; c < nc; ++c) std::fill_n(mk + c * n, n, ref(i, k, c));
      } else {
        double v[D];
        for (int c = 0; c < D; ++c) v[c] = ref(i, k, c);
        for (int r = 0; r < D; ++r) {
          double* out = mk + r * n;
          for (std::size_t j = 0; j < n; ++j) {
            const double* t = T.data() + j * D * D + r * D;
            double s = 0.0;
            for (int c = 0; c < D; ++c) s += t[c] * v[c];
            out[j] = s;
          }
        }
      }
    }
    for (int m = 0; m < nb; ++m) {
      for (int k = m; k < nb; ++k) {
        double* acc = L.data() + static_cast<std::size_t>(pair_index(m, k, nb)) * n;
        const double* am = mapped.data() + static_cast<std::size_t>(m) * nc * n;
        const double* ak = mapped.data() + static_cast<std::size_t>(k) * nc * n;
        for (int c = 0; c < nc; ++c)
          for (std::size_t j = 0; j < n; ++j) acc[j] += w * am[c * n + j] * ak[c * n + j];
      }
    }
  }

  // Scale by |det B|^(2p+1) and apply orientation signs.
  const int power = 2 * p.det_power + 1;
  for (int m = 0; m < nb; ++m) {
    for (int k = m; k < nb; ++k) {
      double* acc = L.data() + static_cast<std::size_t>(pair_index(m, k, nb)) * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double da = maps.det_abs[e0 + j];
        double scale = power == 1 ? da : 1.0 / da;
        if (signs) scale *= static_cast<double>((*signs)(e0 + j, m) * (*signs)(e0 + j, k));
        acc[j] *= scale;
      }
    }
  }
}

inline constexpr std::size_t assembly_block = 2048;

inline void check_layout(ElementKind kind, const DofLayout& layout, const AffineMapBatch& maps) {
  const auto info = element_info(kind);
  if (info.dim != maps.dim) throw Error(std::string(info.name) + ": dimension mismatch with element maps");
  if (!layout.elems2dofs || layout.elems2dofs->cols() != static_cast<std::size_t>(info.nbasis) ||
      layout.elems2dofs->rows() != maps.size())
    throw Error(std::string(info.name) + ": dof table does not match element");
  if (info.family != Family::p1 &&
      (!layout.signs || layout.signs->rows() != maps.size() || layout.signs->cols() != layout.elems2dofs->cols()))
    throw Error(std::string(info.name) + ": orientation signs are required for edge/face elements");
}

}  // namespace detail

/// Sparsity of Σ_K (dofs of K) x (dofs of K), built row by row from the
/// dof-to-element incidence. Values are zero-initialized.
inline CsrMatrix sparsity_pattern(const Table<Index>& elems2dofs, std::size_t ndofs) {
  const std::size_t nt = elems2dofs.rows(), nb = elems2dofs.cols();
  std::vector<std::size_t> inc_ptr(ndofs + 1, 0);
  for (Index g : elems2dofs.data()) ++inc_ptr[g + 1];
  std::partial_sum(inc_ptr.begin(), inc_ptr.end(), inc_ptr.begin());
  std::vector<Index> inc(inc_ptr.back());
  {
    std::vector<std::size_t> cursor(inc_ptr.begin(), inc_ptr.end() - 1);
    for (std::size_t e = 0; e < nt; ++e)
      for (std::size_t k = 0; k < nb; ++k) inc[cursor[elems2dofs(e, k)]++] = static_cast<Index>(e);
  }

  CsrMatrix a;
  a.n_rows = a.n_cols = ndofs;
  a.row_ptr.assign(ndofs + 1, 0);
  auto row_columns = [&](std::size_t r, std::vector<Index>& buf) {
    buf.clear();
    for (std::size_t p = inc_ptr[r]; p < inc_ptr[r + 1]; ++p)
      for (Index g : elems2dofs.row(inc[p])) buf.push_back(g);
    std::sort(buf.begin(), buf.end());
    buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
  };
  parallel::for_ranges(ndofs, [&](std::size_t begin, std::size_t end) {
    std::vector<Index> buf;
    for (std::size_t r = begin; r < end; ++r) {
      row_columns(r, buf);
      a.row_ptr[r + 1] = buf.size();
    }
  });
  std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
  a.cols.resize(a.row_ptr.back());
  a.values.assign(a.row_ptr.back(), 0.0);
  parallel::for_ranges(ndofs, [&](std::size_t begin, std::size_t end) {
    std::vector<Index> buf;
    for (std::size_t r = begin; r < end; ++r) {
      row_columns(r, buf);
      std::copy(buf.begin(), buf.end(), a.cols.begin() + a.row_ptr[r]);
    }
  });
  return a;
}

/// Global mass or stiffness matrix:
///   RT      mass (1/|det B|) ∫ s_k B η̂_k · s_l B η̂_l,  stiffness (1/|det B|) ∫ s_k div η̂_k s_l div η̂_l
///   Nédélec mass |det B| ∫ s_k B^{-T} η̂_k · s_l B^{-T} η̂_l,
///           stiffness (1/|det B|) ∫ curl·curl (2D) or (B curl)·(B curl) (3D)
///   P1      mass |det B| ∫ η̂_k η̂_l, stiffness |det B| ∫ B^{-T}∇η̂_k · B^{-T}∇η̂_l
/// Local matrices are computed in element blocks (upper triangle only) and
/// added into the pattern in element-major, local-pair-minor order.
inline CsrMatrix assemble_matrix(MatrixKind matrix, ElementKind kind, const DofLayout& layout,
                                 const AffineMapBatch& maps) {
  detail::check_layout(kind, layout, maps);
  const auto info = element_info(kind);
  const bool constant_integrand =
      matrix == MatrixKind::stiffness && (info.family == Family::rt || kind == ElementKind::ned0_2d);
  const auto rule = get_rule(constant_integrand ? 1 : 2, info.dim);
  const auto ref = detail::reference_table(kind, rule, matrix == MatrixKind::stiffness);
  const SignTable* signs = info.family == Family::p1 ? nullptr : layout.signs;
  const auto& dofs = *layout.elems2dofs;
  const int nb = info.nbasis;

  CsrMatrix a = sparsity_pattern(dofs, layout.ndofs);
  const std::size_t nt = maps.size();
  const std::size_t block = detail::assembly_block;
  const std::size_t nblocks = (nt + block - 1) / block;
  const std::size_t group = std::max<std::size_t>(1, static_cast<std::size_t>(parallel::workers()));
  std::vector<std::vector<double>> locals(group);

  for (std::size_t b0 = 0; b0 < nblocks; b0 += group) {
    const std::size_t nb_here = std::min(group, nblocks - b0);
    parallel::for_ranges(
        nb_here,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t g = begin; g < end; ++g) {
            const std::size_t e0 = (b0 + g) * block;
            const std::size_t n = std::min(block, nt - e0);
            if (info.dim == 2)
              detail::local_matrix_block<2>(kind, matrix, rule, ref, maps, signs, e0, n, locals[g]);
            else
              detail::local_matrix_block<3>(kind, matrix, rule, ref, maps, signs, e0, n, locals[g]);
          }
        },
        1);
    for (std::size_t g = 0; g < nb_here; ++g) {
      const std::size_t e0 = (b0 + g) * block;
      const std::size_t n = std::min(block, nt - e0);
      const auto& L = locals[g];
      for (std::size_t j = 0; j < n; ++j) {
        const auto row_dofs = dofs.row(e0 + j);
        for (int m = 0; m < nb; ++m) {
          const std::size_t r = row_dofs[m];
          const auto first = a.cols.begin() + a.row_ptr[r], last = a.cols.begin() + a.row_ptr[r + 1];
          for (int k = 0; k < nb; ++k) {
            const int pidx = m <= k ? detail::pair_index(m, k, nb) : detail::pair_index(k, m, nb);
            const auto it = std::lower_bound(first, last, row_dofs[k]);
            a.values[it - a.cols.begin()] += L[static_cast<std::size_t>(pidx) * n + j];
          }
        }
      }
    }
  }
  return a;
}

inline CsrMatrix assemble_matrix(MatrixKind matrix, ElementKind kind, const Discretization& disc) {
  return assemble_matrix(matrix, kind, dof_layout(kind, disc), disc.maps);
}

/// Images F_K(x̂) of one reference point for every element (#T x d).
inline Table<double> physical_points(const AffineMapBatch& maps, std::span<const double> xhat,
                                     std::size_t e0 = 0, std::size_t n = static_cast<std::size_t>(-1)) {
  const int d = maps.dim;
  n = std::min(n, maps.size() - e0);
  Table<double> x(n, d);
  for (std::size_t j = 0; j < n; ++j) {
    const double* m = maps.matrix(e0 + j);
    for (int r = 0; r < d; ++r) {
      double s = maps.b(e0 + j, r);
      for (int c = 0; c < d; ++c) s += m[r * d + c] * xhat[c];
      x(j, r) = s;
    }
  }
  return x;
}

namespace detail {

/// Signed Piola image of one reference vector on element e.
template <int D>
void map_vector(const Piola& p, const AffineMapBatch& maps, std::size_t e, const double* v, int nc_ref, double* out) {
  const double det = maps.det[e];
  const double scale = p.det_power == 0 ? 1.0 : 1.0 / det;
  const double* m = maps.matrix(e);
  switch (p.transform) {
    case Transform::identity:
      for (int c = 0; c < nc_ref; ++c) out[c] = scale * v[c];
      return;
    case Transform::jacobian:
      for (int r = 0; r < D; ++r) {
        double s = 0.0;
        for (int c = 0; c < D; ++c) s += m[r * D + c] * v[c];
        out[r] = scale * s;
      }
      return;
    case Transform::inverse_transpose: {
      const auto inv = invert<D>(m, det);
      for (int r = 0; r < D; ++r) {
        double s = 0.0;
        for (int c = 0; c < D; ++c) s += inv[c * D + r] * v[c];
        out[r] = scale * s;
      }
      return;
    }
  }
}

inline int mapped_components(ElementKind kind, bool derivative) {
  const auto info = element_info(kind);
  const Piola p = piola(kind, derivative);
  if (p.transform != Transform::identity) return info.dim;
  return derivative ? info.derivative_components : info.value_components;
}

/// Integrand on elements [e0, e0 + n) at quadrature point `qp` with physical
/// points x; writes n x components values.
using BlockIntegrand = std::function<void(std::size_t e0, std::size_t n, std::span<const double> xhat,
                                          const Table<double>& x, std::span<double> out)>;

template <int D>
std::vector<double> assemble_load_impl(Pairing pairing, ElementKind kind, int components, const BlockIntegrand& f,
                                       const DofLayout& layout, const AffineMapBatch& maps, int quad_order) {
  const bool derivative = pairing == Pairing::derivative;
  const auto info = element_info(kind);
  const Piola p = piola(kind, derivative);
  const int nc = mapped_components(kind, derivative);
  if (components != nc)
    throw Error(std::string(info.name) + " load: function has " + std::to_string(components) +
                " components, pairing expects " + std::to_string(nc));
  const auto rule = get_rule(quad_order, D);
  const auto ref = reference_table(kind, rule, derivative);
  const int nb = info.nbasis;
  const SignTable* signs = info.family == Family::p1 ? nullptr : layout.signs;
  const std::size_t nt = maps.size();
  const std::size_t block = assembly_block;
  const std::size_t nblocks = (nt + block - 1) / block;
  std::vector<double> local(nt * nb, 0.0);  // [e][k]

  parallel::for_ranges(
      nblocks,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> vals;
        for (std::size_t blk = begin; blk < end; ++blk) {
          const std::size_t e0 = blk * block;
          const std::size_t n = std::min(block, nt - e0);
          vals.resize(n * nc);
          for (std::size_t i = 0; i < rule.nip(); ++i) {
            const auto x = physical_points(maps, rule.point(i), e0, n);
            f(e0, n, rule.point(i), x, vals);
            const double w = rule.weights[i];
            for (std::size_t j = 0; j < n; ++j) {
              const std::size_t e = e0 + j;
              for (int k = 0; k < nb; ++k) {
                double v[3] = {ref(i, k, 0), ref.ncomp > 1 ? ref(i, k, 1) : 0.0, ref.ncomp > 2 ? ref(i, k, 2) : 0.0};
                double mapped[3];
                map_vector<D>(p, maps, e, v, ref.ncomp, mapped);
                double s = 0.0;
                for (int c = 0; c < nc; ++c) s += vals[j * nc + c] * mapped[c];
                local[e * nb + k] += w * maps.det_abs[e] * s;
              }
            }
          }
        }
      },
      1);

  std::vector<double> rhs(layout.ndofs, 0.0);
  const auto& dofs = *layout.elems2dofs;
  for (std::size_t e = 0; e < nt; ++e)
    for (int k = 0; k < nb; ++k) rhs[dofs(e, k)] += (signs ? (*signs)(e, k) : 1) * local[e * nb + k];
  return rhs;
}

template <int D>
std::vector<double> assemble_load_impl(Pairing pairing, ElementKind kind, const Function& f, const DofLayout& layout,
                                       const AffineMapBatch& maps, int quad_order) {
  return assemble_load_impl<D>(
      pairing, kind, f.components,
      [&f](std::size_t, std::size_t, std::span<const double>, const Table<double>& x, std::span<double> out) {
        f.eval(x, out);
      },
      layout, maps, quad_order);
}

}  // namespace detail

/// Load vector Σ_K Σ_i w_i |det B_K| f(F_K(x̂_i)) · (mapped, sign-corrected
/// basis function or its div / curl / gradient).
inline std::vector<double> assemble_load(Pairing pairing, ElementKind kind, const Function& f, const DofLayout& layout,
                                         const AffineMapBatch& maps, int quad_order = 6) {
  detail::check_layout(kind, layout, maps);
  return maps.dim == 2 ? detail::assemble_load_impl<2>(pairing, kind, f, layout, maps, quad_order)
                       : detail::assemble_load_impl<3>(pairing, kind, f, layout, maps, quad_order);
}

inline std::vector<double> assemble_load(Pairing pairing, ElementKind kind, const Function& f,
                                         const Discretization& disc, int quad_order = 6) {
  return assemble_load(pairing, kind, f, dof_layout(kind, disc), disc.maps, quad_order);
}

/// Load vector for an integrand that may depend on the element (e.g. a
/// discrete field evaluated through eval_field_range).
inline std::vector<double> assemble_load(Pairing pairing, ElementKind kind, int components,
                                         const detail::BlockIntegrand& g, const Discretization& disc,
                                         int quad_order = 6) {
  const auto layout = dof_layout(kind, disc);
  detail::check_layout(kind, layout, disc.maps);
  return disc.dim() == 2 ? detail::assemble_load_impl<2>(pairing, kind, components, g, layout, disc.maps, quad_order)
                         : detail::assemble_load_impl<3>(pairing, kind, components, g, layout, disc.maps, quad_order);
}

/// Number of components returned by eval_field for a kind / mode.
inline int field_components(ElementKind kind, bool derivative) { return detail::mapped_components(kind, derivative); }

/// Values (or div / curl / gradient) of a discrete field at one reference
/// point on elements [e0, e0 + n); writes n x components values.
inline void eval_field_range(const DiscreteField& field, std::span<const double> xhat, bool derivative, std::size_t e0,
                             std::size_t n, std::span<double> out) {
  if (!field.disc) throw Error("eval_field: field has no discretization");
  const auto& disc = *field.disc;
  const auto layout = dof_layout(field.kind, disc);
  if (field.coeffs.size() != layout.ndofs) throw Error("eval_field: coefficient count does not match topology");
  const auto info = element_info(field.kind);
  const auto p = detail::piola(field.kind, derivative);
  const int nc = field_components(field.kind, derivative);
  std::array<Vec3, 6> ref{};
  for (int k = 0; k < info.nbasis; ++k)
    ref[k] = derivative ? reference_derivative(field.kind, k) : reference_value(field.kind, k, xhat.data());
  const int nc_ref = derivative ? info.derivative_components : info.value_components;
  const bool has_signs = info.family != Family::p1;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t e = e0 + j;
    double acc[3] = {0, 0, 0};
    for (int k = 0; k < info.nbasis; ++k) {
      double mapped[3];
      if (info.dim == 2)
        detail::map_vector<2>(p, disc.maps, e, ref[k].data(), nc_ref, mapped);
      else
        detail::map_vector<3>(p, disc.maps, e, ref[k].data(), nc_ref, mapped);
      const double c = field.coeffs[(*layout.elems2dofs)(e, k)] * (has_signs ? (*layout.signs)(e, k) : 1);
      for (int q = 0; q < nc; ++q) acc[q] += c * mapped[q];
    }
    for (int q = 0; q < nc; ++q) out[j * nc + q] = acc[q];
  }
}

/// Same on every element: #T x components.
inline Table<double> eval_field_at(const DiscreteField& field, std::span<const double> xhat, bool derivative = false) {
  if (!field.disc) throw Error("eval_field: field has no discretization");
  const std::size_t nt = field.disc->maps.size();
  Table<double> out(nt, field_components(field.kind, derivative));
  const std::size_t nc = out.cols();
  parallel::for_ranges(nt, [&](std::size_t begin, std::size_t end) {
    eval_field_range(field, xhat, derivative, begin, end - begin,
                     std::span<double>(out.data().data() + begin * nc, (end - begin) * nc));
  });
  return out;
}

/// Field values at several reference points on every element.
struct FieldBatch {
  std::size_t nelems = 0, npoints = 0;
  int ncomp = 0;
  std::vector<double> data;  // [(e * npoints + p) * ncomp + c]
  double operator()(std::size_t e, std::size_t p, int c) const { return data[(e * npoints + p) * ncomp + c]; }
};

inline FieldBatch eval_field(const DiscreteField& field, const Table<double>& points, bool derivative = false) {
  FieldBatch batch;
  batch.nelems = field.disc->maps.size();
  batch.npoints = points.rows();
  batch.ncomp = field_components(field.kind, derivative);
  batch.data.resize(batch.nelems * batch.npoints * batch.ncomp);
  for (std::size_t p = 0; p < batch.npoints; ++p) {
    const auto vals = eval_field_at(field, points.row(p), derivative);
    for (std::size_t e = 0; e < batch.nelems; ++e)
      for (int c = 0; c < batch.ncomp; ++c) batch.data[(e * batch.npoints + p) * batch.ncomp + c] = vals(e, c);
  }
  return batch;
}

struct NormSq {
  double total = 0.0;
  std::vector<double> per_element;
};

/// Integrand evaluated at quadrature point `qp` (reference point `xhat`,
/// physical images `x`, #T x d) on all elements at once; fills `out`
/// (#T x components).
using BatchIntegrand =
    std::function<void(std::size_t qp, std::span<const double> xhat, const Table<double>& x, Table<double>& out)>;

/// Squared L2 norm Σ_K Σ_i w_i |det B_K| |g(F_K(x̂_i))|², per element and in total.
inline NormSq l2_norm_sq(const AffineMapBatch& maps, int components, const BatchIntegrand& g, int quad_order = 6) {
  const auto rule = get_rule(quad_order, maps.dim);
  const std::size_t nt = maps.size();
  NormSq result;
  result.per_element.assign(nt, 0.0);
  Table<double> vals(nt, components);
  for (std::size_t i = 0; i < rule.nip(); ++i) {
    const auto x = physical_points(maps, rule.point(i));
    g(i, rule.point(i), x, vals);
    const double w = rule.weights[i];
    for (std::size_t e = 0; e < nt; ++e) {
      double s = 0.0;
      for (int c = 0; c < components; ++c) s += vals(e, c) * vals(e, c);
      result.per_element[e] += w * maps.det_abs[e] * s;
    }
  }
  for (double v : result.per_element) result.total += v;
  return result;
}

inline NormSq l2_norm_sq(const AffineMapBatch& maps, const Function& f, int quad_order = 6) {
  return l2_norm_sq(
      maps, f.components,
      [&](std::size_t, std::span<const double>, const Table<double>& x, Table<double>& out) {
        f.eval(x, out.data());
      },
      quad_order);
}

/// Canonical interpolant: global dof functionals applied to f.
///   Nédélec: circulation along the edge from its higher to its lower node,
///   RT 2D:   flux through the clockwise-rotated edge tangent (same direction),
///   RT 3D:   flux through the right-hand normal of the ascending node triple,
///            relative to the reference triangle area,
///   P1:      nodal values.
inline DiscreteField interpolate(ElementKind kind, const Discretization& disc, const Function& f) {
  const auto info = element_info(kind);
  const int d = disc.dim();
  if (info.dim != d) throw Error("interpolate: dimension mismatch");
  const auto& X = disc.mesh.nodes2coord;
  DiscreteField field{kind, {}, &disc};

  if (info.family == Family::p1) {
    if (f.components != 1) throw Error("interpolate: P1 needs a scalar function");
    field.coeffs.resize(disc.mesh.num_nodes());
    f.eval(X, field.coeffs);
    return field;
  }
  if (f.components != d) throw Error("interpolate: vector function expected");

  if (info.entity == DofEntity::edge) {
    const auto line = gauss_interval(3);
    const auto& E = disc.topo.edges2nodes;
    const std::size_t ne = E.rows(), nq = line.nip();
    Table<double> pts(ne * nq, d);
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t q = 0; q < nq; ++q)
        for (int c = 0; c < d; ++c) {
          const double hi = X(E(e, 1), c), lo = X(E(e, 0), c);
          pts(e * nq + q, c) = hi + line.points(q, 0) * (lo - hi);
        }
    std::vector<double> vals(ne * nq * d);
    f.eval(pts, vals);
    field.coeffs.assign(ne, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
      double t[3];
      for (int c = 0; c < d; ++c) t[c] = X(E(e, 0), c) - X(E(e, 1), c);
      double dir[3] = {t[0], t[1], d == 3 ? t[2] : 0.0};
      if (info.family == Family::rt) {
        dir[0] = t[1];
        dir[1] = -t[0];
      }
      for (std::size_t q = 0; q < nq; ++q) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += dir[c] * vals[(e * nq + q) * d + c];
        field.coeffs[e] += line.weights[q] * s;
      }
    }
    return field;
  }

  const auto tri = get_rule(2, 2);
  const auto& F = disc.topo.faces2nodes;
  const std::size_t nf = F.rows(), nq = tri.nip();
  Table<double> pts(nf * nq, 3);
  std::vector<Vec3> normals(nf);
  for (std::size_t f2 = 0; f2 < nf; ++f2) {
    const auto a = X.row(F(f2, 0)), b = X.row(F(f2, 1)), c = X.row(F(f2, 2));
    const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]}, v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    normals[f2] = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    for (std::size_t q = 0; q < nq; ++q)
      for (int r = 0; r < 3; ++r) pts(f2 * nq + q, r) = a[r] + tri.points(q, 0) * u[r] + tri.points(q, 1) * v[r];
  }
  std::vector<double> vals(nf * nq * 3);
  f.eval(pts, vals);
  field.coeffs.assign(nf, 0.0);
  for (std::size_t f2 = 0; f2 < nf; ++f2)
    for (std::size_t q = 0; q < nq; ++q) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r) s += normals[f2][r] * vals[(f2 * nq + q) * 3 + r];
      field.coeffs[f2] += tri.weights[q] * s / 0.5;
    }
  return field;
}

}  // namespace edgefem
