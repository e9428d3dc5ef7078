#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>

#include "quadrature.hpp"

namespace edgefem {

enum class ElementKind { rt0_2d, rt0_3d, ned0_2d, ned0_3d, p1_2d, p1_3d };

enum class DofEntity { edge, face, node };

enum class Family { rt, ned, p1 };

struct ElementInfo {
  Family family;
  int dim;
  int nbasis;
  DofEntity entity;
  int value_components;       // components of η̂
  int derivative_components;  // div (1), 2D curl (1), 3D curl (3), gradient (d)
  std::string_view name;
};

constexpr ElementInfo element_info(ElementKind kind) {
  switch (kind) {
    case ElementKind::rt0_2d: return {Family::rt, 2, 3, DofEntity::edge, 2, 1, "RT0_2D"};
    case ElementKind::rt0_3d: return {Family::rt, 3, 4, DofEntity::face, 3, 1, "RT0_3D"};
    case ElementKind::ned0_2d: return {Family::ned, 2, 3, DofEntity::edge, 2, 1, "NED0_2D"};
    case ElementKind::ned0_3d: return {Family::ned, 3, 6, DofEntity::edge, 3, 3, "NED0_3D"};
    case ElementKind::p1_2d: return {Family::p1, 2, 3, DofEntity::node, 1, 2, "P1_2D"};
    case ElementKind::p1_3d: return {Family::p1, 3, 4, DofEntity::node, 1, 3, "P1_3D"};
  }
  return {Family::p1, 2, 3, DofEntity::node, 1, 2, "P1_2D"};
}

constexpr ElementKind element_kind(Family family, int dim) {
  switch (family) {
    case Family::rt: return dim == 2 ? ElementKind::rt0_2d : ElementKind::rt0_3d;
    case Family::ned: return dim == 2 ? ElementKind::ned0_2d : ElementKind::ned0_3d;
    case Family::p1: break;
  }
  return dim == 2 ? ElementKind::p1_2d : ElementKind::p1_3d;
}

inline constexpr ElementKind all_element_kinds[] = {ElementKind::rt0_2d, ElementKind::rt0_3d,
                                                    ElementKind::ned0_2d, ElementKind::ned0_3d,
                                                    ElementKind::p1_2d, ElementKind::p1_3d};

// Local entity numbering (0-based local vertices). Edges are directed
// start -> end; the direction is the reference tangent of the Nédélec dof.
inline constexpr std::array<std::array<int, 2>, 3> local_edges_2d{{{1, 2}, {2, 0}, {0, 1}}};
inline constexpr std::array<std::array<int, 2>, 6> local_edges_3d{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}, {3, 1}}};
inline constexpr std::array<std::array<int, 3>, 4> local_faces_3d{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
inline constexpr std::array<int, 4> face_opposite_vertex{3, 2, 1, 0};

using Vec3 = std::array<double, 3>;

/// Reference basis function k of the given kind at x̂ (unused trailing
/// components are zero; P1 stores its scalar in component 0).
inline Vec3 reference_value(ElementKind kind, int k, const double* x) {
  const double x1 = x[0], x2 = x[1];
  switch (kind) {
    case ElementKind::rt0_2d:
      switch (k) {
        case 0: return {x1, x2, 0};
        case 1: return {x1 - 1, x2, 0};
        default: return {x1, x2 - 1, 0};
      }
    case ElementKind::ned0_2d:
      switch (k) {
        case 0: return {-x2, x1, 0};
        case 1: return {-x2, x1 - 1, 0};
        default: return {1 - x2, x1, 0};
      }
    case ElementKind::p1_2d:
      switch (k) {
        case 0: return {1 - x1 - x2, 0, 0};
        case 1: return {x1, 0, 0};
        default: return {x2, 0, 0};
      }
    default: break;
  }
  const double x3 = x[2];
  switch (kind) {
    case ElementKind::rt0_3d:
      switch (k) {
        case 0: return {x1, x2, x3 - 1};
        case 1: return {x1, x2 - 1, x3};
        case 2: return {x1 - 1, x2, x3};
        default: return {x1, x2, x3};
      }
    case ElementKind::ned0_3d:
      switch (k) {
        case 0: return {1 - x3 - x2, x1, x1};
        case 1: return {x2, 1 - x3 - x1, x2};
        case 2: return {x3, x3, 1 - x2 - x1};
        case 3: return {-x2, x1, 0};
        case 4: return {0, -x3, x2};
        default: return {x3, 0, -x1};
      }
    default:
      switch (k) {
        case 0: return {1 - x1 - x2 - x3, 0, 0};
        case 1: return {x1, 0, 0};
        case 2: return {x2, 0, 0};
        default: return {x3, 0, 0};
      }
  }
}

/// div (RT), curl (Nédélec) or gradient (P1) of reference basis function k.
/// All are constant on the reference element for these linear families.
inline Vec3 reference_derivative(ElementKind kind, int k) {
  switch (kind) {
    case ElementKind::rt0_2d: return {2, 0, 0};
    case ElementKind::rt0_3d: return {3, 0, 0};
    case ElementKind::ned0_2d: return {2, 0, 0};
    case ElementKind::ned0_3d: {
      static constexpr Vec3 curls[6] = {{0, -2, 2}, {2, 0, -2}, {-2, 2, 0}, {0, 0, 2}, {2, 0, 0}, {0, 2, 0}};
      return curls[k];
    }
    case ElementKind::p1_2d: {
      static constexpr Vec3 grads[3] = {{-1, -1, 0}, {1, 0, 0}, {0, 1, 0}};
      return grads[k];
    }
    case ElementKind::p1_3d: {
      static constexpr Vec3 grads[4] = {{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      return grads[k];
    }
  }
  return {};
}

/// Basis values and derivatives tabulated at a set of reference points.
struct BasisTable {
  ElementKind kind{};
  std::size_t nip = 0;
  int nbasis = 0;
  int vcomp = 0;
  int dcomp = 0;
  std::vector<double> values;   // [(i * nbasis + k) * vcomp + c]
  std::vector<double> dvalues;  // [(i * nbasis + k) * dcomp + c]

  double value(std::size_t i, int k, int c) const { return values[(i * nbasis + k) * vcomp + c]; }
  double dvalue(std::size_t i, int k, int c) const { return dvalues[(i * nbasis + k) * dcomp + c]; }
};

inline BasisTable eval_basis(ElementKind kind, const Table<double>& points) {
  const auto info = element_info(kind);
  if (points.cols() != static_cast<std::size_t>(info.dim)) throw Error("eval_basis: point dimension mismatch");
  BasisTable t;
  t.kind = kind;
  t.nip = points.rows();
  t.nbasis = info.nbasis;
  t.vcomp = info.value_components;
  t.dcomp = info.derivative_components;
  t.values.resize(t.nip * t.nbasis * t.vcomp);
  t.dvalues.resize(t.nip * t.nbasis * t.dcomp);
  for (std::size_t i = 0; i < t.nip; ++i) {
    for (int k = 0; k < t.nbasis; ++k) {
      const Vec3 v = reference_value(kind, k, points.row(i).data());
      const Vec3 dv = reference_derivative(kind, k);
      for (int c = 0; c < t.vcomp; ++c) t.values[(i * t.nbasis + k) * t.vcomp + c] = v[c];
      for (int c = 0; c < t.dcomp; ++c) t.dvalues[(i * t.nbasis + k) * t.dcomp + c] = dv[c];
    }
  }
  return t;
}

inline Vec3 reference_vertex(int dim, int v) {
  Vec3 p{0, 0, 0};
  if (v > 0) p[v - 1] = 1.0;
  (void)dim;
  return p;
}

using ReferenceField = std::function<Vec3(const Vec3&)>;

/// Degrees of freedom of a field on the reference element:
///   Nédélec: ∫_ê t̂·u ds (t̂ from local start to end vertex),
///   RT: outward normal flux through the edge/face, measured relative to the
///       reference facet (interval length 1, triangle area 1/2),
///   P1: vertex values.
inline std::vector<double> dof_functionals(ElementKind kind, const ReferenceField& field) {
  const auto info = element_info(kind);
  const int d = info.dim;
  std::vector<double> alpha(info.nbasis, 0.0);

  auto sub = [](const Vec3& a, const Vec3& b) { return Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
  auto dot = [](const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };

  if (info.family == Family::p1) {
    for (int k = 0; k < info.nbasis; ++k) alpha[k] = field(reference_vertex(d, k))[0];
    return alpha;
  }

  const auto line = gauss_interval(2);
  auto edge_integral = [&](const Vec3& a, const Vec3& b, const Vec3& direction) {
    double sum = 0.0;
    for (std::size_t q = 0; q < line.nip(); ++q) {
      const double s = line.points(q, 0);
      const Vec3 x{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
      sum += line.weights[q] * dot(direction, field(x));
    }
    return sum;
  };

  if (info.family == Family::ned) {
    for (int k = 0; k < info.nbasis; ++k) {
      const auto [s, e] = d == 2 ? local_edges_2d[k] : local_edges_3d[k];
      const Vec3 a = reference_vertex(d, s), b = reference_vertex(d, e);
      // |ê| t̂ = b - a and ds = |ê| dτ, so the length factors cancel.
      alpha[k] = edge_integral(a, b, sub(b, a));
    }
    return alpha;
  }

  if (d == 2) {
    for (int k = 0; k < 3; ++k) {
      const auto [s, e] = local_edges_2d[k];
      const Vec3 a = reference_vertex(2, s), b = reference_vertex(2, e);
      const Vec3 t = sub(b, a);
      alpha[k] = edge_integral(a, b, Vec3{t[1], -t[0], 0.0});
    }
    return alpha;
  }

  const auto tri = get_rule(2, 2);
  for (int k = 0; k < 4; ++k) {
    const auto& f = local_faces_3d[k];
    const Vec3 a = reference_vertex(3, f[0]), b = reference_vertex(3, f[1]), c = reference_vertex(3, f[2]);
    const Vec3 u = sub(b, a), v = sub(c, a);
    Vec3 n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    if (dot(n, sub(a, reference_vertex(3, face_opposite_vertex[k]))) < 0) n = {-n[0], -n[1], -n[2]};
    double flux = 0.0;
    for (std::size_t q = 0; q < tri.nip(); ++q) {
      const double s = tri.points(q, 0), r = tri.points(q, 1);
      const Vec3 x{a[0] + s * u[0] + r * v[0], a[1] + s * u[1] + r * v[1], a[2] + s * u[2] + r * v[2]};
      flux += tri.weights[q] * dot(n, field(x));
    }
    // flux = ∫_f̂ n̂·u dS since |n| = |u x v| is the surface Jacobian.
    alpha[k] = flux / 0.5;
  }
  return alpha;
}

}  // namespace edgefem
