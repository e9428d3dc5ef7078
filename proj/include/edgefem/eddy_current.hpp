#pragma once

#include <cmath>
#include <numbers>

#include "assembly.hpp"
#include "solver.hpp"

namespace edgefem {

/// curl μ⁻¹ curl E + κ E = F on the unit square with natural boundary
/// conditions. E and curl E are the exact solution, used for error measures.
struct EddyProblem {
  double mu = 1.0;
  double kappa = 1.0;
  Function F;
  Function E;      // 2 components
  Function curlE;  // scalar
  // E jumps across the diagonal x1 = x2, so meshes must have it as a mesh line.
  bool needs_diagonal_mesh = false;
};

namespace detail {

/// Pieces of the exact solution on x1 > x2; g = x2 (x1 - x2)² (x1 - 1)².
struct EddyExact {
  double E1, E2, curl, curl_d1, curl_d2;
};

inline EddyExact eddy_exact(double x1, double x2) {
  constexpr double tau = 2.0 * std::numbers::pi;
  const double a = x1 - x2, b = x1 - 1.0;
  const double g = x2 * a * a * b * b;
  const double g1 = 2.0 * x2 * (a * a * b + a * b * b);
  const double g2 = a * a * b * b - 2.0 * x2 * a * b * b;
  const double g11 = 2.0 * x2 * (a * a + 4.0 * a * b + b * b);
  const double g12 = 2.0 * (a * a * b + a * b * b) - 2.0 * x2 * (2.0 * a * b + b * b);
  const double sg = std::sin(g), cg = std::cos(g);
  EddyExact r;
  r.E1 = std::sin(tau * x1) + tau * std::cos(tau * x1) * a;
  r.E2 = sg - std::sin(tau * x1);
  r.curl = cg * g1;
  r.curl_d1 = -sg * g1 * g1 + cg * g11;
  r.curl_d2 = -sg * g1 * g2 + cg * g12;
  return r;
}

}  // namespace detail

/// The discontinuous test solution: E as above on x1 > x2, zero elsewhere.
inline EddyProblem eddy_example(double mu = 1.0, double kappa = 1.0) {
  EddyProblem p;
  p.mu = mu;
  p.kappa = kappa;
  p.needs_diagonal_mesh = true;
  p.E = vector_function<2>([](const double* x) -> std::array<double, 2> {
    if (!(x[0] > x[1])) return {0.0, 0.0};
    const auto r = detail::eddy_exact(x[0], x[1]);
    return {r.E1, r.E2};
  });
  p.curlE = scalar_function([](const double* x) { return x[0] > x[1] ? detail::eddy_exact(x[0], x[1]).curl : 0.0; });
  p.F = vector_function<2>([mu, kappa](const double* x) -> std::array<double, 2> {
    if (!(x[0] > x[1])) return {0.0, 0.0};
    const auto r = detail::eddy_exact(x[0], x[1]);
    return {r.curl_d2 / mu + kappa * r.E1, -r.curl_d1 / mu + kappa * r.E2};
  });
  return p;
}

/// Constant solution E = e, F = κ e. Reproduced exactly by NED0.
inline EddyProblem eddy_constant(double e1, double e2, double mu = 1.0, double kappa = 1.0) {
  EddyProblem p;
  p.mu = mu;
  p.kappa = kappa;
  p.E = vector_function<2>([e1, e2](const double*) { return std::array<double, 2>{e1, e2}; });
  p.curlE = scalar_function([](const double*) { return 0.0; });
  p.F = vector_function<2>([e1, e2, kappa](const double*) { return std::array<double, 2>{kappa * e1, kappa * e2}; });
  return p;
}

/// True when no element straddles the line x1 = x2.
inline bool is_diagonal_conforming(const Mesh& mesh, double tol = 1e-12) {
  for (std::size_t e = 0; e < mesh.num_elems(); ++e) {
    bool above = false, below = false;
    for (Index v : mesh.elems2nodes.row(e)) {
      const double s = mesh.nodes2coord(v, 0) - mesh.nodes2coord(v, 1);
      above |= s > tol;
      below |= s < -tol;
    }
    if (above && below) return false;
  }
  return true;
}

struct EddyResult {
  DiscreteField v;
  double l2_error = 0.0;    // ||E - v||
  double curl_error = 0.0;  // ||curl (E - v)||
  double energy_error = 0.0;
  SolveResult solve;
};

/// ||E - v||² + ||curl(E - v)||² split into its two parts.
inline std::pair<double, double> eddy_error_sq(const DiscreteField& v, const EddyProblem& p, int quad_order = 6) {
  const auto& maps = v.disc->maps;
  const double l2 = l2_norm_sq(
                        maps, 2,
                        [&](std::size_t, std::span<const double> xhat, const Table<double>& x, Table<double>& out) {
                          p.E.eval(x, out.data());
                          const auto vh = eval_field_at(v, xhat, false);
                          for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= vh.data()[i];
                        },
                        quad_order)
                        .total;
  const double curl = l2_norm_sq(
                          maps, 1,
                          [&](std::size_t, std::span<const double> xhat, const Table<double>& x, Table<double>& out) {
                            p.curlE.eval(x, out.data());
                            const auto ch = eval_field_at(v, xhat, true);
                            for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= ch.data()[i];
                          },
                          quad_order)
                          .total;
  return {l2, curl};
}

/// Galerkin NED0 solution of the weak form
///   (μ⁻¹ curl E, curl w) + (κ E, w) = (F, w)  for all w,
/// with no essential boundary conditions, and its exact energy error.
inline EddyResult solve_eddy_current(const Discretization& disc, const EddyProblem& p, CgOptions options = {},
                                     int quad_order = 6) {
  if (disc.dim() != 2) throw Error("solve_eddy_current: 2D meshes only");
  if (!(p.mu > 0.0) || !(p.kappa > 0.0)) throw Error("solve_eddy_current: mu and kappa must be positive");
  if (p.needs_diagonal_mesh && !is_diagonal_conforming(disc.mesh))
    throw Error("solve_eddy_current: mesh is not aligned with the diagonal x1 = x2 where the solution jumps");
  const auto kind = ElementKind::ned0_2d;
  const auto K = assemble_matrix(MatrixKind::stiffness, kind, disc);
  const auto M = assemble_matrix(MatrixKind::mass, kind, disc);
  const auto A = linear_combination(1.0 / p.mu, K, p.kappa, M);
  const auto b = assemble_load(Pairing::value, kind, p.F, disc, quad_order);

  EddyResult r;
  r.solve = cg_solve(A, b, options);
  if (!r.solve.converged)
    throw Error("solve_eddy_current: CG did not converge (relative residual " + std::to_string(r.solve.residual) + ")");
  r.v = make_field(kind, disc, r.solve.x);
  const auto [l2, curl] = eddy_error_sq(r.v, p, quad_order);
  r.l2_error = std::sqrt(l2);
  r.curl_error = std::sqrt(curl);
  r.energy_error = std::sqrt(l2 + curl);
  return r;
}

}  // namespace edgefem
