#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "assembly.hpp"
#include "meshgen.hpp"
#include "solver.hpp"

namespace edgefem {

/// Exact data of the Poisson test problem -Δu = f, u = 0 on the boundary.
struct PoissonProblem {
  Function u;
  Function grad_u;
  Function f;
};

/// Bubble u = Π x_i (x_i - 1) on the unit square / cube.
inline PoissonProblem poisson_bubble(int dim) {
  if (dim != 2 && dim != 3) throw Error("poisson_bubble: dimension must be 2 or 3");
  auto factor = [](double t) { return t * (t - 1.0); };
  PoissonProblem p;
  p.u = {1, [dim, factor](const Table<double>& x, std::span<double> out) {
           for (std::size_t i = 0; i < x.rows(); ++i) {
             double v = 1.0;
             for (int c = 0; c < dim; ++c) v *= factor(x(i, c));
             out[i] = v;
           }
         }};
  p.grad_u = {dim, [dim, factor](const Table<double>& x, std::span<double> out) {
                for (std::size_t i = 0; i < x.rows(); ++i)
                  for (int j = 0; j < dim; ++j) {
                    double v = 2.0 * x(i, j) - 1.0;
                    for (int c = 0; c < dim; ++c)
                      if (c != j) v *= factor(x(i, c));
                    out[i * dim + j] = v;
                  }
              }};
  p.f = {1, [dim, factor](const Table<double>& x, std::span<double> out) {
           for (std::size_t i = 0; i < x.rows(); ++i) {
             double s = 0.0;
             for (int j = 0; j < dim; ++j) {
               double v = 2.0;
               for (int c = 0; c < dim; ++c)
                 if (c != j) v *= factor(x(i, c));
               s += v;
             }
             out[i] = -s;
           }
         }};
  return p;
}

/// 1 / (π √d): exact Friedrichs constant of the unit square and cube.
inline double friedrichs_constant(Domain domain) {
  switch (domain) {
    case Domain::unit_square: return 1.0 / (std::numbers::pi * std::sqrt(2.0));
    case Domain::unit_cube: return 1.0 / (std::numbers::pi * std::sqrt(3.0));
    default: break;
  }
  throw Error("friedrichs_constant: no known constant for domain '" + std::string(domain_name(domain)) +
              "', supply one explicitly");
}

struct PoissonSolution {
  DiscreteField v;
  SolveResult solve;
};

/// P1 Galerkin solution with homogeneous Dirichlet data on the whole boundary.
inline PoissonSolution solve_poisson_p1(const Discretization& disc, const Function& f, CgOptions options = {}) {
  const auto kind = element_kind(Family::p1, disc.dim());
  const auto K = assemble_matrix(MatrixKind::stiffness, kind, disc);
  const auto b = assemble_load(Pairing::value, kind, f, disc);
  const auto fixed = boundary_nodes(disc.mesh, disc.topo);
  const auto sys = eliminate_dirichlet(K, b, fixed);
  PoissonSolution result;
  result.solve = cg_solve(sys, options);
  if (!result.solve.converged)
    throw Error("solve_poisson_p1: CG did not converge (relative residual " + std::to_string(result.solve.residual) +
                ")");
  result.v = make_field(kind, disc, expand_solution(sys, result.solve.x, disc.mesh.num_nodes(), fixed));
  return result;
}

/// One iterate of the majorant minimization.
struct MajorantState {
  int iteration = 0;
  double beta = 1.0;  // weight used to compute y
  DiscreteField y;
  double M_value = 0.0;  // (1 + 1/β) d1² + (1 + β) C² d2²
  double d1 = 0.0;       // ||∇v - y||
  double d2 = 0.0;       // ||div y + f||
  double I_eff = std::numeric_limits<double>::quiet_NaN();
  int cg_iterations = 0;
};

struct MajorantOptions {
  double beta0 = 1.0;
  double stop_rel = 1e-4;
  int max_outer = 20;
  int quad_order = 6;
  CgOptions cg{};
};

struct MajorantResult {
  std::vector<MajorantState> history;
  double error_sq = std::numeric_limits<double>::quiet_NaN();  // ||∇(u - v)||² when ∇u is known
  bool converged = false;
  bool exact_flux = false;  // d2 vanished: β = ∞, bound is d1² alone
};

/// Majorant value for the given pieces.
inline double majorant_value(double beta, double C, double d1, double d2) {
  if (std::isinf(beta)) return d1 * d1;
  return (1.0 + 1.0 / beta) * d1 * d1 + (1.0 + beta) * C * C * d2 * d2;
}

/// ||∇(u - v)||² for a P1 field and a known gradient.
inline double energy_error_sq(const DiscreteField& v, const Function& grad_u, int quad_order = 6) {
  const auto& maps = v.disc->maps;
  const int d = maps.dim;
  return l2_norm_sq(
             maps, d,
             [&](std::size_t, std::span<const double> xhat, const Table<double>& x, Table<double>& out) {
               grad_u.eval(x, out.data());
               const auto gv = eval_field_at(v, xhat, true);
               for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= gv.data()[i];
             },
             quad_order)
      .total;
}

/// Alternating minimization of the majorant over y in RT0 and β > 0.
/// Stops when the relative change of the majorant drops below stop_rel.
inline MajorantResult minimize_majorant(const DiscreteField& v, const Function& f, double C,
                                        const std::optional<Function>& grad_u = std::nullopt,
                                        MajorantOptions options = {}) {
  if (!v.disc) throw Error("minimize_majorant: field has no discretization");
  if (!(C > 0.0)) throw Error("minimize_majorant: Friedrichs constant must be positive");
  if (!(options.beta0 > 0.0)) throw Error("minimize_majorant: beta0 must be positive");
  const auto& disc = *v.disc;
  const int d = disc.dim();
  const auto rt = element_kind(Family::rt, d);
  const auto& maps = disc.maps;
  const int q = options.quad_order;

  const auto K = assemble_matrix(MatrixKind::stiffness, rt, disc);
  const auto M = assemble_matrix(MatrixKind::mass, rt, disc);
  const auto load_div = assemble_load(Pairing::derivative, rt, f, disc, q);
  const auto load_grad = assemble_load(
      Pairing::value, rt, d,
      [&v](std::size_t e0, std::size_t n, std::span<const double> xhat, const Table<double>&, std::span<double> out) {
        eval_field_range(v, xhat, true, e0, n, out);
      },
      disc, q);

  MajorantResult result;
  if (grad_u) result.error_sq = energy_error_sq(v, *grad_u, q);

  double beta = options.beta0;
  for (int it = 1; it <= options.max_outer; ++it) {
    const double a = (1.0 + beta) * C * C, b = 1.0 + 1.0 / beta;
    const auto A = linear_combination(a, K, b, M);
    std::vector<double> rhs(load_div.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -a * load_div[i] + b * load_grad[i];
    auto sol = cg_solve(A, rhs, options.cg);
    if (!sol.converged)
      throw Error("minimize_majorant: CG did not converge at iteration " + std::to_string(it) +
                  " (relative residual " + std::to_string(sol.residual) + ")");

    MajorantState s;
    s.iteration = it;
    s.beta = beta;
    s.cg_iterations = sol.iterations;
    s.y = make_field(rt, disc, std::move(sol.x));
    s.d1 = std::sqrt(l2_norm_sq(
                         maps, d,
                         [&](std::size_t, std::span<const double> xhat, const Table<double>&, Table<double>& out) {
                           const auto gv = eval_field_at(v, xhat, true);
                           const auto yv = eval_field_at(s.y, xhat, false);
                           for (std::size_t i = 0; i < out.data().size(); ++i)
                             out.data()[i] = gv.data()[i] - yv.data()[i];
                         },
                         q)
                         .total);
    s.d2 = std::sqrt(l2_norm_sq(
                         maps, 1,
                         [&](std::size_t, std::span<const double> xhat, const Table<double>& x, Table<double>& out) {
                           f.eval(x, out.data());
                           const auto dy = eval_field_at(s.y, xhat, true);
                           for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += dy.data()[i];
                         },
                         q)
                         .total);
    s.M_value = majorant_value(beta, C, s.d1, s.d2);
    if (grad_u) s.I_eff = std::sqrt(s.M_value / result.error_sq);

    const double prev = result.history.empty() ? 0.0 : result.history.back().M_value;
    result.history.push_back(std::move(s));
    const auto& cur = result.history.back();

    if (cur.d2 == 0.0) {
      // y is an exact flux for f: the β → ∞ limit leaves d1² alone
      MajorantState inf = cur;
      inf.iteration = it + 1;
      inf.beta = std::numeric_limits<double>::infinity();
      inf.M_value = cur.d1 * cur.d1;
      if (grad_u) inf.I_eff = std::sqrt(inf.M_value / result.error_sq);
      result.history.push_back(std::move(inf));
      result.exact_flux = true;
      result.converged = true;
      break;
    }
    if (it > 1 && std::abs(prev - cur.M_value) < options.stop_rel * prev) {
      result.converged = true;
      break;
    }
    beta = cur.d1 / (C * cur.d2);
  }
  return result;
}

}  // namespace edgefem
