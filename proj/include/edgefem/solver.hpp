#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparse.hpp"

namespace edgefem {

namespace detail {

inline constexpr std::size_t reduction_chunk = 4096;

/// Dot product summed in fixed-size chunks whose partial sums are then added
/// in chunk order, so the result does not depend on the worker count.
inline double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t nchunks = (n + reduction_chunk - 1) / reduction_chunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel::for_ranges(
      nchunks,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          double s = 0.0;
          const std::size_t last = std::min(n, (c + 1) * reduction_chunk);
          for (std::size_t i = c * reduction_chunk; i < last; ++i) s += x[i] * y[i];
          partial[c] = s;
        }
      },
      16);
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace detail

struct LinearSystem {
  CsrMatrix A;
  std::vector<double> rhs;
  std::vector<Index> free_dofs;  // original indices of the unknowns kept in A
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b|| of the returned x
  bool converged = false;
  std::vector<double> history;  // relative residual of each reported iterate
};

struct CgOptions {
  double tol = 1e-10;
  int max_iter = -1;  // default 10 n
};

/// Jacobi-preconditioned conjugate gradients on an SPD matrix.
///
/// The 2-norm of the plain CG residual can oscillate, so the iterates are
/// passed through minimal residual smoothing: the returned iterate y_k
/// minimizes ||b - A y|| over y_{k-1} + t (x_k - y_{k-1}), which makes the
/// reported residual history non-increasing. Stops when the smoothed residual
/// drops below tol * ||b|| or after max_iter iterations.
inline SolveResult cg_solve(const CsrMatrix& A, std::span<const double> b, CgOptions options = {}) {
  using detail::dot;
  const std::size_t n = A.n_rows;
  if (A.n_cols != n || b.size() != n) throw Error("cg_solve: dimension mismatch");
  SolveResult result;
  result.x.assign(n, 0.0);
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(std::max<std::size_t>(10 * n, 10));

  std::vector<double> inv_diag = A.diagonal();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0))
      throw Error("cg_solve: non-positive diagonal entry at row " + std::to_string(i + 1) + " (Jacobi preconditioner)");
    inv_diag[i] = 1.0 / inv_diag[i];
  }
  for (double v : b)
    if (!std::isfinite(v)) throw Error("cg_solve: non-finite right-hand side");

  const double bnorm = detail::norm2(b);
  if (bnorm == 0.0) {
    result.converged = true;
    result.history.push_back(0.0);
    return result;
  }

  std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), q(n);
  std::vector<double>& y = result.x;  // smoothed iterate
  std::vector<double> s(b.begin(), b.end());  // residual of y
  double s_norm2 = dot(s, s);
  result.history.push_back(1.0);

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const double target = options.tol * bnorm;

  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw Error("cg_solve: matrix is not positive definite (p^T A p <= 0)");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }

    // smoothing step: t minimizes ||s + t (r - s)||
    double num = 0.0, den = 0.0;
    {
      std::vector<double>& diff = z;  // reuse as scratch before z is recomputed
      for (std::size_t i = 0; i < n; ++i) diff[i] = r[i] - s[i];
      num = -dot(s, diff);
      den = dot(diff, diff);
      const double t = den > 0.0 ? num / den : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] += t * (x[i] - y[i]);
        s[i] += t * diff[i];
      }
    }
    s_norm2 = dot(s, s);
    const double snorm = std::sqrt(std::max(s_norm2, 0.0));
    result.history.push_back(snorm / bnorm);
    result.iterations = it;
    if (snorm <= target) {
      result.converged = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  std::vector<double> Ay = A * std::span<const double>(y);
  for (std::size_t i = 0; i < n; ++i) Ay[i] = b[i] - Ay[i];
  result.residual = detail::norm2(Ay) / bnorm;
  return result;
}

inline SolveResult cg_solve(const LinearSystem& sys, CgOptions options = {}) { return cg_solve(sys.A, sys.rhs, options); }

/// Removes the rows and columns of fixed dofs; the right-hand side becomes
/// b_free - A[free, fixed] * values.
inline LinearSystem eliminate_dirichlet(const CsrMatrix& A, std::span<const double> b, std::span<const Index> fixed,
                                        std::span<const double> values = {}) {
  const std::size_t n = A.n_rows;
  if (A.n_cols != n || b.size() != n) throw Error("eliminate_dirichlet: dimension mismatch");
  if (!values.empty() && values.size() != fixed.size()) throw Error("eliminate_dirichlet: values/fixed size mismatch");
  std::vector<double> fixed_value(n, 0.0);
  std::vector<char> is_fixed(n, 0);
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (fixed[k] < 0 || static_cast<std::size_t>(fixed[k]) >= n) throw Error("eliminate_dirichlet: index out of range");
    is_fixed[fixed[k]] = 1;
    if (!values.empty()) fixed_value[fixed[k]] = values[k];
  }
  std::vector<Index> new_index(n, -1);
  LinearSystem sys;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_fixed[i]) {
      new_index[i] = static_cast<Index>(sys.free_dofs.size());
      sys.free_dofs.push_back(static_cast<Index>(i));
    }
  const std::size_t m = sys.free_dofs.size();
  sys.A.n_rows = sys.A.n_cols = m;
  sys.A.row_ptr.assign(m + 1, 0);
  sys.rhs.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Index i = sys.free_dofs[k];
    double rhs = b[i];
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      const Index j = A.cols[p];
      if (is_fixed[j]) {
        rhs -= A.values[p] * fixed_value[j];
      } else {
        sys.A.cols.push_back(new_index[j]);
        sys.A.values.push_back(A.values[p]);
      }
    }
    sys.rhs[k] = rhs;
    sys.A.row_ptr[k + 1] = sys.A.values.size();
  }
  return sys;
}

/// Scatters a reduced solution back to the full dof vector.
inline std::vector<double> expand_solution(const LinearSystem& sys, std::span<const double> x_free, std::size_t n,
                                           std::span<const Index> fixed = {}, std::span<const double> values = {}) {
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < fixed.size(); ++k) x[fixed[k]] = values.empty() ? 0.0 : values[k];
  for (std::size_t k = 0; k < sys.free_dofs.size(); ++k) x[sys.free_dofs[k]] = x_free[k];
  return x;
}

}  // namespace edgefem
