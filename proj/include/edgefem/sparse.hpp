#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "common.hpp"
#include "parallel.hpp"

namespace edgefem {

/// Compressed sparse row matrix with sorted, unique column indices per row.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<Index> cols;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const {
    const auto first = cols.begin() + row_ptr[i], last = cols.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(first, last, static_cast<Index>(j));
    return it != last && *it == static_cast<Index>(j) ? values[it - cols.begin()] : 0.0;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(std::min(n_rows, n_cols), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  /// y = A x, parallel over row blocks.
  void multiply(std::span<const double> x, std::span<double> y) const {
    parallel::for_ranges(n_rows, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += values[p] * x[cols[p]];
        y[i] = s;
      }
    });
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(n_rows);
    multiply(x, y);
    return y;
  }
};

/// Triplet accumulator. Duplicate (row, col) entries are summed on
/// finalize() in insertion order, so the result is reproducible.
class TripletMatrix {
 public:
  TripletMatrix(std::size_t rows, std::size_t cols) : n_rows_(rows), n_cols_(cols) {}

  void add(Index row, Index col, double value) {
    if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= n_rows_ || static_cast<std::size_t>(col) >= n_cols_)
      throw Error("triplet index out of range");
    rows_.push_back(row);
    cols_.push_back(col);
    values_.push_back(value);
  }

  std::size_t size() const { return values_.size(); }

  CsrMatrix finalize() const {
    CsrMatrix a;
    a.n_rows = n_rows_;
    a.n_cols = n_cols_;
    std::vector<std::size_t> start(n_rows_ + 1, 0);
    for (Index r : rows_) ++start[r + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::size_t> order(values_.size());
    {
      std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
      for (std::size_t t = 0; t < values_.size(); ++t) order[cursor[rows_[t]]++] = t;
    }
    a.row_ptr.assign(n_rows_ + 1, 0);
    for (std::size_t r = 0; r < n_rows_; ++r) {
      auto first = order.begin() + start[r], last = order.begin() + start[r + 1];
      std::stable_sort(first, last, [&](std::size_t x, std::size_t y) { return cols_[x] < cols_[y]; });
      for (auto it = first; it != last; ++it) {
        if (it == first || cols_[*it] != cols_[*(it - 1)]) {
          a.cols.push_back(cols_[*it]);
          a.values.push_back(values_[*it]);
        } else {
          a.values.back() += values_[*it];
        }
      }
      a.row_ptr[r + 1] = a.values.size();
    }
    return a;
  }

 private:
  std::size_t n_rows_, n_cols_;
  std::vector<Index> rows_, cols_;
  std::vector<double> values_;
};

/// max |A - A^T| over stored entries.
inline double symmetry_defect(const CsrMatrix& a) {
  double defect = 0.0;
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      defect = std::max(defect, std::abs(a.values[p] - a.at(a.cols[p], i)));
  return defect;
}

/// alpha A + beta B for two matrices stored on the same pattern.
inline CsrMatrix linear_combination(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols || a.row_ptr != b.row_ptr || a.cols != b.cols)
    throw Error("linear_combination: matrices do not share a sparsity pattern");
  CsrMatrix c = a;
  for (std::size_t p = 0; p < c.values.size(); ++p) c.values[p] = alpha * a.values[p] + beta * b.values[p];
  return c;
}

/// Matrix Market coordinate format, 1-based. With `symmetric` only the lower
/// triangle is written.
inline void write_matrix_market(std::ostream& out, const CsrMatrix& a, bool symmetric) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (!symmetric || static_cast<std::size_t>(a.cols[p]) <= i) ++count;
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
  out << a.n_rows << ' ' << a.n_cols << ' ' << count << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (!symmetric || static_cast<std::size_t>(a.cols[p]) <= i)
        out << i + 1 << ' ' << a.cols[p] + 1 << ' ' << a.values[p] << '\n';
}

inline CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) throw Error("not a Matrix Market file");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  std::size_t rows = 0, cols = 0, count = 0;
  if (!(header >> rows >> cols >> count)) throw Error("Matrix Market: bad size line");
  TripletMatrix t(rows, cols);
  for (std::size_t k = 0; k < count; ++k) {
    long i, j;
    double v;
    if (!(in >> i >> j >> v)) throw Error("Matrix Market: truncated entries");
    t.add(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    if (symmetric && i != j) t.add(static_cast<Index>(j - 1), static_cast<Index>(i - 1), v);
  }
  return t.finalize();
}

inline void write_vector(std::ostream& out, std::span<const double> v) {
  out.precision(17);
  for (double x : v) out << x << '\n';
}

}  // namespace edgefem
