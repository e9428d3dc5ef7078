#pragma once

#include <chrono>
#include <functional>
#include <limits>
#include <new>

#include "assembly.hpp"
#include "meshgen.hpp"

namespace edgefem {

/// Timings of the four edge-element matrices on one mesh level.
struct BenchRow {
  int level = 0;
  std::size_t elements = 0;
  std::size_t rt_dofs = 0;   // edges (2D) or faces (3D)
  std::size_t ned_dofs = 0;  // edges
  double seconds[4] = {0, 0, 0, 0};  // K_RT, M_RT, K_Ned, M_Ned
  double total = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // total / previous level total
  int repeats = 0;
  bool out_of_memory = false;
};

inline constexpr const char* bench_matrix_names[4] = {"K_RT", "M_RT", "K_Ned", "M_Ned"};

struct BenchOptions {
  int max_repeats = 20;
  double min_seconds = 1.0;  // keep repeating small levels until this much time was spent
};

/// Times assembly (pattern, local matrices and scatter) of K_RT, M_RT,
/// K_Ned and M_Ned for each level; mesh generation and topology are not
/// timed. Each time is the best of several runs on small levels. A level
/// that runs out of memory is reported and ends the sweep.
inline std::vector<BenchRow> run_benchmark(Domain domain, int level_from, int level_to, BenchOptions options = {},
                                           const std::function<void(const BenchRow&)>& on_row = {}) {
  using clock = std::chrono::steady_clock;
  const int d = domain_dim(domain);
  const std::pair<MatrixKind, ElementKind> jobs[4] = {
      {MatrixKind::stiffness, element_kind(Family::rt, d)},
      {MatrixKind::mass, element_kind(Family::rt, d)},
      {MatrixKind::stiffness, element_kind(Family::ned, d)},
      {MatrixKind::mass, element_kind(Family::ned, d)},
  };
  std::vector<BenchRow> rows;
  for (int level = level_from; level <= level_to; ++level) {
    BenchRow row;
    row.level = level;
    try {
      const auto disc = Discretization::build(generate_structured_mesh(domain, level));
      row.elements = disc.mesh.num_elems();
      row.ned_dofs = disc.topo.num_edges();
      row.rt_dofs = d == 2 ? disc.topo.num_edges() : disc.topo.num_faces();
      for (int j = 0; j < 4; ++j) {
        double best = std::numeric_limits<double>::infinity(), spent = 0.0;
        int runs = 0;
        while (runs < std::max(1, options.max_repeats) && (runs == 0 || spent < options.min_seconds)) {
          const auto t0 = clock::now();
          {
            const auto a = assemble_matrix(jobs[j].first, jobs[j].second, disc);
          }
          const double s = std::chrono::duration<double>(clock::now() - t0).count();
          best = std::min(best, s);
          spent += s;
          ++runs;
        }
        row.seconds[j] = best;
        row.repeats = std::max(row.repeats, runs);
        row.total += best;
      }
    } catch (const std::bad_alloc&) {
      row.out_of_memory = true;
    }
    if (!row.out_of_memory && !rows.empty() && !rows.back().out_of_memory && rows.back().total > 0.0)
      row.ratio = row.total / rows.back().total;
    rows.push_back(row);
    if (on_row) on_row(row);
    if (row.out_of_memory) break;
  }
  return rows;
}

}  // namespace edgefem
