// edgefem command-line driver: meshes, matrices, benchmark and the two
// application studies.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <regex>

#include "edgefem/edgefem.hpp"

using namespace edgefem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::pair<int, int> parse_levels(const std::string& text) {
  static const std::regex range(R"(\s*(\d+)\s*(?:\.\.|-|:)\s*(\d+)\s*)"), single(R"(\s*(\d+)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, range)) {
    const int a = std::stoi(m[1]), b = std::stoi(m[2]);
    if (a > b) throw Error("level range '" + text + "' is empty");
    return {a, b};
  }
  if (std::regex_match(text, m, single)) return {std::stoi(m[1]), std::stoi(m[1])};
  throw Error("cannot parse levels '" + text + "' (expected N or A..B)");
}

Family parse_family(const std::string& name) {
  if (name == "rt0" || name == "rt") return Family::rt;
  if (name == "ned0" || name == "ned") return Family::ned;
  if (name == "p1") return Family::p1;
  throw Error("unknown element '" + name + "' (rt0, ned0, p1)");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  return out;
}

/// Writes to `path`, or to stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  fn(out);
  out.close();
  if (!out) throw Error("error while writing '" + path + "'");
}

Mesh load_or_generate(const std::string& mesh_file, const std::string& domain, int level) {
  if (!mesh_file.empty()) {
    std::ifstream in(mesh_file);
    if (!in) throw Error("cannot open mesh '" + mesh_file + "'");
    return read_mesh(in);
  }
  return generate_structured_mesh(parse_domain(domain), level);
}

int cmd_mesh(const std::string& domain, int level, const std::string& out_path) {
  const auto mesh = generate_structured_mesh(parse_domain(domain), level);
  const auto maps = affine_transformations(mesh);
  const auto topo = build_topology(mesh, maps);
  with_output(out_path, [&](std::ostream& out) { write_mesh(out, mesh); });
  std::fprintf(stderr, "nodes %zu  elements %zu  edges %zu", mesh.num_nodes(), mesh.num_elems(), topo.num_edges());
  if (mesh.dim == 3) std::fprintf(stderr, "  faces %zu", topo.num_faces());
  std::fprintf(stderr, "\n");
  return 0;
}

int cmd_assemble(const std::string& domain, int level, const std::string& mesh_file, const std::string& element,
                 const std::string& matrix, const std::string& out_path) {
  auto mesh = load_or_generate(mesh_file, domain, level);
  const auto disc = Discretization::build(std::move(mesh));
  const auto kind = element_kind(parse_family(element), disc.dim());
  MatrixKind mk;
  if (matrix == "mass")
    mk = MatrixKind::mass;
  else if (matrix == "stiffness")
    mk = MatrixKind::stiffness;
  else
    throw Error("unknown matrix '" + matrix + "' (mass, stiffness)");

  const auto t0 = clock_type::now();
  const auto a = assemble_matrix(mk, kind, disc);
  const double t = seconds_since(t0);
  with_output(out_path, [&](std::ostream& out) { write_matrix_market(out, a, true); });
  std::fprintf(stderr, "%s %s: %zu dofs, %zu nonzeros, assembled in %.3f s\n", element_info(kind).name.data(),
               matrix.c_str(), a.n_rows, a.nnz(), t);
  return 0;
}

int cmd_bench(const std::string& domain_name_arg, const std::string& levels, const std::string& out_path,
              int repeats) {
  const auto domain = parse_domain(domain_name_arg);
  const auto [from, to] = parse_levels(levels);
  BenchOptions options;
  if (repeats > 0) options.max_repeats = repeats;
  std::ostringstream csv;
  csv << "level,elements,rt_dofs,ned_dofs,K_RT,M_RT,K_Ned,M_Ned,total,ratio\n";
  bool oom = false;
  std::fprintf(stderr, "%5s %10s %10s %10s %9s %9s %9s %9s %9s %6s\n", "level", "elements", "rt_dofs", "ned_dofs",
               "K_RT", "M_RT", "K_Ned", "M_Ned", "total", "ratio");
  run_benchmark(domain, from, to, options, [&](const BenchRow& r) {
    if (r.out_of_memory) {
      oom = true;
      std::fprintf(stderr, "%5d out of memory, remaining levels skipped\n", r.level);
      csv << r.level << ",,,,,,,,,out_of_memory\n";
      return;
    }
    std::fprintf(stderr, "%5d %10zu %10zu %10zu %9.4f %9.4f %9.4f %9.4f %9.4f %6.2f\n", r.level, r.elements,
                 r.rt_dofs, r.ned_dofs, r.seconds[0], r.seconds[1], r.seconds[2], r.seconds[3], r.total, r.ratio);
    char line[256];
    std::snprintf(line, sizeof line, "%d,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,", r.level, r.elements, r.rt_dofs,
                  r.ned_dofs, r.seconds[0], r.seconds[1], r.seconds[2], r.seconds[3], r.total);
    csv << line;
    if (!std::isnan(r.ratio)) {
      std::snprintf(line, sizeof line, "%.3f", r.ratio);
      csv << line;
    }
    csv << "\n";
  });
  with_output(out_path, [&](std::ostream& out) { out << csv.str(); });
  return oom ? 3 : 0;
}

int cmd_majorant(int dim, int level, const std::string& mesh_file, double cf, double stop_rel,
                 const std::string& out_path, const std::string& field_out) {
  const Domain domain = dim == 2 ? Domain::unit_square : dim == 3 ? Domain::unit_cube : throw Error("--dim must be 2 or 3");
  auto mesh = load_or_generate(mesh_file, std::string(domain_name(domain)), level);
  if (mesh.dim != dim) throw Error("mesh dimension does not match --dim");
  const auto disc = Discretization::build(std::move(mesh));
  const double C = cf > 0.0 ? cf : friedrichs_constant(domain);
  const auto problem = poisson_bubble(dim);
  const auto t0 = clock_type::now();
  const auto poisson = solve_poisson_p1(disc, problem.f);
  MajorantOptions options;
  options.stop_rel = stop_rel;
  const auto result = minimize_majorant(poisson.v, problem.f, C, problem.grad_u, options);
  const double t = seconds_since(t0);

  with_output(out_path, [&](std::ostream& out) {
    out << "iteration,beta,sqrt_M,M,d1,d2,I_eff\n";
    char line[256];
    for (const auto& s : result.history) {
      std::snprintf(line, sizeof line, "%d,%.6g,%.8e,%.8e,%.8e,%.8e,%.6f\n", s.iteration, s.beta,
                    std::sqrt(s.M_value), s.M_value, s.d1, s.d2, s.I_eff);
      out << line;
    }
  });
  if (!field_out.empty())
    with_output(field_out, [&](std::ostream& out) { write_vector(out, result.history.back().y.coeffs); });
  std::fprintf(stderr, "#T = %zu, C_F = %.6f, ||grad(u - v)|| = %.6e, %zu iterations, %.2f s%s\n",
               disc.mesh.num_elems(), C, std::sqrt(result.error_sq), result.history.size(), t,
               result.converged ? "" : " (not converged)");
  return result.converged ? 0 : 4;
}

int cmd_eddy(const std::string& levels, const std::string& out_path, const std::string& field_out) {
  const auto [from, to] = parse_levels(levels);
  const auto problem = eddy_example();
  std::ostringstream csv;
  csv << "elements,edges,energy_error,l2_error,curl_error,cg_iterations,ratio\n";
  double prev = 0.0;
  for (int level = from; level <= to; ++level) {
    const auto disc = Discretization::build(generate_structured_mesh(Domain::unit_square, level));
    const auto t0 = clock_type::now();
    const auto r = solve_eddy_current(disc, problem);
    const double t = seconds_since(t0);
    char line[256];
    std::snprintf(line, sizeof line, "%zu,%zu,%.6e,%.6e,%.6e,%d,", disc.mesh.num_elems(), disc.topo.num_edges(),
                  r.energy_error, r.l2_error, r.curl_error, r.solve.iterations);
    csv << line;
    if (prev > 0.0) {
      std::snprintf(line, sizeof line, "%.4f", prev / r.energy_error);
      csv << line;
    }
    csv << "\n";
    std::fprintf(stderr, "level %d: #T = %zu, #E = %zu, error %.6e (%d CG iterations, %.2f s)\n", level,
                 disc.mesh.num_elems(), disc.topo.num_edges(), r.energy_error, r.solve.iterations, t);
    if (!field_out.empty() && level == to)
      with_output(field_out, [&](std::ostream& out) { write_vector(out, r.v.coeffs); });
    prev = r.energy_error;
  }
  with_output(out_path, [&](std::ostream& out) { out << csv.str(); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge element assembly: meshes, matrices, benchmark, majorant and eddy-current studies"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: EDGEFEM_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string domain = "unit_square", out, mesh_file, element = "rt0", matrix = "stiffness", levels, field_out;
  int level = 0, dim = 2, repeats = 0;
  double cf = 0.0, stop_rel = 1e-4;

  auto* mesh_cmd = app.add_subcommand("mesh", "Generate a structured mesh (1-based text format)");
  mesh_cmd->add_option("--domain", domain, "unit_square | l_shape | unit_cube")->required();
  mesh_cmd->add_option("--level", level, "Refinement level")->required();
  mesh_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* asm_cmd = app.add_subcommand("assemble", "Assemble one matrix and write it in Matrix Market format");
  asm_cmd->add_option("--domain", domain, "unit_square | l_shape | unit_cube");
  asm_cmd->add_option("--level", level, "Refinement level");
  asm_cmd->add_option("--mesh", mesh_file, "Read the mesh from a file instead");
  asm_cmd->add_option("--element", element, "rt0 | ned0 | p1")->required();
  asm_cmd->add_option("--matrix", matrix, "mass | stiffness")->required();
  asm_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* bench_cmd = app.add_subcommand("bench", "Time the four edge-element matrices over a range of levels");
  bench_cmd->add_option("--domain", domain, "unit_square | l_shape | unit_cube")->required();
  bench_cmd->add_option("--levels", levels, "Levels, e.g. 5..9")->required();
  bench_cmd->add_option("--out", out, "CSV file (default stdout)");
  bench_cmd->add_option("--repeats", repeats, "Maximum timed runs per matrix (best is kept)");

  auto* maj_cmd = app.add_subcommand("majorant", "Majorant minimization for the Poisson bubble problem");
  maj_cmd->add_option("--dim", dim, "2 (unit square) or 3 (unit cube)");
  maj_cmd->add_option("--level", level, "Mesh level")->required();
  maj_cmd->add_option("--mesh", mesh_file, "Read the mesh from a file instead");
  maj_cmd->add_option("--cf", cf, "Friedrichs constant (default 1/(pi sqrt(d)))");
  maj_cmd->add_option("--stop-rel", stop_rel, "Relative change of the majorant that stops the iteration");
  maj_cmd->add_option("--out", out, "CSV file (default stdout)");
  maj_cmd->add_option("--field-out", field_out, "Write the final flux coefficients here");

  auto* eddy_cmd = app.add_subcommand("eddy", "2D eddy-current problem with its exact energy error");
  eddy_cmd->add_option("--level,--levels", levels, "Unit square level(s), e.g. 7 or 7..8")->required();
  eddy_cmd->add_option("--out", out, "CSV file (default stdout)");
  eddy_cmd->add_option("--field-out", field_out, "Write the finest solution's coefficients here");

  CLI11_PARSE(app, argc, argv);
  if (workers > 0) parallel::set_workers(workers);

  try {
    if (app.got_subcommand(mesh_cmd)) return cmd_mesh(domain, level, out);
    if (app.got_subcommand(asm_cmd)) {
      if (mesh_file.empty() && asm_cmd->count("--domain") == 0) throw Error("assemble: give --domain/--level or --mesh");
      return cmd_assemble(domain, level, mesh_file, element, matrix, out);
    }
    if (app.got_subcommand(bench_cmd)) return cmd_bench(domain, levels, out, repeats);
    if (app.got_subcommand(maj_cmd)) return cmd_majorant(dim, level, mesh_file, cf, stop_rel, out, field_out);
    if (app.got_subcommand(eddy_cmd)) return cmd_eddy(levels, out, field_out);
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
