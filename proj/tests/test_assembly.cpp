#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace edgefem;

namespace {

Mesh reference_simplex(int dim) {
  Mesh m;
  m.dim = dim;
  m.nodes2coord = Table<double>(dim + 1, dim, 0.0);
  for (int v = 1; v <= dim; ++v) m.nodes2coord(v, v - 1) = 1.0;
  m.elems2nodes = Table<Index>(1, dim + 1);
  for (int v = 0; v <= dim; ++v) m.elems2nodes(0, v) = v;
  return m;
}

/// Unit square with interior nodes moved so the elements differ in shape.
Mesh jittered_square(int level) {
  Mesh m = generate_structured_mesh(Domain::unit_square, level);
  for (std::size_t v = 0; v < m.num_nodes(); ++v) {
    const double x = m.nodes2coord(v, 0), y = m.nodes2coord(v, 1);
    if (x > 0 && x < 1 && y > 0 && y < 1) {
      m.nodes2coord(v, 0) += 0.06 * std::sin(7.0 * v);
      m.nodes2coord(v, 1) += 0.05 * std::cos(5.0 * v);
    }
  }
  return m;
}

/// Layout of `kind` with every orientation sign forced to +1.
struct PlusSigns {
  SignTable signs;
  DofLayout layout;
  PlusSigns(ElementKind kind, const Discretization& disc) {
    layout = dof_layout(kind, disc);
    if (layout.signs) {
      signs = SignTable(layout.signs->rows(), layout.signs->cols(), 1);
      layout.signs = &signs;
    }
  }
};

const MatrixKind both_matrices[] = {MatrixKind::mass, MatrixKind::stiffness};

}  // namespace

class OracleEquivalence : public ::testing::TestWithParam<ElementKind> {};

TEST_P(OracleEquivalence, MatchesNaiveAssembly) {
  const auto kind = GetParam();
  const int d = element_info(kind).dim;
  std::vector<Mesh> meshes;
  if (d == 2) {
    meshes.push_back(oracle::small_mesh(2));
    meshes.push_back(jittered_square(2));
  } else {
    meshes.push_back(oracle::small_mesh(3));
  }
  for (const auto& m : meshes) {
    ASSERT_LE(m.num_elems(), 100u);
    const auto disc = Discretization::build(m);
    for (auto mk : both_matrices) {
      const auto fast = oracle::dense(assemble_matrix(mk, kind, disc));
      const auto slow = oracle::naive_assemble(mk, kind, disc);
      EXPECT_LE(oracle::max_abs_diff(fast, slow), 1e-14 * oracle::max_abs(slow))
          << element_info(kind).name << (mk == MatrixKind::mass ? " mass" : " stiffness");
    }
  }
}

TEST_P(OracleEquivalence, SymmetryAndSpectrum) {
  const auto kind = GetParam();
  const auto info = element_info(kind);
  const auto disc = Discretization::build(info.dim == 2 ? jittered_square(1) : oracle::small_mesh(3));
  const auto M = assemble_matrix(MatrixKind::mass, kind, disc);
  const auto K = assemble_matrix(MatrixKind::stiffness, kind, disc);
  EXPECT_LT(symmetry_defect(M), 1e-12 * M.max_abs());
  EXPECT_LT(symmetry_defect(K), 1e-12 * K.max_abs());
  EXPECT_GT(oracle::min_eigenvalue(oracle::dense(M)), 0.0);
  EXPECT_GT(oracle::min_eigenvalue(oracle::dense(K)), -1e-10 * K.max_abs());
  if (info.family == Family::rt) {
    // div maps RT0 onto piecewise constants
    EXPECT_EQ(oracle::rank(oracle::dense(K)), disc.mesh.num_elems());
  }
}

TEST_P(OracleEquivalence, LoadMatchesNaiveIntegration) {
  const auto kind = GetParam();
  const auto info = element_info(kind);
  const auto disc = Discretization::build(info.dim == 2 ? jittered_square(1) : oracle::small_mesh(3));
  const auto layout = dof_layout(kind, disc);
  for (auto pairing : {Pairing::value, Pairing::derivative}) {
    const bool derivative = pairing == Pairing::derivative;
    const int nc = oracle::mapped_size(kind, derivative);
    auto g = [](const double* x, int c) { return std::sin(1.0 + c + 2 * x[0]) * (1.0 + x[1] * x[1]) + x[0] * c; };
    const Function f{nc, [&](const Table<double>& x, std::span<double> out) {
                       for (std::size_t i = 0; i < x.rows(); ++i)
                         for (int c = 0; c < nc; ++c) out[i * nc + c] = g(x.row(i).data(), c);
                     }};
    const auto fast = assemble_load(pairing, kind, f, disc, 6);
    std::vector<double> slow(layout.ndofs, 0.0);
    const auto rule = get_rule(6, info.dim);
    for (std::size_t e = 0; e < disc.mesh.num_elems(); ++e) {
      const auto geo = oracle::geometry(disc.mesh, e);
      for (int k = 0; k < info.nbasis; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nip(); ++i) {
          Vec3 xh{0, 0, 0};
          double x[3] = {0, 0, 0};
          for (int c = 0; c < info.dim; ++c) xh[c] = rule.points(i, c);
          for (int r = 0; r < info.dim; ++r) {
            x[r] = geo.p0[r];
            for (int c = 0; c < info.dim; ++c) x[r] += geo.B[r][c] * xh[c];
          }
          const auto phi = oracle::mapped_basis(kind, geo, k, xh, derivative);
          for (int c = 0; c < nc; ++c) s += rule.weights[i] * g(x, c) * phi[c];
        }
        const double sign = layout.signs ? (*layout.signs)(e, k) : 1.0;
        slow[(*layout.elems2dofs)(e, k)] += sign * std::abs(geo.det) * s;
      }
    }
    for (std::size_t i = 0; i < slow.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-13) << i;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, OracleEquivalence, ::testing::ValuesIn(all_element_kinds),
                         [](const auto& info) { return std::string(element_info(info.param).name); });

TEST(AssemblyExamples, ReferenceElementMatrices) {
  const auto tri = Discretization::build(reference_simplex(2));
  const auto tet = Discretization::build(reference_simplex(3));

  PlusSigns rt2(ElementKind::rt0_2d, tri);
  const auto k_rt2 = assemble_matrix(MatrixKind::stiffness, ElementKind::rt0_2d, rt2.layout, tri.maps);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(k_rt2.at(i, j), 2.0, 1e-15);

  PlusSigns rt3(ElementKind::rt0_3d, tet);
  const auto k_rt3 = assemble_matrix(MatrixKind::stiffness, ElementKind::rt0_3d, rt3.layout, tet.maps);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(k_rt3.at(i, j), 1.5, 1e-15);

  // entry (1,1) refers to local basis 1; the global dof is elems2dofs(0, 0)
  PlusSigns ned3(ElementKind::ned0_3d, tet);
  const auto k_ned3 = assemble_matrix(MatrixKind::stiffness, ElementKind::ned0_3d, ned3.layout, tet.maps);
  const auto g0 = tet.topo.elems2edges(0, 0);
  EXPECT_NEAR(k_ned3.at(g0, g0), 4.0 / 3.0, 1e-15);

  const auto m_rt2 = assemble_matrix(MatrixKind::mass, ElementKind::rt0_2d, rt2.layout, tri.maps);
  const auto e0 = tri.topo.elems2edges(0, 0);
  EXPECT_NEAR(m_rt2.at(e0, e0), 1.0 / 6.0, 1e-15);
}

TEST(AssemblyExamples, SignFlipConjugates) {
  const auto disc = Discretization::build(jittered_square(1));
  for (auto kind : {ElementKind::rt0_2d, ElementKind::ned0_2d}) {
    auto layout = dof_layout(kind, disc);
    SignTable flipped = *layout.signs;
    const Index flip = 3;
    for (std::size_t e = 0; e < flipped.rows(); ++e)
      for (std::size_t k = 0; k < flipped.cols(); ++k)
        if ((*layout.elems2dofs)(e, k) == flip) flipped(e, k) = static_cast<std::int8_t>(-flipped(e, k));
    for (auto mk : both_matrices) {
      const auto a = assemble_matrix(mk, kind, layout, disc.maps);
      DofLayout l2 = layout;
      l2.signs = &flipped;
      const auto b = assemble_matrix(mk, kind, l2, disc.maps);
      for (std::size_t i = 0; i < a.n_rows; ++i)
        for (std::size_t j = 0; j < a.n_cols; ++j) {
          const double di = i == flip ? -1.0 : 1.0, dj = j == flip ? -1.0 : 1.0;
          EXPECT_EQ(b.at(i, j), di * dj * a.at(i, j));
        }
    }
  }
}

TEST(AssemblyExamples, Rt2dScaling) {
  // flux-normalized RT0 in 2D: mass is invariant under x -> s x, stiffness scales by 1/s²
  const double s = 3.5;
  Mesh m = jittered_square(1);
  const auto disc = Discretization::build(m);
  for (double& x : m.nodes2coord.data()) x *= s;
  const auto big = Discretization::build(m);
  const auto ma = assemble_matrix(MatrixKind::mass, ElementKind::rt0_2d, disc);
  const auto mb = assemble_matrix(MatrixKind::mass, ElementKind::rt0_2d, big);
  const auto ka = assemble_matrix(MatrixKind::stiffness, ElementKind::rt0_2d, disc);
  const auto kb = assemble_matrix(MatrixKind::stiffness, ElementKind::rt0_2d, big);
  for (std::size_t p = 0; p < ma.values.size(); ++p) EXPECT_NEAR(ma.values[p], mb.values[p], 1e-13);
  for (std::size_t p = 0; p < ka.values.size(); ++p) EXPECT_NEAR(ka.values[p], s * s * kb.values[p], 1e-12);
}

TEST(AssemblyExamples, ReversedOrientationKeepsPhysics) {
  // reversing every element's node order flips det B but not the global orientation
  Mesh m = jittered_square(1);
  const auto disc = Discretization::build(m);
  for (std::size_t e = 0; e < m.num_elems(); ++e) std::swap(m.elems2nodes(e, 1), m.elems2nodes(e, 2));
  const auto rev = Discretization::build(m);
  for (auto kind : {ElementKind::rt0_2d, ElementKind::ned0_2d})
    for (auto mk : both_matrices) {
      const auto a = assemble_matrix(mk, kind, disc), b = assemble_matrix(mk, kind, rev);
      for (std::size_t i = 0; i < a.n_rows; ++i)
        for (std::size_t j = 0; j < a.n_cols; ++j) EXPECT_NEAR(a.at(i, j), b.at(i, j), 1e-13);
    }
}

TEST(AssemblyExamples, P1MassRowSums) {
  const auto disc = Discretization::build(generate_structured_mesh(Domain::unit_square, 0));
  const auto m = assemble_matrix(MatrixKind::mass, ElementKind::p1_2d, disc);
  EXPECT_EQ(m.n_rows, 4u);
  double s = 0.0;
  for (double v : m.values) s += v;
  EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(AssemblyExamples, WorkerCountDoesNotChangeBits) {
  const auto disc = Discretization::build(generate_structured_mesh(Domain::unit_cube, 1));
  parallel::set_workers(1);
  const auto a = assemble_matrix(MatrixKind::mass, ElementKind::ned0_3d, disc);
  parallel::set_workers(3);
  const auto b = assemble_matrix(MatrixKind::mass, ElementKind::ned0_3d, disc);
  parallel::set_workers(0);
  EXPECT_EQ(a.cols, b.cols);
  EXPECT_EQ(a.values, b.values);
}

TEST(AssemblyExamples, Errors) {
  const auto disc = Discretization::build(reference_simplex(2));
  auto layout = dof_layout(ElementKind::ned0_2d, disc);
  layout.signs = nullptr;
  EXPECT_THROW(assemble_matrix(MatrixKind::mass, ElementKind::ned0_2d, layout, disc.maps), Error);
  EXPECT_THROW(assemble_matrix(MatrixKind::mass, ElementKind::ned0_3d, disc), Error);
  EXPECT_THROW(assemble_load(Pairing::value, ElementKind::rt0_2d, scalar_function([](const double*) { return 1.0; }),
                             disc),
               Error);
}

TEST(LoadExamples, ReferenceTriangle) {
  const auto tri = Discretization::build(reference_simplex(2));
  const auto one = scalar_function([](const double*) { return 1.0; });
  PlusSigns rt(ElementKind::rt0_2d, tri);
  const auto b = assemble_load(Pairing::derivative, ElementKind::rt0_2d, one, rt.layout, tri.maps);
  for (double v : b) EXPECT_NEAR(v, 1.0, 1e-15);
  const auto p = assemble_load(Pairing::value, ElementKind::p1_2d, one, tri);
  for (double v : p) EXPECT_NEAR(v, 1.0 / 6.0, 1e-15);
  const auto zero = vector_function<2>([](const double*) { return std::array<double, 2>{0, 0}; });
  for (double v : assemble_load(Pairing::value, ElementKind::ned0_2d, zero, tri)) EXPECT_EQ(v, 0.0);
}

TEST(Norms, DomainMeasures) {
  const auto one = scalar_function([](const double*) { return 1.0; });
  const auto sq = Discretization::build(generate_structured_mesh(Domain::unit_square, 3));
  EXPECT_NEAR(l2_norm_sq(sq.maps, one).total, 1.0, 1e-13);
  const auto l = Discretization::build(generate_structured_mesh(Domain::l_shape_2d, 2));
  EXPECT_NEAR(l2_norm_sq(l.maps, one).total, 0.75, 1e-13);
  const auto x1 = scalar_function([](const double* x) { return x[0]; });
  const auto n = l2_norm_sq(sq.maps, x1);
  EXPECT_NEAR(n.total, 1.0 / 3.0, 1e-13);
  double s = 0.0;
  for (double v : n.per_element) s += v;
  EXPECT_NEAR(s, n.total, 1e-15);
  EXPECT_EQ(n.per_element.size(), sq.mesh.num_elems());
}

TEST(DiscreteFields, UnitDofReproducesBasis) {
  const auto disc = Discretization::build(jittered_square(1));
  for (auto kind : {ElementKind::rt0_2d, ElementKind::ned0_2d}) {
    const auto layout = dof_layout(kind, disc);
    const Index dof = 5;
    std::vector<double> c(layout.ndofs, 0.0);
    c[dof] = 1.0;
    const auto field = make_field(kind, disc, c);
    const Table<double> pts = get_rule(2, 2).points;
    const auto batch = eval_field(field, pts);
    for (std::size_t e = 0; e < disc.mesh.num_elems(); ++e) {
      const auto g = oracle::geometry(disc.mesh, e);
      for (std::size_t p = 0; p < pts.rows(); ++p) {
        Vec3 expect{0, 0, 0};
        for (int k = 0; k < 3; ++k)
          if ((*layout.elems2dofs)(e, k) == dof) {
            const auto v = oracle::mapped_basis(kind, g, k, {pts(p, 0), pts(p, 1), 0}, false);
            for (int q = 0; q < 2; ++q) expect[q] = (*layout.signs)(e, k) * v[q];
          }
        for (int q = 0; q < 2; ++q) EXPECT_NEAR(batch(e, p, q), expect[q], 1e-13);
      }
    }
  }
}

TEST(DiscreteFields, InterpolationReproducesConstants) {
  const auto disc2 = Discretization::build(jittered_square(1));
  const auto c2 = vector_function<2>([](const double*) { return std::array<double, 2>{1.0, 0.0}; });
  for (auto kind : {ElementKind::rt0_2d, ElementKind::ned0_2d}) {
    const auto f = interpolate(kind, disc2, c2);
    const auto v = eval_field(f, get_rule(4, 2).points);
    for (std::size_t e = 0; e < v.nelems; ++e)
      for (std::size_t p = 0; p < v.npoints; ++p) {
        EXPECT_NEAR(v(e, p, 0), 1.0, 1e-13);
        EXPECT_NEAR(v(e, p, 1), 0.0, 1e-13);
      }
  }
  const auto disc3 = Discretization::build(oracle::small_mesh(3));
  const auto c3 = vector_function<3>([](const double*) { return std::array<double, 3>{0.3, -1.0, 2.0}; });
  for (auto kind : {ElementKind::rt0_3d, ElementKind::ned0_3d}) {
    const auto f = interpolate(kind, disc3, c3);
    const auto v = eval_field(f, get_rule(2, 3).points);
    for (std::size_t e = 0; e < v.nelems; ++e)
      for (std::size_t p = 0; p < v.npoints; ++p) {
        EXPECT_NEAR(v(e, p, 0), 0.3, 1e-13);
        EXPECT_NEAR(v(e, p, 1), -1.0, 1e-13);
        EXPECT_NEAR(v(e, p, 2), 2.0, 1e-13);
      }
  }
}

TEST(DiscreteFields, InterpolatedLinearFieldsAreExact) {
  // RT0 contains a + b x, Nédélec contains a + b x^perp (2D) / a + b x x (3D)
  const auto disc2 = Discretization::build(jittered_square(1));
  const auto rt = interpolate(ElementKind::rt0_2d, disc2, vector_function<2>([](const double* x) {
                                return std::array<double, 2>{0.5 + 2 * x[0], -1.0 + 2 * x[1]};
                              }));
  const auto div = eval_field(rt, get_rule(1, 2).points, true);
  for (double v : div.data) EXPECT_NEAR(v, 4.0, 1e-12);
  const auto ned = interpolate(ElementKind::ned0_2d, disc2, vector_function<2>([](const double* x) {
                                 return std::array<double, 2>{1.0 - 3 * x[1], 2.0 + 3 * x[0]};
                               }));
  const auto curl = eval_field(ned, get_rule(1, 2).points, true);
  for (double v : curl.data) EXPECT_NEAR(v, 6.0, 1e-12);
}

TEST(DiscreteFields, GradientHasNoCurl) {
  const auto disc = Discretization::build(jittered_square(2));
  const auto grad = vector_function<2>([](const double* x) {
    // ∇(x1⁴ + x1 x2² + x2³), quintic at most so the edge integrals are exact
    return std::array<double, 2>{4.0 * x[0] * x[0] * x[0] + x[1] * x[1], 2.0 * x[0] * x[1] + 3.0 * x[1] * x[1]};
  });
  const auto f = interpolate(ElementKind::ned0_2d, disc, grad);
  const auto curl = eval_field(f, get_rule(1, 2).points, true);
  for (double v : curl.data) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(MatrixMarket, SymmetricRoundTrip) {
  const auto disc = Discretization::build(generate_structured_mesh(Domain::unit_square, 1));
  const auto a = assemble_matrix(MatrixKind::mass, ElementKind::ned0_2d, disc);
  std::stringstream s;
  write_matrix_market(s, a, true);
  std::string header;
  std::getline(s, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real symmetric");
  s.seekg(0);
  const auto b = read_matrix_market(s);
  ASSERT_EQ(b.n_rows, a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t j = 0; j < a.n_cols; ++j) EXPECT_NEAR(b.at(i, j), a.at(i, j), 1e-15);
}
