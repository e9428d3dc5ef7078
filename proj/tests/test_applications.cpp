#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace edgefem;

namespace {

double eval_scalar(const Function& f, double x1, double x2) {
  Table<double> x(1, 2);
  x(0, 0) = x1;
  x(0, 1) = x2;
  double v = 0.0;
  f.eval(x, std::span<double>(&v, 1));
  return v;
}

std::array<double, 2> eval_vector(const Function& f, double x1, double x2) {
  Table<double> x(1, 2);
  x(0, 0) = x1;
  x(0, 1) = x2;
  std::array<double, 2> v{};
  f.eval(x, v);
  return v;
}

Discretization square(int level) { return Discretization::build(generate_structured_mesh(Domain::unit_square, level)); }

}  // namespace

TEST(Poisson, ZeroLoadGivesZero) {
  const auto disc = square(3);
  const auto s = solve_poisson_p1(disc, scalar_function([](const double*) { return 0.0; }));
  for (double c : s.v.coeffs) EXPECT_EQ(c, 0.0);
}

TEST(Poisson, EnergyErrorHalvesWithMeshSize) {
  const auto p = poisson_bubble(2);
  double prev = 0.0;
  for (int level = 2; level <= 5; ++level) {
    const auto disc = square(level);
    const double e = std::sqrt(energy_error_sq(solve_poisson_p1(disc, p.f).v, p.grad_u));
    if (level > 2) {
      EXPECT_NEAR(prev / e, 2.0, 0.1) << "level " << level;
    }
    prev = e;
  }
}

TEST(Poisson, BubbleDataConsistent) {
  // f = -Δu by central differences
  const auto p = poisson_bubble(2);
  const double h = 1e-4;
  for (const auto& [a, b] : {std::pair{0.3, 0.6}, std::pair{0.75, 0.2}}) {
    const double lap = (eval_scalar(p.u, a + h, b) + eval_scalar(p.u, a - h, b) + eval_scalar(p.u, a, b + h) +
                        eval_scalar(p.u, a, b - h) - 4.0 * eval_scalar(p.u, a, b)) /
                       (h * h);
    EXPECT_NEAR(eval_scalar(p.f, a, b), -lap, 1e-6);
  }
}

TEST(Friedrichs, KnownDomains) {
  EXPECT_DOUBLE_EQ(friedrichs_constant(Domain::unit_square), 1.0 / (std::numbers::pi * std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(friedrichs_constant(Domain::unit_cube), 1.0 / (std::numbers::pi * std::sqrt(3.0)));
  EXPECT_THROW(friedrichs_constant(Domain::l_shape_2d), Error);
}

class Majorant2D : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    disc_ = new Discretization(square(3));
    problem_ = new PoissonProblem(poisson_bubble(2));
    v_ = new DiscreteField(solve_poisson_p1(*disc_, problem_->f).v);
  }
  static void TearDownTestSuite() {
    delete v_;
    delete problem_;
    delete disc_;
  }
  static Discretization* disc_;
  static PoissonProblem* problem_;
  static DiscreteField* v_;
};
Discretization* Majorant2D::disc_ = nullptr;
PoissonProblem* Majorant2D::problem_ = nullptr;
DiscreteField* Majorant2D::v_ = nullptr;

TEST_F(Majorant2D, BoundAndMonotone) {
  const double C = friedrichs_constant(Domain::unit_square);
  const auto r = minimize_majorant(*v_, problem_->f, C, problem_->grad_u);
  ASSERT_TRUE(r.converged);
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const auto& s = r.history[k];
    EXPECT_GE(s.M_value, r.error_sq);
    EXPECT_GE(s.I_eff, 1.0);
    EXPECT_DOUBLE_EQ(s.M_value, majorant_value(s.beta, C, s.d1, s.d2));
    if (k > 0) {
      EXPECT_LE(s.M_value, r.history[k - 1].M_value * (1.0 + 1e-12));
    }
  }
  EXPECT_EQ(r.history.front().beta, 1.0);
}

TEST_F(Majorant2D, BetaNearFixedPointAtConvergence) {
  const double C = friedrichs_constant(Domain::unit_square);
  const auto r = minimize_majorant(*v_, problem_->f, C, problem_->grad_u);
  const auto& s = r.history.back();
  EXPECT_NEAR(s.beta, s.d1 / (C * s.d2), 0.05 * s.beta);
  // β* minimizes the majorant for fixed d1, d2
  const double best = majorant_value(s.d1 / (C * s.d2), C, s.d1, s.d2);
  EXPECT_NEAR(best, std::pow(s.d1 + C * s.d2, 2), 1e-12 * best);
}

TEST_F(Majorant2D, LargerConstantStillBounds) {
  const double C = 2.0 * friedrichs_constant(Domain::unit_square);
  const auto r = minimize_majorant(*v_, problem_->f, C, problem_->grad_u);
  for (const auto& s : r.history) EXPECT_GE(s.M_value, r.error_sq);
}

TEST_F(Majorant2D, RejectsBadInput) {
  EXPECT_THROW(minimize_majorant(*v_, problem_->f, 0.0), Error);
  MajorantOptions o;
  o.beta0 = -1.0;
  EXPECT_THROW(minimize_majorant(*v_, problem_->f, 1.0, std::nullopt, o), Error);
}

TEST(Majorant, ZeroDataGivesExactFlux) {
  const auto disc = square(2);
  const auto zero = scalar_function([](const double*) { return 0.0; });
  const auto v = solve_poisson_p1(disc, zero).v;
  const auto r = minimize_majorant(v, zero, friedrichs_constant(Domain::unit_square));
  EXPECT_TRUE(r.exact_flux);
  EXPECT_TRUE(std::isinf(r.history.back().beta));
  EXPECT_EQ(r.history.back().M_value, 0.0);
}

TEST(Majorant, TwoElementMesh) {
  // no interior node: v = 0 and the error is the full energy of u
  const auto disc = square(0);
  ASSERT_EQ(disc.mesh.num_elems(), 2u);
  const auto p = poisson_bubble(2);
  const auto v = solve_poisson_p1(disc, p.f).v;
  const auto r = minimize_majorant(v, p.f, friedrichs_constant(Domain::unit_square), p.grad_u);
  EXPECT_NEAR(r.error_sq, 1.0 / 45.0, 1e-14);
  for (const auto& s : r.history) EXPECT_GE(s.M_value, r.error_sq);
}

TEST(Majorant, CubeBound) {
  const auto disc = Discretization::build(generate_structured_mesh(Domain::unit_cube, 1));
  const auto p = poisson_bubble(3);
  const auto v = solve_poisson_p1(disc, p.f).v;
  const auto r = minimize_majorant(v, p.f, friedrichs_constant(Domain::unit_cube), p.grad_u);
  ASSERT_TRUE(r.converged);
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    EXPECT_GE(r.history[k].M_value, r.error_sq);
    if (k > 0) {
      EXPECT_LE(r.history[k].M_value, r.history[k - 1].M_value * (1.0 + 1e-12));
    }
  }
}

TEST(Eddy, LoadMatchesFiniteDifferences) {
  // F = curl curl E / μ + κ E, with curl E and the outer curl by central differences
  const double mu = 1.7, kappa = 0.4, h = 1e-5;
  const auto p = eddy_example(mu, kappa);
  auto curl = [&](double a, double b) {
    const auto ea = eval_vector(p.E, a + h, b), eb = eval_vector(p.E, a - h, b);
    const auto ec = eval_vector(p.E, a, b + h), ed = eval_vector(p.E, a, b - h);
    return (ea[1] - eb[1]) / (2 * h) - (ec[0] - ed[0]) / (2 * h);
  };
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  int checked = 0;
  while (checked < 20) {
    const double a = u(rng), b = u(rng);
    if (a - b < 0.02) continue;
    ++checked;
    EXPECT_NEAR(eval_scalar(p.curlE, a, b), curl(a, b), 1e-7);
    const double H = 1e-4;
    const double c1 = (eval_scalar(p.curlE, a + H, b) - eval_scalar(p.curlE, a - H, b)) / (2 * H);
    const double c2 = (eval_scalar(p.curlE, a, b + H) - eval_scalar(p.curlE, a, b - H)) / (2 * H);
    const auto E = eval_vector(p.E, a, b);
    const auto F = eval_vector(p.F, a, b);
    EXPECT_NEAR(F[0], c2 / mu + kappa * E[0], 1e-5);
    EXPECT_NEAR(F[1], -c1 / mu + kappa * E[1], 1e-5);
  }
  const auto zero = eval_vector(p.F, 0.3, 0.7);
  EXPECT_EQ(zero[0], 0.0);
  EXPECT_EQ(zero[1], 0.0);
}

TEST(Eddy, TangentialTraceContinuousOnDiagonal) {
  const auto p = eddy_example();
  for (double s : {0.1, 0.37, 0.5, 0.81}) {
    const auto E = eval_vector(p.E, s + 1e-13, s);
    EXPECT_NEAR(E[0] + E[1], 0.0, 1e-10) << s;
    EXPECT_NEAR(eval_scalar(p.curlE, s + 1e-13, s), 0.0, 1e-10);
  }
}

TEST(Eddy, ConstantSolutionReproduced) {
  const auto disc = square(3);
  const auto r = solve_eddy_current(disc, eddy_constant(0.7, -1.3, 2.0, 3.0), {1e-14, -1});
  EXPECT_LT(r.energy_error, 1e-11);
}

TEST(Eddy, ErrorHalvesWithMeshSize) {
  const auto p = eddy_example();
  const double e4 = solve_eddy_current(square(4), p).energy_error;
  const double e5 = solve_eddy_current(square(5), p).energy_error;
  EXPECT_NEAR(e4 / e5, 2.0, 0.1);
}

TEST(Eddy, RejectsUnsuitableMeshes) {
  const auto p = eddy_example();
  Mesh m;
  m.dim = 2;
  m.nodes2coord = Table<double>(4, 2);
  const double xy[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 2; ++c) m.nodes2coord(i, c) = xy[i][c];
  m.elems2nodes = Table<Index>(2, 3);
  const Index tris[2][3] = {{0, 1, 3}, {1, 2, 3}};  // split along the anti-diagonal
  for (int e = 0; e < 2; ++e)
    for (int k = 0; k < 3; ++k) m.elems2nodes(e, k) = tris[e][k];
  EXPECT_FALSE(is_diagonal_conforming(m));
  const auto disc = Discretization::build(m);
  EXPECT_THROW(solve_eddy_current(disc, p), Error);
  EXPECT_NO_THROW(solve_eddy_current(disc, eddy_constant(1.0, 0.0)));
  EXPECT_TRUE(is_diagonal_conforming(square(2).mesh));
  const auto cube = Discretization::build(generate_structured_mesh(Domain::unit_cube, 1));
  EXPECT_THROW(solve_eddy_current(cube, p), Error);
  EXPECT_THROW(solve_eddy_current(square(1), eddy_example(0.0, 1.0)), Error);
}
