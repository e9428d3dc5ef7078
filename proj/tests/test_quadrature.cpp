#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace edgefem;

namespace {

double integrate_monomial(const QuadratureRule& r, const std::vector<int>& alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nip(); ++i) {
    double v = r.weights[i];
    for (std::size_t c = 0; c < alpha.size(); ++c) v *= std::pow(r.points(i, c), alpha[c]);
    s += v;
  }
  return s;
}

}  // namespace

class RuleExactness : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(RuleExactness, MonomialsUpToOrder) {
  const auto [dim, order] = GetParam();
  const auto rule = get_rule(order, dim);
  EXPECT_GE(rule.order, order);
  double wsum = 0.0;
  for (double w : rule.weights) {
    EXPECT_GT(w, 0.0);
    wsum += w;
  }
  EXPECT_NEAR(wsum, dim == 2 ? 0.5 : 1.0 / 6.0, 1e-14);
  for (std::size_t i = 0; i < rule.nip(); ++i) {
    double s = 0.0;
    for (int c = 0; c < dim; ++c) {
      EXPECT_GE(rule.points(i, c), -1e-14);
      s += rule.points(i, c);
    }
    EXPECT_LE(s, 1.0 + 1e-14);
  }
  for (int a = 0; a <= rule.order; ++a)
    for (int b = 0; a + b <= rule.order; ++b) {
      if (dim == 2) {
        const double exact = oracle::simplex_monomial({a, b});
        EXPECT_NEAR(integrate_monomial(rule, {a, b}), exact, 1e-13 * exact) << a << " " << b;
      } else {
        for (int c = 0; a + b + c <= rule.order; ++c) {
          const double exact = oracle::simplex_monomial({a, b, c});
          EXPECT_NEAR(integrate_monomial(rule, {a, b, c}), exact, 1e-13 * exact) << a << " " << b << " " << c;
        }
      }
    }
}

INSTANTIATE_TEST_SUITE_P(AllRules, RuleExactness,
                         ::testing::Values(std::pair{2, 1}, std::pair{2, 2}, std::pair{2, 3}, std::pair{2, 4},
                                           std::pair{2, 5}, std::pair{2, 6}, std::pair{3, 1}, std::pair{3, 2},
                                           std::pair{3, 3}, std::pair{3, 4}, std::pair{3, 5}, std::pair{3, 6}));

TEST(Quadrature, Centroids) {
  const auto r2 = get_rule(1, 2);
  ASSERT_EQ(r2.nip(), 1u);
  EXPECT_DOUBLE_EQ(r2.points(0, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r2.points(0, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r2.weights[0], 0.5);
  const auto r3 = get_rule(1, 3);
  ASSERT_EQ(r3.nip(), 1u);
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(r3.points(0, c), 0.25);
  EXPECT_DOUBLE_EQ(r3.weights[0], 1.0 / 6.0);
}

TEST(Quadrature, SixthOrderExample) {
  EXPECT_NEAR(integrate_monomial(get_rule(6, 2), {3, 3}), 1.0 / 1120.0, 1e-13 / 1120.0);
}

TEST(Quadrature, NextHigherOrder) {
  EXPECT_EQ(get_rule(5, 2).order, 6);
  EXPECT_GE(get_rule(3, 3).order, 3);
}

TEST(Quadrature, Errors) {
  EXPECT_THROW(get_rule(2, 1), Error);
  EXPECT_THROW(get_rule(2, 4), Error);
  EXPECT_THROW(get_rule(7, 2), Error);
  EXPECT_THROW(get_rule(0, 2), Error);
}

TEST(Quadrature, GaussInterval) {
  for (int n = 1; n <= 3; ++n) {
    const auto g = gauss_interval(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nip(); ++i) s += g.weights[i] * std::pow(g.points(i, 0), p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-15);
    }
  }
}
