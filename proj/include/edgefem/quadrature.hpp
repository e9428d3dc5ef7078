#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "common.hpp"

namespace edgefem {

/// Integration rule on the reference triangle (0,0),(1,0),(0,1) or the
/// reference tetrahedron spanned by the origin and the unit points.
/// Weights sum to the reference measure (1/2 or 1/6).
struct QuadratureRule {
  int dim = 2;
  int order = 1;
  Table<double> points;  // nip x d
  std::vector<double> weights;

  std::size_t nip() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const { return points.row(i); }
};

namespace detail {

struct RawPoint {
  std::array<double, 3> x;
  double w;
};

// Symmetric rules: Dunavant (triangle), Strang-Fix 6-point degree 3,
// Keast 4-point, Walkington 14-point degree 5 and Keast 24-point degree 6
// (tetrahedron). Orbit parameters polished to full double precision against
// the moment equations.
inline constexpr RawPoint tri_o3[] = {
  {{0.23193336855303057, 0.65902762237409222}, 0.083333333333333333},
  {{0.65902762237409222, 0.23193336855303057}, 0.083333333333333333},
  {{0.10903900907287721, 0.65902762237409222}, 0.083333333333333333},
  {{0.65902762237409222, 0.10903900907287721}, 0.083333333333333333},
  {{0.10903900907287721, 0.23193336855303057}, 0.083333333333333333},
  {{0.23193336855303057, 0.10903900907287721}, 0.083333333333333333},
};
inline constexpr RawPoint tri_o4[] = {
  {{0.44594849091596489, 0.44594849091596489}, 0.11169079483900573},
  {{0.10810301816807023, 0.44594849091596489}, 0.11169079483900573},
  {{0.44594849091596489, 0.10810301816807023}, 0.11169079483900573},
  {{0.091576213509770743, 0.81684757298045851}, 0.054975871827660934},
  {{0.81684757298045851, 0.091576213509770743}, 0.054975871827660934},
  {{0.091576213509770743, 0.091576213509770743}, 0.054975871827660934},
};
inline constexpr RawPoint tri_o6[] = {
  {{0.24928674517091042, 0.50142650965817916}, 0.058393137863189683},
  {{0.50142650965817916, 0.24928674517091042}, 0.058393137863189683},
  {{0.24928674517091042, 0.24928674517091042}, 0.058393137863189683},
  {{0.063089014491502228, 0.87382197101699554}, 0.025422453185103408},
  {{0.87382197101699554, 0.063089014491502228}, 0.025422453185103408},
  {{0.063089014491502228, 0.063089014491502228}, 0.025422453185103408},
  {{0.31035245103378441, 0.63650249912139865}, 0.041425537809186788},
  {{0.63650249912139865, 0.31035245103378441}, 0.041425537809186788},
  {{0.053145049844816947, 0.63650249912139865}, 0.041425537809186788},
  {{0.63650249912139865, 0.053145049844816947}, 0.041425537809186788},
  {{0.053145049844816947, 0.31035245103378441}, 0.041425537809186788},
  {{0.31035245103378441, 0.053145049844816947}, 0.041425537809186788},
};
inline constexpr RawPoint tet_o2[] = {
  {{0.13819660112501052, 0.13819660112501052, 0.58541019662496845}, 0.041666666666666667},
  {{0.13819660112501052, 0.58541019662496845, 0.13819660112501052}, 0.041666666666666667},
  {{0.58541019662496845, 0.13819660112501052, 0.13819660112501052}, 0.041666666666666667},
  {{0.13819660112501052, 0.13819660112501052, 0.13819660112501052}, 0.041666666666666667},
};
inline constexpr RawPoint tet_o5[] = {
  {{0.092735250310891226, 0.092735250310891226, 0.72179424906732632}, 0.012248840519393658},
  {{0.092735250310891226, 0.72179424906732632, 0.092735250310891226}, 0.012248840519393658},
  {{0.72179424906732632, 0.092735250310891226, 0.092735250310891226}, 0.012248840519393658},
  {{0.092735250310891226, 0.092735250310891226, 0.092735250310891226}, 0.012248840519393658},
  {{0.31088591926330061, 0.31088591926330061, 0.31088591926330061}, 0.018781320953002642},
  {{0.067342242210098171, 0.31088591926330061, 0.31088591926330061}, 0.018781320953002642},
  {{0.31088591926330061, 0.067342242210098171, 0.31088591926330061}, 0.018781320953002642},
  {{0.31088591926330061, 0.31088591926330061, 0.067342242210098171}, 0.018781320953002642},
  {{0.045503704125649649, 0.45449629587435035, 0.45449629587435035}, 0.0070910034628469111},
  {{0.45449629587435035, 0.045503704125649649, 0.45449629587435035}, 0.0070910034628469111},
  {{0.45449629587435035, 0.45449629587435035, 0.045503704125649649}, 0.0070910034628469111},
  {{0.045503704125649649, 0.045503704125649649, 0.45449629587435035}, 0.0070910034628469111},
  {{0.045503704125649649, 0.45449629587435035, 0.045503704125649649}, 0.0070910034628469111},
  {{0.45449629587435035, 0.045503704125649649, 0.045503704125649649}, 0.0070910034628469111},
};
inline constexpr RawPoint tet_o6[] = {
  {{0.21460287125915203, 0.21460287125915203, 0.35619138622254391}, 0.0066537917096945820},
  {{0.21460287125915203, 0.35619138622254391, 0.21460287125915203}, 0.0066537917096945820},
  {{0.35619138622254391, 0.21460287125915203, 0.21460287125915203}, 0.0066537917096945820},
  {{0.21460287125915203, 0.21460287125915203, 0.21460287125915203}, 0.0066537917096945820},
  {{0.040673958534611353, 0.040673958534611353, 0.87797812439616594}, 0.0016795351758867738},
  {{0.040673958534611353, 0.87797812439616594, 0.040673958534611353}, 0.0016795351758867738},
  {{0.87797812439616594, 0.040673958534611353, 0.040673958534611353}, 0.0016795351758867738},
  {{0.040673958534611353, 0.040673958534611353, 0.040673958534611353}, 0.0016795351758867738},
  {{0.32233789014227551, 0.32233789014227551, 0.32233789014227551}, 0.0092261969239424537},
  {{0.032986329573173469, 0.32233789014227551, 0.32233789014227551}, 0.0092261969239424537},
  {{0.32233789014227551, 0.032986329573173469, 0.32233789014227551}, 0.0092261969239424537},
  {{0.32233789014227551, 0.32233789014227551, 0.032986329573173469}, 0.0092261969239424537},
  {{0.063661001875017525, 0.26967233145831581, 0.60300566479164914}, 0.0080357142857142857},
  {{0.063661001875017525, 0.60300566479164914, 0.26967233145831581}, 0.0080357142857142857},
  {{0.26967233145831581, 0.063661001875017525, 0.60300566479164914}, 0.0080357142857142857},
  {{0.26967233145831581, 0.60300566479164914, 0.063661001875017525}, 0.0080357142857142857},
  {{0.60300566479164914, 0.063661001875017525, 0.26967233145831581}, 0.0080357142857142857},
  {{0.60300566479164914, 0.26967233145831581, 0.063661001875017525}, 0.0080357142857142857},
  {{0.063661001875017525, 0.063661001875017525, 0.60300566479164914}, 0.0080357142857142857},
  {{0.063661001875017525, 0.60300566479164914, 0.063661001875017525}, 0.0080357142857142857},
  {{0.60300566479164914, 0.063661001875017525, 0.063661001875017525}, 0.0080357142857142857},
  {{0.063661001875017525, 0.063661001875017525, 0.26967233145831581}, 0.0080357142857142857},
  {{0.063661001875017525, 0.26967233145831581, 0.063661001875017525}, 0.0080357142857142857},
  {{0.26967233145831581, 0.063661001875017525, 0.063661001875017525}, 0.0080357142857142857},
};

inline QuadratureRule make_rule(int dim, int order, std::span<const RawPoint> raw) {
  QuadratureRule rule;
  rule.dim = dim;
  rule.order = order;
  rule.points = Table<double>(raw.size(), dim);
  rule.weights.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (int c = 0; c < dim; ++c) rule.points(i, c) = raw[i].x[c];
    rule.weights[i] = raw[i].w;
  }
  return rule;
}

}  // namespace detail

/// Rule exact for polynomials of total degree <= order. Orders without a
/// dedicated table fall through to the next higher implemented rule.
inline QuadratureRule get_rule(int order, int dim) {
  using detail::RawPoint;
  if (dim != 2 && dim != 3) throw Error("quadrature: dimension must be 2 or 3, got " + std::to_string(dim));
  if (order < 1) throw Error("quadrature: order must be at least 1, got " + std::to_string(order));
  if (order > 6) throw Error("quadrature: no rule of order " + std::to_string(order) + " (max 6)");
  if (dim == 2) {
    static constexpr RawPoint o1[] = {{{1.0 / 3.0, 1.0 / 3.0}, 0.5}};
    static constexpr RawPoint o2[] = {{{1.0 / 6.0, 1.0 / 6.0}, 1.0 / 6.0},
                                      {{2.0 / 3.0, 1.0 / 6.0}, 1.0 / 6.0},
                                      {{1.0 / 6.0, 2.0 / 3.0}, 1.0 / 6.0}};
    switch (order) {
      case 1: return detail::make_rule(2, 1, o1);
      case 2: return detail::make_rule(2, 2, o2);
      case 3: return detail::make_rule(2, 3, detail::tri_o3);
      case 4: return detail::make_rule(2, 4, detail::tri_o4);
      default: return detail::make_rule(2, 6, detail::tri_o6);
    }
  }
  static constexpr RawPoint o1[] = {{{0.25, 0.25, 0.25}, 1.0 / 6.0}};
  switch (order) {
    case 1: return detail::make_rule(3, 1, o1);
    case 2: return detail::make_rule(3, 2, detail::tet_o2);
    case 3:
    case 4:
    case 5: return detail::make_rule(3, 5, detail::tet_o5);
    default: return detail::make_rule(3, 6, detail::tet_o6);
  }
}

/// Gauss-Legendre rule on [0, 1] with n points (n = 1..3).
inline QuadratureRule gauss_interval(int n) {
  QuadratureRule rule;
  rule.dim = 1;
  rule.order = 2 * n - 1;
  const double s = std::sqrt(0.6);
  switch (n) {
    case 1:
      rule.points = Table<double>(1, 1, 0.5);
      rule.weights = {1.0};
      break;
    case 2: {
      const double h = 0.5 / std::sqrt(3.0);
      rule.points = Table<double>(2, 1);
      rule.points(0, 0) = 0.5 - h;
      rule.points(1, 0) = 0.5 + h;
      rule.weights = {0.5, 0.5};
      break;
    }
    case 3:
      rule.points = Table<double>(3, 1);
      rule.points(0, 0) = 0.5 * (1.0 - s);
      rule.points(1, 0) = 0.5;
      rule.points(2, 0) = 0.5 * (1.0 + s);
      rule.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    default:
      throw Error("gauss_interval: n must be 1, 2 or 3");
  }
  return rule;
}

}  // namespace edgefem
