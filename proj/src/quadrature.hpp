#pragma once

#include <array>

namespace scherklab::detail {

struct TriPoint {
  double l1, l2, l3;  // barycentric
  double w;           // weight, summing to 1
};

/// Degree-5 seven-point rule on a triangle.
inline const std::array<TriPoint, 7>& rule7() {
  static const std::array<TriPoint, 7> pts = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    return std::array<TriPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                                    {a1, b1, b1, w1},
                                    {b1, a1, b1, w1},
                                    {b1, b1, a1, w1},
                                    {a2, b2, b2, w2},
                                    {b2, a2, b2, w2},
                                    {b2, b2, a2, w2}}};
  }();
  return pts;
}

}  // namespace scherklab::detail
