#pragma once

#include <array>
#include <cstddef>

namespace freeharness::detail {

// 8-point Gauss-Legendre on [-1, 1], symmetric half.
inline constexpr std::array<double, 4> kGl8Node = {0.1834346424956498, 0.5255324099163290,
                                                   0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGl8Weight = {0.3626837833783620, 0.3137066458778873,
                                                     0.2223810344533745, 0.1012285362903763};

template <typename F>
double gauss_legendre8(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    acc += kGl8Weight[i] * (f(mid - half * kGl8Node[i]) + f(mid + half * kGl8Node[i]));
  return acc * half;
}

// Calls emit(node, weight) for the 8 nodes of the rule on [a, b].
template <typename Emit>
void gauss_legendre8_nodes(double a, double b, Emit&& emit) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 4; i-- > 0;) emit(mid - half * kGl8Node[i], half * kGl8Weight[i]);
  for (std::size_t i = 0; i < 4; ++i) emit(mid + half * kGl8Node[i], half * kGl8Weight[i]);
}

}  // namespace freeharness::detail
