#pragma once

// Dense real polynomials in ascending coefficient order; internal helpers.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

namespace freeharness::detail {

using Poly = std::vector<double>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly poly_axpy(double alpha, const Poly& x, const Poly& y) {
  Poly out(std::max(x.size(), y.size()), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i];
  return out;
}

inline Poly poly_shift(const Poly& a) {  // multiply by u
  Poly out(a.size() + 1, 0.0);
  std::copy(a.begin(), a.end(), out.begin() + 1);
  return out;
}

inline Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return {0.0};
  Poly out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = static_cast<double>(i) * a[i];
  return out;
}

template <typename T>
T poly_eval(const Poly& a, T u) {
  T acc{0};
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + T(*it);
  return acc;
}

}  // namespace freeharness::detail
