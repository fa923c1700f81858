#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "gds/core/types.hpp"

namespace gds::math {

// log(sum_i exp(x_i)); -inf for an empty range or when every term is -inf.
inline double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -kInf;
  const double hi = *std::max_element(x.begin(), x.end());
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double sum = 0.0;
  for (double xi : x) sum += std::exp(xi - hi);
  return hi + std::log(sum);
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log(1 - exp(-x)) for x >= 0, accurate near both ends.
inline double log1mexp(double x) {
  if (x <= 0.0) return -kInf;
  if (x == kInf) return 0.0;
  return x < M_LN2 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

}  // namespace gds::math
