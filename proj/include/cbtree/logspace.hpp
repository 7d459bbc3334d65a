#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace cbtree {

/// log(exp(a) + exp(b)) without overflow.
inline double lse2(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log(sum_i exp(xs[i])), two-pass (max, then shifted sum). Returns -inf for
/// an empty span.
double logsumexp(std::span<const double> xs);

}  // namespace cbtree
