#include "cbtree/logspace.hpp"

namespace cbtree {

double logsumexp(std::span<const double> xs) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (xs.empty()) return kNegInf;
  const double peak = *std::max_element(xs.begin(), xs.end());
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - peak);
  return peak + std::log(sum);
}

}  // namespace cbtree
