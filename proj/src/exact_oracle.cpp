#include "cbtree/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbtree/error.hpp"
#include "cbtree/logspace.hpp"
#include "cbtree/parallel.hpp"

namespace cbtree {

namespace {

constexpr unsigned kChunkBits = 12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-sum-exp of f(i) over i in [0, count). Chunks of 2^kChunkBits indices
// are reduced independently and then combined pairwise.
template <class LogWeight>
double chunked_logsumexp(std::uint64_t count, const LogWeight& f) {
  const std::uint64_t chunk = std::min<std::uint64_t>(count, std::uint64_t{1} << kChunkBits);
  const std::uint64_t chunks = (count + chunk - 1) / chunk;
  std::vector<double> partial(chunks, kNegInf);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> buf;
    buf.reserve(chunk);
    const std::uint64_t first = c * chunk;
    const std::uint64_t last = std::min(count, first + chunk);
    for (std::uint64_t i = first; i < last; ++i) buf.push_back(f(i));
    partial[c] = logsumexp(buf);
  });
  return tree_reduce(std::move(partial), [](double a, double b) { return lse2(a, b); }, kNegInf);
}

}  // namespace

void require_enumerable(const TreeIndex& tree) {
  const int cap = tree.mode() == TreeMode::full ? kFullEnumerationCap : kHalfEnumerationCap;
  if (tree.depth() > cap) {
    throw CapExceeded("exact enumeration supports depth <= " + std::to_string(cap) +
                      " for this tree mode, got " + std::to_string(tree.depth()));
  }
}

BoundaryField::BoundaryField(const TreeIndex& tree, std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() != tree.level(tree.depth()).size()) {
    throw InvalidArgument("boundary field size does not match the outermost level");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("boundary field values must be finite");
  }
}

BoundaryField BoundaryField::uniform(const TreeIndex& tree, double h) {
  return {tree, std::vector<double>(tree.level(tree.depth()).size(), h)};
}

BoundaryField BoundaryField::from_fields(const TreeIndex& tree, const FieldAssignment& fields) {
  if (fields.size() != tree.vertex_count()) {
    throw InvalidArgument("field assignment size does not match tree");
  }
  const LevelRange outer = tree.level(tree.depth());
  const auto all = fields.values();
  return {tree, std::vector<double>(all.begin() + outer.first, all.begin() + outer.last)};
}

BoundaryField BoundaryField::negated() const {
  BoundaryField out = *this;
  for (double& v : out.values_) v = -v;
  return out;
}

FiniteVolumeMeasure::FiniteVolumeMeasure(const TreeIndex& tree, const ModelParams& params,
                                         const BoundaryField& h)
    : tree_((require_enumerable(tree), tree)),
      stats_(tree),
      beta_J_(params.beta_J()),
      beta_J1_(params.beta_J1()),
      field_(h.values().begin(), h.values().end()),
      boundary_first_(tree.level(tree.depth()).first) {
  if (field_.size() != tree.level(tree.depth()).size()) {
    throw InvalidArgument("boundary field belongs to a different tree");
  }
  log_z_ = chunked_logsumexp(config_count(), [this](std::uint64_t b) { return log_weight(b); });
}

double FiniteVolumeMeasure::log_weight(std::uint64_t bits) const {
  const SufficientStats s = stats_(bits);
  double w = beta_J_ * static_cast<double>(s.A) + beta_J1_ * static_cast<double>(s.B);
  for (std::size_t k = 0; k < field_.size(); ++k) {
    w += ((bits >> (boundary_first_ + k)) & 1u) ? field_[k] : -field_[k];
  }
  return w;
}

double FiniteVolumeMeasure::probability(const SpinConfig& config) const {
  if (config.size() != tree_.vertex_count()) {
    throw InvalidArgument("configuration size does not match tree");
  }
  return std::exp(log_weight(config.low_bits()) - log_z_);
}

double FiniteVolumeMeasure::marginal_log_weight(std::uint64_t partial_bits) const {
  const std::size_t outer = field_.size();
  std::vector<double> terms(std::size_t{1} << outer);
  for (std::uint64_t c = 0; c < terms.size(); ++c) {
    terms[c] = log_weight(partial_bits | (c << boundary_first_));
  }
  return logsumexp(terms);
}

double FiniteVolumeMeasure::marginal(const SpinConfig& partial) const {
  if (tree_.depth() == 0) throw InvalidArgument("marginal needs depth >= 1");
  if (partial.size() != boundary_first_) {
    throw InvalidArgument("partial configuration must cover exactly V_{N-1}");
  }
  return std::exp(marginal_log_weight(partial.low_bits()) - log_z_);
}

double log_partition(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h) {
  return FiniteVolumeMeasure(tree, params, h).log_partition();
}

double measure_prob(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h,
                    const SpinConfig& config) {
  return FiniteVolumeMeasure(tree, params, h).probability(config);
}

double marginal_prob(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h,
                     const SpinConfig& partial) {
  return FiniteVolumeMeasure(tree, params, h).marginal(partial);
}

double consistency_deviation(const TreeIndex& tree, const ModelParams& params,
                             const FieldAssignment& fields) {
  require_enumerable(tree);
  if (tree.depth() < 1) throw InvalidArgument("consistency needs depth >= 1");
  if (fields.size() != tree.vertex_count()) {
    throw InvalidArgument("field assignment size does not match tree");
  }
  const TreeIndex inner(tree.depth() - 1, tree.mode());
  const LevelRange inner_outer = inner.level(inner.depth());
  const auto h = fields.values();
  const FiniteVolumeMeasure outer_measure(tree, params, BoundaryField::from_fields(tree, fields));
  const FiniteVolumeMeasure inner_measure(
      inner, params,
      BoundaryField(inner, std::vector<double>(h.begin() + inner_outer.first,
                                               h.begin() + inner_outer.last)));

  const std::uint64_t count = inner_measure.config_count();
  const std::uint64_t chunk = std::min<std::uint64_t>(count, 256);
  const std::uint64_t chunks = (count + chunk - 1) / chunk;
  std::vector<double> worst(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t last = std::min(count, (c + 1) * chunk);
    for (std::uint64_t p = c * chunk; p < last; ++p) {
      const double lhs =
          std::exp(outer_measure.marginal_log_weight(p) - outer_measure.log_partition());
      const double rhs = std::exp(inner_measure.log_weight(p) - inner_measure.log_partition());
      worst[c] = std::max(worst[c], std::abs(lhs - rhs));
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

double check_consistency(const TreeIndex& tree, const ModelParams& params,
                         const FieldAssignment& fields) {
  const int min_depth = tree.mode() == TreeMode::full ? 2 : 1;
  if (tree.depth() < min_depth) {
    throw InvalidArgument("check_consistency: the step into a vertex with three successors "
                          "is outside the two-successor recursion; use depth >= " +
                          std::to_string(min_depth));
  }
  return consistency_deviation(tree, params, fields);
}

PlusMinusMass plus_minus_mass(const TreeIndex& tree, const ModelParams& params,
                              const BoundaryField& h) {
  const FiniteVolumeMeasure mu(tree, params, h);
  const std::size_t n = tree.vertex_count();
  return {mu.probability(SpinConfig::all_plus(n)), mu.probability(SpinConfig::all_minus(n))};
}

}  // namespace cbtree
