#pragma once

// Brute-force ground truth for small trees: every spin configuration of the
// ball V_N is enumerated. Nothing here uses the boundary-field recursion;
// it is the independent side of every recursion-vs-enumeration check.

#include <cstdint>
#include <span>
#include <vector>

#include "cbtree/field_recursion.hpp"
#include "cbtree/model.hpp"
#include "cbtree/topology.hpp"

namespace cbtree {

inline constexpr int kFullEnumerationCap = 3;  // 22 spins
inline constexpr int kHalfEnumerationCap = 4;  // 31 spins

/// Throws CapExceeded if the tree is too deep to enumerate.
void require_enumerable(const TreeIndex& tree);

/// External field h_x on the outermost level W_N, in vertex-id order.
class BoundaryField {
 public:
  BoundaryField(const TreeIndex& tree, std::vector<double> values);
  static BoundaryField uniform(const TreeIndex& tree, double h);
  /// The W_N slice of a full field assignment.
  static BoundaryField from_fields(const TreeIndex& tree, const FieldAssignment& fields);

  std::span<const double> values() const { return values_; }
  BoundaryField negated() const;

 private:
  std::vector<double> values_;
};

/// μ⁽ᴺ⁾(σ) = Z⁻¹ exp(−βH(σ) + Σ_{x∈W_N} h_x σ(x)) with ln Z computed once at
/// construction.
class FiniteVolumeMeasure {
 public:
  FiniteVolumeMeasure(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h);

  double log_partition() const { return log_z_; }
  std::uint64_t config_count() const { return std::uint64_t{1} << stats_.vertex_count(); }

  /// −βH(σ) + Σ h σ for a configuration given as a bit mask.
  double log_weight(std::uint64_t bits) const;
  double probability(const SpinConfig& config) const;
  /// Σ over all 2^{|W_N|} completions of a configuration on V_{N−1}.
  double marginal(const SpinConfig& partial) const;
  /// ln of the unnormalised marginal weight of a V_{N−1} configuration.
  double marginal_log_weight(std::uint64_t partial_bits) const;

 private:
  TreeIndex tree_;
  MaskStats stats_;
  double beta_J_;
  double beta_J1_;
  std::vector<double> field_;
  Vertex boundary_first_;
  double log_z_ = 0.0;
};

/// ln Z_N by log-sum-exp over all configurations. Chunk boundaries and the
/// reduction tree are fixed, so the result does not depend on thread count.
double log_partition(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h);

double measure_prob(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h,
                    const SpinConfig& config);

/// `partial` is a configuration of the depth-(N−1) ball (its first
/// |V_{N−1}| vertices).
double marginal_prob(const TreeIndex& tree, const ModelParams& params, const BoundaryField& h,
                     const SpinConfig& partial);

/// max over σ_{N−1} of |Σ_{σ⁽ᴺ⁾} μ⁽ᴺ⁾(σ_{N−1}, σ⁽ᴺ⁾) − μ⁽ᴺ⁻¹⁾(σ_{N−1})| where
/// μ⁽ᴺ⁾ uses the W_N values of `fields` and μ⁽ᴺ⁻¹⁾ the W_{N−1} values. No
/// restriction on which step is checked.
double consistency_deviation(const TreeIndex& tree, const ModelParams& params,
                             const FieldAssignment& fields);

/// consistency_deviation restricted to steps where every vertex of W_{N−1}
/// has two successors: N >= 2 on a full tree, N >= 1 on a half tree.
double check_consistency(const TreeIndex& tree, const ModelParams& params,
                         const FieldAssignment& fields);

struct PlusMinusMass {
  double plus;   // μ(σ₊|V_N)
  double minus;  // μ(σ₋|V_N)
};

PlusMinusMass plus_minus_mass(const TreeIndex& tree, const ModelParams& params,
                              const BoundaryField& h);

}  // namespace cbtree
