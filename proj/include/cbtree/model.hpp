#pragma once

#include <cstdint>
#include <vector>

#include "cbtree/topology.hpp"

namespace cbtree {

/// Couplings and inverse temperature of the competing-interaction Ising
/// model. `J` couples one-level next-nearest neighbours (siblings), `J1`
/// couples nearest neighbours.
///
/// Two different "theta" quantities appear in the theory and both are
/// exposed here under distinct names: theta_exp() = e^{2βJ} enters the
/// boundary-field recursion, theta_tanh() = tanh(βJ) enters the free-energy
/// kernels.
class ModelParams {
 public:
  /// Throws InvalidArgument unless beta > 0 and all values are finite.
  ModelParams(double J, double J1, double beta);

  /// (θ, θ₁) parameterisation with β = 1: J = ½ ln θ, J₁ = ½ ln θ₁.
  static ModelParams from_theta(double theta, double theta1);

  double J() const { return J_; }
  double J1() const { return J1_; }
  double beta() const { return beta_; }

  double beta_J() const { return beta_ * J_; }
  double beta_J1() const { return beta_ * J1_; }
  double log_theta() const { return 2.0 * beta_J(); }
  double log_theta1() const { return 2.0 * beta_J1(); }
  double theta_exp() const;
  double theta1_exp() const;
  double theta_tanh() const;

  ModelParams with_beta(double beta) const { return {J_, J1_, beta}; }

 private:
  double J_;
  double J1_;
  double beta_;
};

/// Bit-packed ±1 assignment; bit 1 means spin +1.
class SpinConfig {
 public:
  /// All spins -1.
  explicit SpinConfig(std::size_t size);

  static SpinConfig all_plus(std::size_t size);
  static SpinConfig all_minus(std::size_t size) { return SpinConfig(size); }
  /// Low `size` bits of `bits` (size <= 64).
  static SpinConfig from_bits(std::size_t size, std::uint64_t bits);

  std::size_t size() const { return size_; }
  int spin(Vertex v) const { return (words_[v / 64] >> (v % 64)) & 1u ? 1 : -1; }
  void set(Vertex v, int spin);
  SpinConfig flipped() const;
  /// Bits of the first min(size, 64) spins.
  std::uint64_t low_bits() const { return words_.empty() ? 0 : words_[0]; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

/// A = Σ over sibling pairs, B = Σ over edges, C = Σ over vertices.
struct SufficientStats {
  std::int64_t A = 0;
  std::int64_t B = 0;
  std::int64_t C = 0;
  friend bool operator==(const SufficientStats&, const SufficientStats&) = default;
};

SufficientStats sufficient_stats(const TreeIndex& tree, const SpinConfig& config);

/// H = -J·A - J₁·B.
double hamiltonian(const TreeIndex& tree, const ModelParams& params, const SpinConfig& config);

/// Statistics of the all-plus configuration of a full tree.
SufficientStats stat_maxima(const TreeIndex& tree);

/// Evaluates sufficient statistics directly on 64-bit configuration masks.
/// Used by the enumeration routines; trees must have at most 64 vertices.
class MaskStats {
 public:
  explicit MaskStats(const TreeIndex& tree);

  SufficientStats operator()(std::uint64_t bits) const;
  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t pair_count() const { return pairs_.size(); }

 private:
  struct Link {
    std::uint8_t a;
    std::uint8_t b;
  };
  std::size_t n_;
  std::vector<Link> edges_;
  std::vector<Link> pairs_;
};

}  // namespace cbtree
