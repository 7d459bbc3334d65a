#include "cbtree/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cbtree/error.hpp"

namespace cbtree {

ModelParams::ModelParams(double J, double J1, double beta) : J_(J), J1_(J1), beta_(beta) {
  if (!std::isfinite(J) || !std::isfinite(J1)) throw InvalidArgument("couplings must be finite");
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw InvalidArgument("inverse temperature must be finite and > 0");
  }
}

ModelParams ModelParams::from_theta(double theta, double theta1) {
  if (!(theta > 0.0) || !(theta1 > 0.0)) throw InvalidArgument("theta values must be > 0");
  return {0.5 * std::log(theta), 0.5 * std::log(theta1), 1.0};
}

double ModelParams::theta_exp() const { return std::exp(log_theta()); }
double ModelParams::theta1_exp() const { return std::exp(log_theta1()); }
double ModelParams::theta_tanh() const { return std::tanh(beta_J()); }

SpinConfig::SpinConfig(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

SpinConfig SpinConfig::all_plus(std::size_t size) {
  SpinConfig c(size);
  for (std::size_t w = 0; w < c.words_.size(); ++w) {
    const std::size_t bits = std::min<std::size_t>(64, size - 64 * w);
    c.words_[w] = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  }
  return c;
}

SpinConfig SpinConfig::from_bits(std::size_t size, std::uint64_t bits) {
  if (size > 64) throw InvalidArgument("from_bits supports at most 64 spins");
  SpinConfig c(size);
  if (size > 0) c.words_[0] = size == 64 ? bits : bits & ((std::uint64_t{1} << size) - 1);
  return c;
}

void SpinConfig::set(Vertex v, int spin) {
  const std::uint64_t bit = std::uint64_t{1} << (v % 64);
  if (spin > 0) {
    words_[v / 64] |= bit;
  } else {
    words_[v / 64] &= ~bit;
  }
}

SpinConfig SpinConfig::flipped() const {
  SpinConfig out = all_plus(size_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] &= ~words_[w];
  return out;
}

SufficientStats sufficient_stats(const TreeIndex& tree, const SpinConfig& config) {
  if (config.size() != tree.vertex_count()) {
    throw InvalidArgument("configuration size does not match tree");
  }
  SufficientStats s;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    const int sv = config.spin(v);
    s.C += sv;
    const auto kids = tree.children(v);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      s.B += sv * config.spin(kids[i]);
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        s.A += config.spin(kids[i]) * config.spin(kids[j]);
      }
    }
  }
  return s;
}

double hamiltonian(const TreeIndex& tree, const ModelParams& params, const SpinConfig& config) {
  const SufficientStats s = sufficient_stats(tree, config);
  return -params.J() * static_cast<double>(s.A) - params.J1() * static_cast<double>(s.B);
}

SufficientStats stat_maxima(const TreeIndex& tree) {
  if (tree.mode() != TreeMode::full) throw InvalidArgument("stat_maxima requires a full tree");
  const int n = tree.depth();
  if (n == 0) return {0, 0, 1};
  const std::int64_t p = std::int64_t{1} << n;
  return {3 * (p / 2), 3 * (p - 1), 1 + 3 * (p - 1)};
}

MaskStats::MaskStats(const TreeIndex& tree) : n_(tree.vertex_count()) {
  if (n_ > 64) throw CapExceeded("mask statistics need at most 64 vertices");
  for (const auto& [p, c] : nearest_pairs(tree)) {
    edges_.push_back({static_cast<std::uint8_t>(p), static_cast<std::uint8_t>(c)});
  }
  for (const TernaryTriple& t : ternary_triples(tree)) {
    pairs_.push_back({static_cast<std::uint8_t>(t.y), static_cast<std::uint8_t>(t.z)});
  }
}

SufficientStats MaskStats::operator()(std::uint64_t bits) const {
  // σσ' = 1 - 2·[σ ≠ σ'], so each sum is (#links - 2·#disagreements).
  std::int64_t edge_flips = 0;
  for (const Link& e : edges_) edge_flips += ((bits >> e.a) ^ (bits >> e.b)) & 1u;
  std::int64_t pair_flips = 0;
  for (const Link& e : pairs_) pair_flips += ((bits >> e.a) ^ (bits >> e.b)) & 1u;
  const std::uint64_t live = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
  const auto ups = static_cast<std::int64_t>(std::popcount(bits & live));
  return {static_cast<std::int64_t>(pairs_.size()) - 2 * pair_flips,
          static_cast<std::int64_t>(edges_.size()) - 2 * edge_flips,
          2 * ups - static_cast<std::int64_t>(n_)};
}

}  // namespace cbtree
