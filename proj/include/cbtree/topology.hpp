#pragma once

// Finite order-2 Cayley tree: vertices grouped in levels W_0 .. W_depth,
// numbered level by level so that every level occupies a contiguous id
// range and children of a vertex are listed in increasing id order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace cbtree {

using Vertex = std::uint32_t;

/// `full`: the depth-n ball of the Cayley tree (root has 3 successors).
/// `half`: a binary branch (root has 2 successors).
enum class TreeMode { full, half };

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

/// Parent `x` with two children `y < z`.
struct TernaryTriple {
  Vertex y;
  Vertex x;
  Vertex z;
  friend bool operator==(const TernaryTriple&, const TernaryTriple&) = default;
};

/// Half-open id range of one level.
struct LevelRange {
  Vertex first;
  Vertex last;  // one past the end
  std::size_t size() const { return last - first; }
};

inline constexpr int kTopologyDepthCap = 12;

class TreeIndex {
 public:
  /// Throws InvalidArgument for negative depth and CapExceeded when
  /// depth > depth_cap.
  TreeIndex(int depth, TreeMode mode, int depth_cap = kTopologyDepthCap);

  int depth() const { return depth_; }
  TreeMode mode() const { return mode_; }
  std::size_t vertex_count() const { return parent_.size(); }

  LevelRange level(int m) const;
  int level_of(Vertex v) const { return level_[v]; }
  bool is_root(Vertex v) const { return v == 0; }
  /// Parent of a non-root vertex.
  Vertex parent(Vertex v) const { return parent_[v]; }
  std::span<const Vertex> children(Vertex v) const;
  bool adjacent(Vertex a, Vertex b) const;

  /// Vertex count of the depth-m ball of the same mode (m <= depth).
  std::size_t ball_size(int m) const { return level(m).last; }

 private:
  int depth_;
  TreeMode mode_;
  std::vector<Vertex> parent_;
  std::vector<int> level_;
  std::vector<Vertex> level_start_;  // depth + 2 entries
  std::vector<Vertex> child_ids_;
  std::vector<std::uint32_t> child_offset_;  // CSR offsets, vertex_count + 1
};

TreeIndex build_tree(int depth, TreeMode mode, int depth_cap = kTopologyDepthCap);

/// All parent-child edges as (parent, child), sorted by child id.
std::vector<std::pair<Vertex, Vertex>> nearest_pairs(const TreeIndex& tree);

/// Every pair of children of a common parent, ordered by parent then by
/// (y, z).
std::vector<TernaryTriple> ternary_triples(const TreeIndex& tree);

/// Exterior nearest-neighbour boundary and exterior sibling boundary of a
/// connected vertex set.
struct BoundarySets {
  VertexSet outer;    // ∂K
  VertexSet sibling;  // ∂²K
};

bool is_connected(const TreeIndex& tree, std::span<const Vertex> subset);

/// Throws InvalidArgument if `subset` is empty, contains an unknown or
/// repeated vertex, or is not connected.
BoundarySets boundary_sets(const TreeIndex& tree, std::span<const Vertex> subset);

inline constexpr int kSubsetDepthCap = 3;

/// Number of nonempty connected vertex subsets (depth <= kSubsetDepthCap).
std::size_t count_connected_subsets(const TreeIndex& tree);

/// Visits every nonempty connected subset exactly once, grouped by the
/// subset's top vertex in id order. Throws CapExceeded before visiting
/// anything if the total would exceed `max_count`.
void for_each_connected_subset(const TreeIndex& tree, std::size_t max_count,
                               const std::function<void(const VertexSet&)>& visit);

std::vector<VertexSet> connected_subsets(const TreeIndex& tree, std::size_t max_count);

}  // namespace cbtree
