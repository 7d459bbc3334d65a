#include "cbtree/topology.hpp"

#include <algorithm>
#include <string>

#include "cbtree/error.hpp"

namespace cbtree {

namespace {

// Depth <= 3 keeps every vertex inside one 64-bit mask.
using Mask = std::uint64_t;

VertexSet mask_to_set(Mask mask) {
  VertexSet out;
  for (Vertex v = 0; mask != 0; ++v, mask >>= 1) {
    if (mask & 1u) out.push_back(v);
  }
  return out;
}

// Connected subsets whose minimum-level vertex is `v`, as masks.
std::vector<Mask> rooted_subsets(const TreeIndex& tree, Vertex v) {
  std::vector<Mask> acc{Mask{1} << v};
  for (Vertex c : tree.children(v)) {
    const std::vector<Mask> below = rooted_subsets(tree, c);
    std::vector<Mask> next;
    next.reserve(acc.size() * (below.size() + 1));
    for (Mask base : acc) {
      next.push_back(base);
      for (Mask b : below) next.push_back(base | b);
    }
    acc = std::move(next);
  }
  return acc;
}

std::size_t rooted_count(const TreeIndex& tree, Vertex v) {
  std::size_t n = 1;
  for (Vertex c : tree.children(v)) n *= rooted_count(tree, c) + 1;
  return n;
}

void check_subset_depth(const TreeIndex& tree) {
  if (tree.depth() > kSubsetDepthCap) {
    throw CapExceeded("connected subset enumeration supports depth <= " +
                      std::to_string(kSubsetDepthCap));
  }
}

}  // namespace

TreeIndex::TreeIndex(int depth, TreeMode mode, int depth_cap) : depth_(depth), mode_(mode) {
  if (depth < 0) throw InvalidArgument("tree depth must be non-negative");
  if (depth > depth_cap) {
    throw CapExceeded("tree depth " + std::to_string(depth) + " exceeds cap " +
                      std::to_string(depth_cap));
  }
  level_start_.push_back(0);
  std::size_t width = 1;
  for (int m = 0; m <= depth; ++m) {
    level_start_.push_back(static_cast<Vertex>(level_start_.back() + width));
    width = (m == 0 && mode == TreeMode::full) ? 3 : width * 2;
  }
  const std::size_t n = level_start_.back();
  parent_.assign(n, 0);
  level_.assign(n, 0);
  child_offset_.assign(n + 1, 0);

  for (int m = 0; m <= depth; ++m) {
    for (Vertex v = level_start_[m]; v < level_start_[m + 1]; ++v) level_[v] = m;
  }
  // Children of the k-th vertex of W_m are consecutive in W_{m+1}.
  for (int m = 0; m < depth; ++m) {
    const std::size_t fan = (m == 0 && mode == TreeMode::full) ? 3 : 2;
    Vertex next = level_start_[m + 1];
    for (Vertex v = level_start_[m]; v < level_start_[m + 1]; ++v) {
      child_offset_[v] = static_cast<std::uint32_t>(child_ids_.size());
      for (std::size_t k = 0; k < fan; ++k) {
        parent_[next] = v;
        child_ids_.push_back(next++);
      }
    }
  }
  for (Vertex v = level_start_[depth]; v <= n; ++v) {
    child_offset_[v] = static_cast<std::uint32_t>(child_ids_.size());
  }
}

LevelRange TreeIndex::level(int m) const {
  if (m < 0 || m > depth_) throw InvalidArgument("level out of range");
  return {level_start_[m], level_start_[m + 1]};
}

std::span<const Vertex> TreeIndex::children(Vertex v) const {
  return std::span<const Vertex>(child_ids_).subspan(child_offset_[v],
                                                     child_offset_[v + 1] - child_offset_[v]);
}

bool TreeIndex::adjacent(Vertex a, Vertex b) const {
  if (a == b) return false;
  return (!is_root(a) && parent_[a] == b) || (!is_root(b) && parent_[b] == a);
}

TreeIndex build_tree(int depth, TreeMode mode, int depth_cap) {
  return TreeIndex(depth, mode, depth_cap);
}

std::vector<std::pair<Vertex, Vertex>> nearest_pairs(const TreeIndex& tree) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(tree.vertex_count() - 1);
  for (Vertex v = 1; v < tree.vertex_count(); ++v) edges.emplace_back(tree.parent(v), v);
  return edges;
}

std::vector<TernaryTriple> ternary_triples(const TreeIndex& tree) {
  std::vector<TernaryTriple> out;
  for (Vertex x = 0; x < tree.vertex_count(); ++x) {
    const auto kids = tree.children(x);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) out.push_back({kids[i], x, kids[j]});
    }
  }
  return out;
}

bool is_connected(const TreeIndex& tree, std::span<const Vertex> subset) {
  if (subset.empty()) return false;
  std::vector<char> member(tree.vertex_count(), 0);
  for (Vertex v : subset) member.at(v) = 1;
  // In a tree, a set is connected iff exactly one member has its parent
  // outside the set.
  std::size_t tops = 0;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    if (member[v] && (tree.is_root(v) || !member[tree.parent(v)])) ++tops;
  }
  return tops == 1;
}

BoundarySets boundary_sets(const TreeIndex& tree, std::span<const Vertex> subset) {
  if (subset.empty()) throw InvalidArgument("boundary_sets: empty vertex set");
  std::vector<char> member(tree.vertex_count(), 0);
  for (Vertex v : subset) {
    if (v >= tree.vertex_count()) throw InvalidArgument("boundary_sets: unknown vertex");
    if (member[v]) throw InvalidArgument("boundary_sets: repeated vertex");
    member[v] = 1;
  }
  if (!is_connected(tree, subset)) throw InvalidArgument("boundary_sets: set is not connected");

  BoundarySets out;
  for (Vertex y : subset) {
    if (!tree.is_root(y)) {
      const Vertex p = tree.parent(y);
      if (!member[p]) out.outer.push_back(p);
      for (Vertex s : tree.children(p)) {
        if (s != y && !member[s]) out.sibling.push_back(s);
      }
    }
    for (Vertex c : tree.children(y)) {
      if (!member[c]) out.outer.push_back(c);
    }
  }
  for (VertexSet* set : {&out.outer, &out.sibling}) {
    std::sort(set->begin(), set->end());
    set->erase(std::unique(set->begin(), set->end()), set->end());
  }
  return out;
}

std::size_t count_connected_subsets(const TreeIndex& tree) {
  check_subset_depth(tree);
  std::size_t total = 0;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) total += rooted_count(tree, v);
  return total;
}

void for_each_connected_subset(const TreeIndex& tree, std::size_t max_count,
                               const std::function<void(const VertexSet&)>& visit) {
  const std::size_t total = count_connected_subsets(tree);
  if (total > max_count) {
    throw CapExceeded("connected subset count " + std::to_string(total) + " exceeds cap " +
                      std::to_string(max_count));
  }
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    for (Mask m : rooted_subsets(tree, v)) visit(mask_to_set(m));
  }
}

std::vector<VertexSet> connected_subsets(const TreeIndex& tree, std::size_t max_count) {
  std::vector<VertexSet> out;
  for_each_connected_subset(tree, max_count, [&](const VertexSet& s) { out.push_back(s); });
  return out;
}

}  // namespace cbtree
