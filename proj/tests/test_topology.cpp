#include <doctest.h>

#include <algorithm>
#include <set>

#include "cbtree/error.hpp"
#include "cbtree/topology.hpp"
#include "oracles.hpp"

using namespace cbtree;

namespace {

VertexSet mask_to_set(std::uint64_t mask) {
  VertexSet s;
  for (Vertex v = 0; v < 64; ++v) {
    if ((mask >> v) & 1u) s.push_back(v);
  }
  return s;
}

// ∂K and ∂²K straight from their definitions.
std::pair<VertexSet, VertexSet> boundary_by_definition(const oracle::Tree& t, const VertexSet& k) {
  std::set<Vertex> in(k.begin(), k.end());
  VertexSet outer, sibling;
  for (Vertex x = 0; x < t.size(); ++x) {
    if (in.count(x)) continue;
    bool adj = false, sib = false;
    for (Vertex y : k) {
      adj = adj || t.parent[x] == static_cast<int>(y) || t.parent[y] == static_cast<int>(x);
      sib = sib || (x != 0 && y != 0 && t.parent[x] == t.parent[y]);
    }
    if (adj) outer.push_back(x);
    if (sib) sibling.push_back(x);
  }
  return {outer, sibling};
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("build_tree vertex counts") {
  CHECK(build_tree(2, TreeMode::full).vertex_count() == 10);
  CHECK(build_tree(1, TreeMode::full).vertex_count() == 4);
  CHECK(build_tree(2, TreeMode::half).vertex_count() == 7);
  CHECK(build_tree(0, TreeMode::full).vertex_count() == 1);
  CHECK(build_tree(12, TreeMode::full).vertex_count() == 1 + 3 * ((1u << 12) - 1));
}

TEST_CASE("layout matches the closed-form level layout") {
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    for (int depth = 0; depth <= 6; ++depth) {
      const TreeIndex t = build_tree(depth, mode);
      const oracle::Tree o = oracle::make_tree(depth, mode);
      REQUIRE(t.vertex_count() == o.size());
      for (int m = 0; m <= depth; ++m) {
        CHECK(t.level(m).first == o.level_start[m]);
        CHECK(t.level(m).last == o.level_start[m + 1]);
        CHECK(t.ball_size(m) == o.level_start[m + 1]);
      }
      for (Vertex v = 0; v < t.vertex_count(); ++v) {
        CHECK(t.level_of(v) == o.level[v]);
        CHECK(t.is_root(v) == (v == 0));
        if (v > 0) {
          CHECK(static_cast<int>(t.parent(v)) == o.parent[v]);
          CHECK(t.level_of(t.parent(v)) == t.level_of(v) - 1);
        }
        const auto kids = t.children(v);
        CHECK(std::vector<int>(kids.begin(), kids.end()) == o.children[v]);
        CHECK(std::is_sorted(kids.begin(), kids.end()));
        if (t.level_of(v) < depth) {
          const std::size_t expected = v == 0 && mode == TreeMode::full ? 3 : 2;
          CHECK(kids.size() == expected);
        } else {
          CHECK(kids.empty());
        }
      }
    }
  }
}

TEST_CASE("adjacent is the parent relation in both directions") {
  const TreeIndex t = build_tree(2, TreeMode::full);
  CHECK(t.adjacent(0, 1));
  CHECK(t.adjacent(1, 0));
  CHECK(t.adjacent(1, 4));
  CHECK_FALSE(t.adjacent(1, 2));
  CHECK_FALSE(t.adjacent(0, 4));
  CHECK_FALSE(t.adjacent(3, 3));
}

TEST_CASE("build_tree rejects bad depth") {
  CHECK_THROWS_AS(build_tree(-1, TreeMode::full), InvalidArgument);
  CHECK_THROWS_AS(build_tree(13, TreeMode::full), CapExceeded);
  CHECK_THROWS_AS(build_tree(4, TreeMode::full, 3), CapExceeded);
  CHECK_NOTHROW(build_tree(3, TreeMode::full, 3));
}

TEST_CASE("nearest_pairs") {
  CHECK(nearest_pairs(build_tree(2, TreeMode::full)).size() == 9);
  CHECK(nearest_pairs(build_tree(1, TreeMode::full)).size() == 3);
  CHECK(nearest_pairs(build_tree(3, TreeMode::full)).size() == 21);
  CHECK(nearest_pairs(build_tree(0, TreeMode::full)).empty());
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    const TreeIndex t = build_tree(4, mode);
    const oracle::Tree o = oracle::make_tree(4, mode);
    const auto pairs = nearest_pairs(t);
    const auto expected = oracle::edges(o);
    REQUIRE(pairs.size() == expected.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(static_cast<int>(pairs[i].first) == expected[i].first);
      CHECK(static_cast<int>(pairs[i].second) == expected[i].second);
    }
  }
}

TEST_CASE("ternary_triples") {
  CHECK(ternary_triples(build_tree(1, TreeMode::full)).size() == 3);
  CHECK(ternary_triples(build_tree(2, TreeMode::full)).size() == 6);
  CHECK(ternary_triples(build_tree(2, TreeMode::half)).size() == 3);
  CHECK(ternary_triples(build_tree(0, TreeMode::full)).empty());
  for (int n = 1; n <= 8; ++n) {
    CHECK(ternary_triples(build_tree(n, TreeMode::full)).size() == 3u << (n - 1));
  }
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    const TreeIndex t = build_tree(3, mode);
    const auto triples = ternary_triples(t);
    std::size_t expected = 0;
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      const std::size_t c = t.children(v).size();
      expected += c * (c - (c > 0)) / 2;
    }
    CHECK(triples.size() == expected);
    const auto pairs = oracle::sibling_pairs(oracle::make_tree(3, mode));
    std::set<std::pair<int, int>> want(pairs.begin(), pairs.end());
    for (const TernaryTriple& tr : triples) {
      CHECK(tr.y < tr.z);
      CHECK(t.parent(tr.y) == tr.x);
      CHECK(t.parent(tr.z) == tr.x);
      CHECK(want.erase({static_cast<int>(tr.y), static_cast<int>(tr.z)}) == 1);
    }
    CHECK(want.empty());
  }
}

TEST_CASE("boundary_sets examples") {
  const TreeIndex t = build_tree(2, TreeMode::full);
  const VertexSet root{0};
  BoundarySets b = boundary_sets(t, root);
  CHECK(b.outer == VertexSet{1, 2, 3});
  CHECK(b.sibling.empty());

  const VertexSet v{1};
  b = boundary_sets(t, v);
  CHECK(b.outer == VertexSet{0, 4, 5});
  CHECK(b.sibling == VertexSet{2, 3});

  VertexSet all(t.vertex_count());
  for (Vertex i = 0; i < all.size(); ++i) all[i] = i;
  b = boundary_sets(t, all);
  CHECK(b.outer.empty());
  CHECK(b.sibling.empty());
}

TEST_CASE("boundary_sets rejects invalid subsets") {
  const TreeIndex t = build_tree(2, TreeMode::full);
  CHECK_THROWS_AS(boundary_sets(t, VertexSet{}), InvalidArgument);
  CHECK_THROWS_AS(boundary_sets(t, VertexSet{1, 2}), InvalidArgument);  // siblings, no parent
  CHECK_THROWS_AS(boundary_sets(t, VertexSet{4, 0}), InvalidArgument);
  CHECK_THROWS_AS(boundary_sets(t, VertexSet{0, 0}), InvalidArgument);
  CHECK_THROWS_AS(boundary_sets(t, VertexSet{10}), InvalidArgument);
  CHECK_FALSE(is_connected(t, VertexSet{1, 2}));
  CHECK(is_connected(t, VertexSet{0, 1, 2}));
}

TEST_CASE("boundary_sets agrees with the definitions on every connected subset") {
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    const TreeIndex t = build_tree(2, mode);
    const oracle::Tree o = oracle::make_tree(2, mode);
    for (std::uint64_t mask : oracle::connected_masks(o)) {
      const VertexSet k = mask_to_set(mask);
      const BoundarySets b = boundary_sets(t, k);
      const auto [outer, sibling] = boundary_by_definition(o, k);
      CHECK(b.outer == outer);
      CHECK(b.sibling == sibling);
      for (Vertex x : b.outer) CHECK_FALSE(std::binary_search(k.begin(), k.end(), x));
      for (Vertex x : b.sibling) CHECK_FALSE(std::binary_search(k.begin(), k.end(), x));
    }
  }
}

TEST_CASE("sibling boundary of a singleton is its sibling set") {
  const TreeIndex t = build_tree(3, TreeMode::full);
  for (Vertex v = 1; v < t.vertex_count(); ++v) {
    VertexSet siblings;
    for (Vertex s : t.children(t.parent(v))) {
      if (s != v) siblings.push_back(s);
    }
    CHECK(boundary_sets(t, VertexSet{v}).sibling == siblings);
  }
}

TEST_CASE("connected subset counts") {
  CHECK(count_connected_subsets(build_tree(0, TreeMode::full)) == 1);
  // 3 leaf singletons + the root with any subset of its 3 children.
  CHECK(count_connected_subsets(build_tree(1, TreeMode::full)) == 11);
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    for (int depth = 0; depth <= 3; ++depth) {
      const oracle::Tree o = oracle::make_tree(depth, mode);
      const std::uint64_t expected = oracle::connected_count_formula(o);
      CHECK(count_connected_subsets(build_tree(depth, mode)) == expected);
      if (o.size() <= 15) CHECK(oracle::connected_masks(o).size() == expected);
    }
  }
  CHECK(count_connected_subsets(build_tree(3, TreeMode::full)) == 17687);
}

TEST_CASE("connected subsets are each listed once and match brute force") {
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    for (int depth = 0; depth <= 2; ++depth) {
      const TreeIndex t = build_tree(depth, mode);
      const auto subsets = connected_subsets(t, 1'000'000);
      std::set<VertexSet> unique(subsets.begin(), subsets.end());
      CHECK(unique.size() == subsets.size());
      std::set<VertexSet> expected;
      for (std::uint64_t m : oracle::connected_masks(oracle::make_tree(depth, mode))) {
        expected.insert(mask_to_set(m));
      }
      CHECK(unique == expected);
      for (const VertexSet& k : subsets) CHECK(std::is_sorted(k.begin(), k.end()));
    }
  }
}

TEST_CASE("connected subset enumeration is deterministic") {
  const TreeIndex t = build_tree(2, TreeMode::full);
  CHECK(connected_subsets(t, 1000) == connected_subsets(t, 1000));
  const auto first = connected_subsets(t, 1000);
  CHECK(first.front() == VertexSet{0});
}

TEST_CASE("connected subset caps") {
  const TreeIndex t = build_tree(2, TreeMode::full);
  std::size_t visited = 0;
  CHECK_THROWS_AS(for_each_connected_subset(t, 10, [&](const VertexSet&) { ++visited; }),
                  CapExceeded);
  CHECK(visited == 0);
  CHECK_NOTHROW(connected_subsets(t, 143));
  CHECK_THROWS_AS(connected_subsets(t, 142), CapExceeded);
  CHECK_THROWS_AS(count_connected_subsets(build_tree(4, TreeMode::full)), CapExceeded);
}

}  // TEST_SUITE
