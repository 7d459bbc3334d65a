#include <doctest.h>

#include <cmath>
#include <limits>

#include "cbtree/error.hpp"
#include "cbtree/model.hpp"
#include "oracles.hpp"

using namespace cbtree;

namespace {

SpinConfig root_up_rest_down(std::size_t n) {
  SpinConfig c(n);
  c.set(0, 1);
  return c;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("ModelParams validation and derived quantities") {
  CHECK_THROWS_AS(ModelParams(1, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1, 1, -1), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(std::nan(""), 1, 1), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1, std::numeric_limits<double>::infinity(), 1), InvalidArgument);

  const ModelParams p(0.3, 0.7, 2.0);
  CHECK(p.beta_J() == doctest::Approx(0.6));
  CHECK(p.beta_J1() == doctest::Approx(1.4));
  CHECK(p.theta_exp() == doctest::Approx(std::exp(1.2)));
  CHECK(p.theta1_exp() == doctest::Approx(std::exp(2.8)));
  CHECK(p.theta_tanh() == doctest::Approx(std::tanh(0.6)));
  CHECK(std::abs(ModelParams(1, 1, 50).theta_tanh()) <= 1.0);

  const ModelParams t = ModelParams::from_theta(5.0, 2.0);
  CHECK(t.beta() == 1.0);
  CHECK(t.theta_exp() == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(t.theta1_exp() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(ModelParams::from_theta(0.0, 2.0), InvalidArgument);

  const ModelParams q = p.with_beta(4.0);
  CHECK(q.J() == 0.3);
  CHECK(q.beta() == 4.0);
}

TEST_CASE("SpinConfig bit packing") {
  SpinConfig c(70);
  CHECK(c.size() == 70);
  for (Vertex v = 0; v < 70; ++v) CHECK(c.spin(v) == -1);
  c.set(3, 1);
  c.set(65, 1);
  CHECK(c.spin(3) == 1);
  CHECK(c.spin(65) == 1);
  CHECK(c.low_bits() == (1u << 3));
  const SpinConfig f = c.flipped();
  CHECK(f.spin(3) == -1);
  CHECK(f.spin(4) == 1);
  CHECK(f.flipped() == c);
  CHECK(SpinConfig::all_plus(70).flipped() == SpinConfig::all_minus(70));
  CHECK(SpinConfig::from_bits(4, 0b1010).spin(1) == 1);
  CHECK(SpinConfig::from_bits(4, 0b1010).spin(0) == -1);
}

TEST_CASE("hamiltonian examples") {
  const TreeIndex t1 = build_tree(1, TreeMode::full);
  const ModelParams unit(1, 1, 1);
  CHECK(hamiltonian(t1, unit, SpinConfig::all_plus(4)) == -6.0);
  CHECK(hamiltonian(t1, unit, root_up_rest_down(4)) == 0.0);
  const TreeIndex t2 = build_tree(2, TreeMode::full);
  const ModelParams zero(0, 0, 1);
  for (std::uint64_t bits = 0; bits < 1024; ++bits) {
    CHECK(hamiltonian(t2, zero, SpinConfig::from_bits(10, bits)) == 0.0);
  }
}

TEST_CASE("sufficient_stats examples") {
  const TreeIndex t2 = build_tree(2, TreeMode::full);
  CHECK(sufficient_stats(t2, SpinConfig::all_plus(10)) == SufficientStats{6, 9, 10});
  CHECK(sufficient_stats(t2, SpinConfig::all_minus(10)) == SufficientStats{6, 9, -10});
  const TreeIndex t1 = build_tree(1, TreeMode::full);
  CHECK(sufficient_stats(t1, root_up_rest_down(4)) == SufficientStats{3, -3, -2});
}

TEST_CASE("stat_maxima") {
  CHECK(stat_maxima(build_tree(1, TreeMode::full)) == SufficientStats{3, 3, 4});
  CHECK(stat_maxima(build_tree(2, TreeMode::full)) == SufficientStats{6, 9, 10});
  CHECK(stat_maxima(build_tree(3, TreeMode::full)) == SufficientStats{12, 21, 22});
  for (int n = 0; n <= 6; ++n) {
    const TreeIndex t = build_tree(n, TreeMode::full);
    CHECK(stat_maxima(t) == sufficient_stats(t, SpinConfig::all_plus(t.vertex_count())));
  }
}

TEST_CASE("statistics agree with the oracle on every configuration") {
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    for (int depth = 0; depth <= 2; ++depth) {
      const TreeIndex t = build_tree(depth, mode);
      const oracle::Tree o = oracle::make_tree(depth, mode);
      const MaskStats fast(t);
      CHECK(fast.edge_count() == oracle::edges(o).size());
      CHECK(fast.pair_count() == oracle::sibling_pairs(o).size());
      const ModelParams p(0.37, -1.3, 1.7);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << t.vertex_count()); ++bits) {
        const SpinConfig c = SpinConfig::from_bits(t.vertex_count(), bits);
        const oracle::Stats want = oracle::stats(o, bits);
        const SufficientStats got = sufficient_stats(t, c);
        CHECK(got.A == want.A);
        CHECK(got.B == want.B);
        CHECK(got.C == want.C);
        CHECK(fast(bits) == got);
        CHECK(hamiltonian(t, p, c) == doctest::Approx(-0.37 * want.A + 1.3 * want.B));
      }
    }
  }
}

TEST_CASE("global flip keeps A and B and negates C") {
  const TreeIndex t = build_tree(3, TreeMode::full);
  const ModelParams p(0.5, -0.25, 3.0);
  for (std::uint64_t bits : {0ull, 1ull, 0x2aaaaull, 0x15555ull, 0x3fffffull, 0x12345ull}) {
    const SpinConfig c = SpinConfig::from_bits(22, bits);
    const SufficientStats a = sufficient_stats(t, c);
    const SufficientStats b = sufficient_stats(t, c.flipped());
    CHECK(a.A == b.A);
    CHECK(a.B == b.B);
    CHECK(a.C == -b.C);
    CHECK(hamiltonian(t, p, c) == hamiltonian(t, p, c.flipped()));
  }
}

TEST_CASE("all-plus minimises H for ferromagnetic couplings") {
  for (int depth = 1; depth <= 2; ++depth) {
    const TreeIndex t = build_tree(depth, TreeMode::full);
    const std::size_t n = t.vertex_count();
    const ModelParams p(0.8, 1.1, 1.0);
    const double ground = hamiltonian(t, p, SpinConfig::all_plus(n));
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      CHECK(hamiltonian(t, p, SpinConfig::from_bits(n, bits)) >= ground);
    }
  }
}

TEST_CASE("MaskStats refuses trees above 64 vertices") {
  CHECK_THROWS(MaskStats(build_tree(5, TreeMode::full)));
  CHECK_NOTHROW(MaskStats(build_tree(4, TreeMode::full)));
}

}  // TEST_SUITE
