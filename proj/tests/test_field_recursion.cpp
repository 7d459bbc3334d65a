#include <doctest.h>

#include <cmath>
#include <random>

#include "cbtree/error.hpp"
#include "cbtree/field_recursion.hpp"
#include "oracles.hpp"

using namespace cbtree;

namespace {

const ModelParams kTheta = ModelParams::from_theta(5.0, 2.0);

}  // namespace

TEST_SUITE("field_recursion") {

TEST_CASE("child_to_parent matches the rational theta form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coup(-3, 3), field(-4, 4);
  for (int i = 0; i < 500; ++i) {
    const double bj = coup(rng), bj1 = coup(rng), hy = field(rng), hz = field(rng);
    const ModelParams p(bj, bj1, 1.0);
    const double u = oracle::theta_map(std::exp(2 * bj), std::exp(2 * bj1), std::exp(2 * hy),
                                       std::exp(2 * hz));
    CHECK(child_to_parent(p, hy, hz) == doctest::Approx(0.5 * std::log(u)).epsilon(1e-12));
    CHECK(vertex_map_u(p, std::exp(2 * hy), std::exp(2 * hz)) == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("child_to_parent symmetries") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-10, 10);
  for (int i = 0; i < 500; ++i) {
    const ModelParams p(dist(rng), dist(rng), 1.0);
    const double hy = dist(rng), hz = dist(rng);
    CHECK(child_to_parent(p, hy, hz) == doctest::Approx(-child_to_parent(p, -hy, -hz)).epsilon(1e-12));
    CHECK(child_to_parent(p, hy, hz) == doctest::Approx(child_to_parent(p, hz, hy)).epsilon(1e-12));
  }
  CHECK(child_to_parent(ModelParams(0.7, -1.2, 2.0), 0, 0) == 0.0);
}

TEST_CASE("child_to_parent stays finite where the theta form overflows") {
  const ModelParams p(1.0, 1.0, 500.0);
  const double h = child_to_parent(p, 1000.0, 1000.0);
  CHECK(std::isfinite(h));
  // Leading order: the plus side wins by 2βJ₁ on both children.
  CHECK(h == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(ti_map_log(p, 1000.0) == h);
}

TEST_CASE("fixed point is reproduced by the recursion") {
  const TIFixedPoints fp = ti_fixed_points(kTheta);
  REQUIRE(fp.regime == Regime::three);
  CHECK(child_to_parent(kTheta, fp.h3, fp.h3) == doctest::Approx(fp.h3).epsilon(1e-12));
  CHECK(child_to_parent(kTheta, fp.h1, fp.h1) == doctest::Approx(fp.h1).epsilon(1e-12));
}

TEST_CASE("ti_fixed_points examples") {
  const TIFixedPoints fp = ti_fixed_points(kTheta);
  CHECK(fp.regime == Regime::three);
  CHECK(fp.root_count() == 3);
  const auto roots = oracle::quadratic_roots(5.0, 2.0);
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(fp.u1 - roots[0]) < 1e-7);
  CHECK(std::abs(fp.u3 - roots[1]) < 1e-7);
  CHECK(std::abs(fp.u1 - 0.6417424) < 1e-7);
  CHECK(std::abs(fp.u3 - 1.5582576) < 1e-7);
  CHECK(fp.u2 == 1.0);
  CHECK(std::abs(fp.u1 * fp.u3 - 1.0) < 1e-12);
  CHECK(std::abs(oracle::theta_map(5, 2, fp.u3, fp.u3) - fp.u3) / fp.u3 < 1e-10);
  CHECK(std::abs(oracle::theta_map(5, 2, fp.u1, fp.u1) - fp.u1) / fp.u1 < 1e-10);
  CHECK(fp.h3 == doctest::Approx(0.5 * std::log(fp.u3)));
  CHECK(fp.h1 == -fp.h3);

  const TIFixedPoints deg = ti_fixed_points(ModelParams::from_theta(4.0, 2.0));
  CHECK(deg.regime == Regime::degenerate);
  CHECK(deg.u1 == 1.0);
  CHECK(deg.u3 == 1.0);

  for (double theta : {0.1, 1.0, 5.0, 100.0, 1e6}) {
    const TIFixedPoints u = ti_fixed_points(ModelParams::from_theta(theta, 1.5));
    CHECK(u.regime == Regime::unique);
    CHECK(u.u1 == 1.0);
    CHECK(u.u3 == 1.0);
    CHECK(u.root_count() == 1);
  }
  CHECK(to_string(Regime::three) == "three");
  CHECK(to_string(Regime::unique) == "unique");
  CHECK(to_string(Regime::degenerate) == "degenerate");
}

TEST_CASE("ti_fixed_points against the quadratic oracle on random points") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> t1d(0.5, 6), td(0.05, 50);
  int three = 0;
  for (int i = 0; i < 2000; ++i) {
    const double theta1 = t1d(rng), theta = td(rng);
    const TIFixedPoints fp = ti_fixed_points(ModelParams::from_theta(theta, theta1));
    const auto roots = oracle::quadratic_roots(theta, theta1);
    const double p = theta1 * theta1 - 2 * theta1 / theta - 1;
    if (std::abs(p - 2) < 1e-9) continue;
    CHECK(roots.empty() == (fp.regime != Regime::three));
    if (!roots.empty()) {
      ++three;
      CHECK(fp.u1 == doctest::Approx(roots[0]).epsilon(1e-10));
      CHECK(fp.u3 == doctest::Approx(roots[1]).epsilon(1e-10));
      CHECK(std::abs(fp.u1 * fp.u3 - 1) < 1e-12);
      CHECK(std::abs(oracle::theta_map(theta, theta1, fp.u3, fp.u3) - fp.u3) / fp.u3 < 1e-10);
    }
  }
  CHECK(three > 100);
}

TEST_CASE("ti_fixed_points at very low temperature") {
  const TIFixedPoints fp = ti_fixed_points(ModelParams(1, 1, 400));
  CHECK(fp.regime == Regime::three);
  CHECK(std::isfinite(fp.h3));
  CHECK(fp.h3 / 400 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fp.h1 == -fp.h3);
}

TEST_CASE("phase_predicate") {
  CHECK(phase_predicate(kTheta));
  CHECK_FALSE(phase_predicate(ModelParams::from_theta(5.0, std::sqrt(3.0))));
  CHECK_FALSE(phase_predicate(ModelParams::from_theta(3.9, 2.0)));
  CHECK_FALSE(phase_predicate(ModelParams::from_theta(100.0, 1.5)));
  CHECK(phase_predicate(ModelParams::from_theta(4.0 + 1e-6, 2.0)));
}

TEST_CASE("phase_predicate agrees with the regime off the curve") {
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const double theta1 = 1.2 + (4.0 - 1.2) * i / 99.0;
    for (int j = 0; j < 100; ++j) {
      const double theta = 0.5 + (8.0 - 0.5) * j / 99.0;
      if (theta1 > std::sqrt(3.0) && std::abs(theta - critical_theta(theta1)) <= 1e-6) continue;
      const ModelParams p = ModelParams::from_theta(theta, theta1);
      CHECK(phase_predicate(p) == (ti_fixed_points(p).regime == Regime::three));
      ++checked;
    }
  }
  CHECK(checked >= 9900);
}

TEST_CASE("critical_curve") {
  const std::vector<double> grid{2.0, 3.0, 10.0, 1e6};
  const auto curve = critical_curve(grid);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].theta_c == doctest::Approx(4.0));
  CHECK(curve[0].beta_J1 == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(curve[0].beta_J == doctest::Approx(0.5 * std::log(4.0)));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].theta_c < curve[i - 1].theta_c);
  CHECK(curve[3].theta_c > 0.0);
  CHECK(curve[3].theta_c < 1e-5);
  const std::vector<double> pole{std::sqrt(3.0) + 1e-15};
  CHECK_THROWS_AS(critical_curve(pole), InvalidArgument);
  const std::vector<double> below{1.5};
  CHECK_THROWS_AS(critical_curve(below), InvalidArgument);
  // Points on the curve are degenerate.
  for (const CriticalPoint& c : curve) {
    if (c.theta1 > 5) continue;
    CHECK(ti_fixed_points(ModelParams::from_theta(c.theta_c, c.theta1)).regime == Regime::degenerate);
  }
}

TEST_CASE("interval_check") {
  CHECK(interval_check(kTheta, 64));
  const TIFixedPoints fp = ti_fixed_points(kTheta);
  CHECK(vertex_map_u(kTheta, fp.u1, fp.u1) == doctest::Approx(fp.u1).epsilon(1e-12));
  CHECK(vertex_map_u(kTheta, fp.u3, fp.u3) == doctest::Approx(fp.u3).epsilon(1e-12));
  CHECK(vertex_map_u(kTheta, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(interval_check(ModelParams::from_theta(20.0, 3.0), 32));
  CHECK_THROWS_AS(interval_check(ModelParams::from_theta(5.0, 1.5), 8), InvalidArgument);
  CHECK_THROWS_AS(interval_check(kTheta, 1), InvalidArgument);
}

TEST_CASE("propagate_inward") {
  const TIFixedPoints fp = ti_fixed_points(kTheta);
  for (TreeMode mode : {TreeMode::full, TreeMode::half}) {
    const TreeIndex t = build_tree(4, mode);
    const std::size_t outer = t.level(4).size();
    const FieldAssignment f = propagate_inward(t, kTheta, std::vector<double>(outer, fp.h3));
    for (double h : f.values()) CHECK(h == doctest::Approx(fp.h3).epsilon(1e-12));
    const FieldAssignment z = propagate_inward(t, kTheta, std::vector<double>(outer, 0.0));
    for (double h : z.values()) CHECK(h == 0.0);
    CHECK(f.root_rule() == (mode == TreeMode::full ? RootRule::first_two_of_three : RootRule::two_children));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> in(fp.h1, fp.h3);
    std::vector<double> boundary(outer);
    for (double& x : boundary) x = in(rng);
    const FieldAssignment r = propagate_inward(t, kTheta, boundary);
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      CHECK(r.h(v) >= fp.h1 - 1e-12);
      CHECK(r.h(v) <= fp.h3 + 1e-12);
      CHECK(r.u(v) == doctest::Approx(std::exp(2 * r.h(v))));
      if (t.level_of(v) < 4) {
        const auto kids = t.children(v);
        CHECK(r.h(v) == child_to_parent(kTheta, r.h(kids[0]), r.h(kids[1])));
      }
    }
  }
  const TreeIndex t0 = build_tree(0, TreeMode::full);
  CHECK(propagate_inward(t0, kTheta, std::vector<double>{0.3}).root_rule() == RootRule::boundary);
  CHECK_THROWS_AS(propagate_inward(build_tree(2, TreeMode::full), kTheta, std::vector<double>(5, 0.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(FieldAssignment(std::vector<double>{0.0, std::nan("")}), InvalidArgument);
}

TEST_CASE("iterate_ti_map") {
  const TIFixedPoints fp = ti_fixed_points(kTheta);
  const double tol = 1e-12;
  const IterationResult r = iterate_ti_map(kTheta, 1.2, tol, 100000);
  CHECK(r.converged);
  CHECK(std::abs(r.u_limit - fp.u3) < 10 * tol);
  const IterationResult low = iterate_ti_map(kTheta, 0.8, tol, 100000);
  CHECK(low.converged);
  CHECK(std::abs(low.u_limit - fp.u1) < 10 * tol);

  const ModelParams unique = ModelParams::from_theta(5.0, 1.5);
  const IterationResult u = iterate_ti_map(unique, 7.0, tol, 100000);
  CHECK(u.converged);
  CHECK(std::abs(u.u_limit - 1.0) < 10 * tol);

  const IterationResult one = iterate_ti_map(kTheta, 1.0, tol, 10);
  CHECK(one.converged);
  CHECK(one.u_limit == 1.0);

  const IterationResult capped = iterate_ti_map(kTheta, 1.2, tol, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
  CHECK_THROWS_AS(iterate_ti_map(kTheta, 0.0, tol, 10), InvalidArgument);
  CHECK_THROWS_AS(iterate_ti_map(kTheta, -1.0, tol, 10), InvalidArgument);
}

}  // TEST_SUITE
