#include "cbtree/field_recursion.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cbtree/error.hpp"
#include "cbtree/logspace.hpp"

namespace cbtree {

FieldAssignment::FieldAssignment(std::vector<double> h, RootRule root_rule)
    : h_(std::move(h)), root_rule_(root_rule) {
  for (double v : h_) {
    if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
  }
}

double FieldAssignment::u(Vertex v) const { return std::exp(2.0 * h_[v]); }

double child_to_parent(const ModelParams& params, double h_y, double h_z) {
  const double bj = params.beta_J();
  const double bj1 = params.beta_J1();
  const std::array<double, 4> plus{2 * bj1 + bj + h_y + h_z, -bj - h_y + h_z, -bj + h_y - h_z,
                                   -2 * bj1 + bj - h_y - h_z};
  const std::array<double, 4> minus{-2 * bj1 + bj + h_y + h_z, -bj - h_y + h_z, -bj + h_y - h_z,
                                    2 * bj1 + bj - h_y - h_z};
  return 0.5 * (logsumexp(plus) - logsumexp(minus));
}

double ti_map_log(const ModelParams& params, double h) { return child_to_parent(params, h, h); }

FieldAssignment propagate_inward(const TreeIndex& tree, const ModelParams& params,
                                 std::span<const double> boundary) {
  const int depth = tree.depth();
  const LevelRange outer = tree.level(depth);
  if (boundary.size() != outer.size()) {
    throw InvalidArgument("boundary field has " + std::to_string(boundary.size()) +
                          " values, expected " + std::to_string(outer.size()));
  }
  std::vector<double> h(tree.vertex_count(), 0.0);
  std::copy(boundary.begin(), boundary.end(), h.begin() + outer.first);
  for (int m = depth - 1; m >= 0; --m) {
    const LevelRange lvl = tree.level(m);
    for (Vertex x = lvl.first; x < lvl.last; ++x) {
      const auto kids = tree.children(x);
      h[x] = child_to_parent(params, h[kids[0]], h[kids[1]]);
    }
  }
  RootRule rule = RootRule::two_children;
  if (depth == 0) {
    rule = RootRule::boundary;
  } else if (tree.mode() == TreeMode::full) {
    rule = RootRule::first_two_of_three;
  }
  return FieldAssignment(std::move(h), rule);
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::unique:
      return "unique";
    case Regime::degenerate:
      return "degenerate";
    case Regime::three:
      return "three";
  }
  return "unknown";
}

TIFixedPoints ti_fixed_points(const ModelParams& params) {
  // p = −(1+α) = θ₁² − 2θ₁/θ − 1, scaled by e^{-top} to stay finite.
  const double a = params.log_theta1();
  const double b = params.log_theta();
  const double t1 = 2.0 * a;
  const double t2 = a - b + std::numbers::ln2;
  const double top = std::max({t1, t2, 0.0});
  const double scaled = std::exp(t1 - top) - std::exp(t2 - top) - std::exp(-top);

  TIFixedPoints out;
  if (!(scaled > 0.0)) return out;
  if (top < 700.0) {
    const double p = std::exp(top) * scaled;
    const double disc = (p - 2.0) * (p + 2.0);
    if (std::abs(disc) < kDegeneracyBand) {
      out.regime = Regime::degenerate;
      return out;
    }
    if (p <= 2.0) return out;
  }
  const double log_p = top + std::log(scaled);
  const double inv = 2.0 * std::exp(-log_p);  // 2/p
  const double root = std::sqrt((1.0 - inv) * (1.0 + inv));
  const double log_u3 = log_p + std::log(0.5 * (1.0 + root));
  out.regime = Regime::three;
  out.h3 = 0.5 * log_u3;
  out.h1 = -out.h3;
  out.u3 = std::exp(log_u3);
  out.u1 = std::exp(-log_u3);
  return out;
}

bool phase_predicate(const ModelParams& params) {
  const double a = params.log_theta1();
  if (!(a > 0.5 * std::log(3.0))) return false;
  const double log_gap = 2.0 * a + std::log1p(-3.0 * std::exp(-2.0 * a));  // ln(θ₁² − 3)
  return params.log_theta() > std::numbers::ln2 + a - log_gap;
}

double critical_theta(double theta1) { return 2.0 * theta1 / (theta1 * theta1 - 3.0); }

std::vector<CriticalPoint> critical_curve(std::span<const double> theta1_grid) {
  const double floor = std::sqrt(3.0) * (1.0 + kPoleGuard);
  std::vector<CriticalPoint> out;
  out.reserve(theta1_grid.size());
  for (double t1 : theta1_grid) {
    if (!std::isfinite(t1) || !(t1 > floor)) {
      throw InvalidArgument("critical_curve: theta1 = " + std::to_string(t1) +
                            " is not above sqrt(3) beyond the pole guard");
    }
    const double tc = critical_theta(t1);
    out.push_back({t1, tc, 0.5 * std::log(t1), 0.5 * std::log(tc)});
  }
  return out;
}

double vertex_map_u(const ModelParams& params, double u_y, double u_z) {
  return std::exp(2.0 * child_to_parent(params, 0.5 * std::log(u_y), 0.5 * std::log(u_z)));
}

bool interval_check(const ModelParams& params, int grid_size) {
  const TIFixedPoints fp = ti_fixed_points(params);
  if (fp.regime != Regime::three) {
    throw InvalidArgument("interval_check requires the three-solution regime");
  }
  if (grid_size < 2) throw InvalidArgument("interval_check needs grid_size >= 2");
  constexpr double kSlack = 1e-12;
  const double lo = fp.u1 * (1.0 - kSlack);
  const double hi = fp.u3 * (1.0 + kSlack);
  const double step = (fp.u3 - fp.u1) / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) {
    const double uy = i + 1 == grid_size ? fp.u3 : fp.u1 + step * i;
    for (int j = 0; j < grid_size; ++j) {
      const double uz = j + 1 == grid_size ? fp.u3 : fp.u1 + step * j;
      const double ux = vertex_map_u(params, uy, uz);
      if (!(ux >= lo && ux <= hi)) return false;
    }
  }
  return true;
}

IterationResult iterate_ti_map(const ModelParams& params, double u0, double tol, int max_iter) {
  if (!(u0 > 0.0) || !std::isfinite(u0)) throw InvalidArgument("iterate_ti_map: u0 must be > 0");
  double h = 0.5 * std::log(u0);
  double u = u0;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const double h_next = ti_map_log(params, h);
    const double u_next = std::exp(2.0 * h_next);
    const double step = std::abs(u_next - u);
    // Remaining error of a linearly converging sequence is about
    // step·r/(1−r) with r the observed contraction ratio.
    const double ratio = step / last_step;
    const double tail = ratio < 1.0 ? step * ratio / (1.0 - ratio) : step;
    if (step < tol && tail < tol) return {u_next, it, true};
    h = h_next;
    u = u_next;
    last_step = step;
  }
  return {u, max_iter, false};
}

}  // namespace cbtree
