#pragma once

// Boundary-field recursion, translation-invariant fixed points and the
// phase-transition curve. All recursion arithmetic runs on log-fields
// h = ½ ln u so that large βJ, βJ₁ never overflow.

#include <span>
#include <string_view>
#include <vector>

#include "cbtree/model.hpp"
#include "cbtree/topology.hpp"

namespace cbtree {

/// How the root field of a propagated assignment was obtained.
enum class RootRule {
  two_children,       // root has exactly two children (half tree)
  first_two_of_three,  // full tree: two-child formula on the first two children by id
  boundary,            // depth-0 tree: the root is the boundary
};

/// Log-fields h_x on every vertex of a tree; u_x = e^{2h_x}.
class FieldAssignment {
 public:
  explicit FieldAssignment(std::vector<double> h, RootRule root_rule = RootRule::two_children);

  std::size_t size() const { return h_.size(); }
  double h(Vertex v) const { return h_[v]; }
  double u(Vertex v) const;
  std::span<const double> values() const { return h_; }
  std::vector<double>& mutable_values() { return h_; }
  RootRule root_rule() const { return root_rule_; }

 private:
  std::vector<double> h_;
  RootRule root_rule_;
};

/// h_x from the fields of the two children of x:
/// h_x = ½ (LSE(E₊) − LSE(E₋)) with E₊ the four exponents of W₁ and E₋ the
/// J₁-sign-flipped set.
double child_to_parent(const ModelParams& params, double h_y, double h_z);

/// Translation-invariant map h ↦ child_to_parent(h, h).
double ti_map_log(const ModelParams& params, double h);

/// Fills interior fields level by level from boundary values on W_depth
/// (given in vertex-id order). On a full tree the root gets the two-child
/// formula applied to its first two children and is flagged accordingly.
FieldAssignment propagate_inward(const TreeIndex& tree, const ModelParams& params,
                                 std::span<const double> boundary);

enum class Regime { unique, degenerate, three };

std::string_view to_string(Regime regime);

/// Translation-invariant solutions u₁ ≤ u₂ = 1 ≤ u₃ together with their
/// log-fields. For very large β the u-values may overflow to inf/0 while the
/// log-fields stay exact.
struct TIFixedPoints {
  Regime regime = Regime::unique;
  double u1 = 1.0;
  double u2 = 1.0;
  double u3 = 1.0;
  double h1 = 0.0;
  double h3 = 0.0;

  std::size_t root_count() const { return regime == Regime::three ? 3 : 1; }
};

/// Discriminant band inside which the regime is reported as degenerate.
inline constexpr double kDegeneracyBand = 1e-12;

/// Solves u² + (1+α)u + 1 = 0 in closed form and appends u = 1.
TIFixedPoints ti_fixed_points(const ModelParams& params);

/// θ₁ > √3 and θ > 2θ₁/(θ₁² − 3), evaluated without overflow.
bool phase_predicate(const ModelParams& params);

/// θ_c = 2θ₁/(θ₁² − 3).
double critical_theta(double theta1);

struct CriticalPoint {
  double theta1;
  double theta_c;
  double beta_J1;  // ½ ln θ₁
  double beta_J;   // ½ ln θ_c
};

/// Relative distance from √3 below which a grid point counts as the pole.
inline constexpr double kPoleGuard = 1e-9;

/// Throws InvalidArgument for any grid point not above √3·(1 + kPoleGuard).
std::vector<CriticalPoint> critical_curve(std::span<const double> theta1_grid);

/// One step of the vertex map on u-values (θ-form written in log space).
double vertex_map_u(const ModelParams& params, double u_y, double u_z);

/// Checks that the vertex map sends an m×m grid over [u₁*, u₃*]² back into
/// [u₁*, u₃*]. Throws InvalidArgument outside the three-phase regime.
bool interval_check(const ModelParams& params, int grid_size);

struct IterationResult {
  double u_limit;
  int iterations;
  bool converged;
};

/// Fixed-point iteration of the translation-invariant map from u0, stopping
/// once successive iterates differ by less than `tol` in u.
IterationResult iterate_ti_map(const ModelParams& params, double u0, double tol, int max_iter);

}  // namespace cbtree
