#pragma once

// Low-temperature behaviour of the two ordered translation-invariant
// measures and the combinatorial inequality B(σ) − A(σ) ≤ B − A used to
// bound their deviation from the ground states.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cbtree/field_recursion.hpp"
#include "cbtree/model.hpp"
#include "cbtree/topology.hpp"

namespace cbtree {

/// Single-site probability of spin +1 under a translation-invariant branch:
/// u/(u+1).
double root_magnetization(double u);

/// Same quantity from the log-field h = ½ ln u; exact for any finite h.
double root_magnetization_from_field(double h);

struct GroundScanRow {
  double beta = 0.0;
  Regime regime = Regime::unique;
  double u1 = 1.0;
  double u3 = 1.0;
  /// μ₃(σ₊|V_N) and μ₁(σ₋|V_N); empty outside the three-solution regime.
  std::optional<double> mass_plus;
  std::optional<double> mass_minus;
  double root_prob = 0.5;  // u₃/(u₃+1)
};

/// One row per β. Masses come from exact enumeration of `tree` (depth cap
/// of the exact oracle applies) with the boundary fields of the u₃* and u₁*
/// branches.
std::vector<GroundScanRow> ground_state_scan(double J, double J1,
                                             std::span<const double> beta_grid,
                                             const TreeIndex& tree);

/// True if mass_plus never decreases by more than `slack` between
/// consecutive in-regime rows.
bool mass_plus_monotone(std::span<const GroundScanRow> rows, double slack = 1e-9);

struct BoundInequalityReport {
  TreeMode mode = TreeMode::full;
  int depth = 0;
  std::int64_t bound = 0;  // B − A of the all-plus configuration

  std::uint64_t configs_checked = 0;
  std::uint64_t config_violations = 0;
  std::int64_t max_excess = 0;  // max over σ of (B(σ) − A(σ)) − (B − A)
  std::optional<SpinConfig> config_witness;  // lowest-index violating σ

  bool subsets_run = false;
  std::uint64_t subsets_checked = 0;
  std::uint64_t subset_violations = 0;  // connected K with |∂²K| > |∂K|
  std::optional<VertexSet> subset_witness;

  std::uint64_t total_violations() const { return config_violations + subset_violations; }
};

/// Exhaustive check of B(σ) − A(σ) ≤ B − A over every configuration and of
/// |∂²K| ≤ |∂K| over every connected subset (the latter only up to the
/// subset enumeration depth cap).
BoundInequalityReport bound_inequality_exhaustive(const TreeIndex& tree);

}  // namespace cbtree
