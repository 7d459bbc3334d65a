#include "cbtree/ground_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbtree/error.hpp"
#include "cbtree/exact_oracle.hpp"
#include "cbtree/parallel.hpp"

namespace cbtree {

double root_magnetization(double u) {
  if (!(u > 0.0)) throw InvalidArgument("root_magnetization: u must be > 0");
  if (std::isinf(u)) return 1.0;
  return u / (u + 1.0);
}

double root_magnetization_from_field(double h) { return 1.0 / (1.0 + std::exp(-2.0 * h)); }

std::vector<GroundScanRow> ground_state_scan(double J, double J1,
                                             std::span<const double> beta_grid,
                                             const TreeIndex& tree) {
  require_enumerable(tree);
  std::vector<GroundScanRow> rows;
  rows.reserve(beta_grid.size());
  const std::size_t outer = tree.level(tree.depth()).size();
  for (double beta : beta_grid) {
    const ModelParams params(J, J1, beta);
    const TIFixedPoints fp = ti_fixed_points(params);
    GroundScanRow row;
    row.beta = beta;
    row.regime = fp.regime;
    row.u1 = fp.u1;
    row.u3 = fp.u3;
    row.root_prob = root_magnetization_from_field(fp.h3);
    if (fp.regime == Regime::three) {
      auto mass = [&](double h) {
        const FieldAssignment f = propagate_inward(tree, params, std::vector<double>(outer, h));
        return plus_minus_mass(tree, params, BoundaryField::from_fields(tree, f));
      };
      row.mass_plus = mass(fp.h3).plus;
      row.mass_minus = mass(fp.h1).minus;
    }
    rows.push_back(row);
  }
  return rows;
}

bool mass_plus_monotone(std::span<const GroundScanRow> rows, double slack) {
  std::optional<double> previous;
  for (const GroundScanRow& row : rows) {
    if (!row.mass_plus) continue;
    if (previous && *row.mass_plus < *previous - slack) return false;
    previous = row.mass_plus;
  }
  return true;
}

BoundInequalityReport bound_inequality_exhaustive(const TreeIndex& tree) {
  require_enumerable(tree);
  const MaskStats stats(tree);
  BoundInequalityReport report;
  report.mode = tree.mode();
  report.depth = tree.depth();
  report.bound = static_cast<std::int64_t>(stats.edge_count()) -
                 static_cast<std::int64_t>(stats.pair_count());

  struct ChunkResult {
    std::uint64_t violations = 0;
    std::int64_t max_excess = std::numeric_limits<std::int64_t>::min();
    std::uint64_t first_witness = std::numeric_limits<std::uint64_t>::max();
  };
  const std::uint64_t count = std::uint64_t{1} << stats.vertex_count();
  const std::uint64_t chunk = std::min<std::uint64_t>(count, 1u << 14);
  const std::uint64_t chunks = count / chunk;
  std::vector<ChunkResult> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    ChunkResult& r = parts[c];
    for (std::uint64_t bits = c * chunk; bits < (c + 1) * chunk; ++bits) {
      const SufficientStats s = stats(bits);
      const std::int64_t excess = (s.B - s.A) - report.bound;
      r.max_excess = std::max(r.max_excess, excess);
      if (excess > 0) {
        ++r.violations;
        r.first_witness = std::min(r.first_witness, bits);
      }
    }
  });
  std::uint64_t witness = std::numeric_limits<std::uint64_t>::max();
  report.max_excess = std::numeric_limits<std::int64_t>::min();
  for (const ChunkResult& r : parts) {
    report.config_violations += r.violations;
    report.max_excess = std::max(report.max_excess, r.max_excess);
    witness = std::min(witness, r.first_witness);
  }
  report.configs_checked = count;
  if (report.config_violations > 0) {
    report.config_witness = SpinConfig::from_bits(stats.vertex_count(), witness);
  }

  if (tree.depth() <= kSubsetDepthCap) {
    report.subsets_run = true;
    for_each_connected_subset(tree, std::numeric_limits<std::size_t>::max(),
                              [&](const VertexSet& k) {
                                ++report.subsets_checked;
                                const BoundarySets b = boundary_sets(tree, k);
                                if (b.sibling.size() > b.outer.size()) {
                                  if (!report.subset_witness) report.subset_witness = k;
                                  ++report.subset_violations;
                                }
                              });
  }
  return report;
}

}  // namespace cbtree
