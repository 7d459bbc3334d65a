#include "cbtree/free_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cbtree/error.hpp"
#include "cbtree/logspace.hpp"

namespace cbtree {

namespace {

constexpr std::array<double, 3> kDefaultBetaSamples{10.0, 20.0, 50.0};

// Σ_{m=1}^{n−1} |W_m|.
double interior_vertex_count(int depth, TreeMode mode) {
  if (depth < 2) return 0.0;
  const double top = std::ldexp(1.0, depth - 1);  // 2^{n−1}
  return mode == TreeMode::full ? 3.0 * (top - 1.0) : 2.0 * top - 2.0;
}

}  // namespace

double ln2cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

double d_kernel(double b, double x) { return 0.25 * (ln2cosh(x - b) + ln2cosh(x + b)); }

double delta_kernel(double b, double x, double y) {
  return 0.5 * (ln2cosh(x - b) + ln2cosh(y + b));
}

double f_kernel(double x, const ModelParams& params) {
  const double bj = params.beta_J();
  return 0.5 * (ln2cosh(x + bj) - ln2cosh(x - bj));
}

WSums w_sums(const ModelParams& params, double h_y, double h_z) {
  const double bj = params.beta_J();
  const double bj1 = params.beta_J1();
  const std::array<double, 4> plus{2 * bj1 + bj + h_y + h_z, -bj - h_y + h_z, -bj + h_y - h_z,
                                   -2 * bj1 + bj - h_y - h_z};
  const std::array<double, 4> minus{-2 * bj1 + bj + h_y + h_z, -bj - h_y + h_z, -bj + h_y - h_z,
                                    2 * bj1 + bj - h_y - h_z};
  return {logsumexp(plus), logsumexp(minus)};
}

double D_factor(const ModelParams& params, double h_y, double h_z) {
  const double bj = params.beta_J();
  const double bj1 = params.beta_J1();
  return d_kernel(bj, bj1 + h_z) + d_kernel(bj, -bj1 + h_z) +
         delta_kernel(bj1, h_y + f_kernel(-bj1 + h_z, params), h_y + f_kernel(bj1 + h_z, params));
}

double log_partition_base(TreeMode mode, const ModelParams& params,
                          std::span<const double> level1) {
  const std::size_t k = mode == TreeMode::full ? 3 : 2;
  if (level1.size() != k) throw InvalidArgument("log_partition_base: wrong number of W1 fields");
  const double bj = params.beta_J();
  const double bj1 = params.beta_J1();
  std::vector<double> terms;
  terms.reserve(std::size_t{2} << k);
  for (int root : {1, -1}) {
    for (unsigned bits = 0; bits < (1u << k); ++bits) {
      double w = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const int si = (bits >> i) & 1u ? 1 : -1;
        w += bj1 * root * si + level1[i] * si;
        for (std::size_t j = i + 1; j < k; ++j) {
          const int sj = (bits >> j) & 1u ? 1 : -1;
          w += bj * si * sj;
        }
      }
      terms.push_back(w);
    }
  }
  return logsumexp(terms);
}

double log_partition_recursive(const TreeIndex& tree, const ModelParams& params,
                               const FieldAssignment& fields) {
  if (fields.size() != tree.vertex_count()) {
    throw InvalidArgument("field assignment size does not match tree");
  }
  if (tree.depth() == 0) return ln2cosh(fields.h(0));
  const auto h = fields.values();
  const LevelRange w1 = tree.level(1);
  double log_z = log_partition_base(tree.mode(), params, h.subspan(w1.first, w1.size()));
  for (int m = 1; m < tree.depth(); ++m) {
    const LevelRange lvl = tree.level(m);
    for (Vertex x = lvl.first; x < lvl.last; ++x) {
      const auto kids = tree.children(x);
      log_z += D_factor(params, h[kids[0]], h[kids[1]]);
    }
  }
  return log_z;
}

double log_partition_ti(int depth, TreeMode mode, const ModelParams& params, double h) {
  if (depth < 0) throw InvalidArgument("depth must be non-negative");
  if (depth == 0) return ln2cosh(h);
  const std::vector<double> level1(mode == TreeMode::full ? 3 : 2, h);
  return log_partition_base(mode, params, level1) +
         interior_vertex_count(depth, mode) * D_factor(params, h, h);
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::minus:
      return "u1";
    case Branch::symmetric:
      return "u2";
    case Branch::plus:
      return "u3";
  }
  return "unknown";
}

double branch_field(const ModelParams& params, Branch branch) {
  if (branch == Branch::symmetric) return 0.0;
  const TIFixedPoints fp = ti_fixed_points(params);
  if (fp.regime != Regime::three) {
    throw InvalidArgument("branch " + std::string(to_string(branch)) +
                          " does not exist outside the three-solution regime");
  }
  return branch == Branch::plus ? fp.h3 : fp.h1;
}

FreeEnergyReport free_energy(const ModelParams& params, Branch branch, int n_max) {
  if (n_max < 2) throw InvalidArgument("free_energy needs n_max >= 2");
  if (n_max > 60) throw CapExceeded("free_energy supports n_max <= 60");
  FreeEnergyReport r;
  r.branch = branch;
  r.h = branch_field(params, branch);
  const double d = D_factor(params, r.h, r.h);
  const double beta = params.beta();
  r.display_value = d;
  r.f_analytic = -d / (2.0 * beta);

  for (int m = 1; m < n_max; ++m) {
    r.level_contributions.push_back(3.0 * std::ldexp(1.0, m - 1) * d);
  }
  for (int n = 1; n <= n_max; ++n) {
    const double lz = log_partition_ti(n, TreeMode::full, params, r.h);
    r.log_z.push_back(lz);
    r.f_n.push_back(-lz / (3.0 * std::ldexp(1.0, n) * beta));
  }
  const double last = r.f_n.back();
  const double prev = r.f_n[r.f_n.size() - 2];
  r.f_extrapolated = 2.0 * last - prev;
  for (int n = 1; n <= n_max; ++n) {
    r.cauchy_constant = std::max(
        r.cauchy_constant, std::ldexp(std::abs(r.f_n[n - 1] - r.f_extrapolated), n));
  }
  const double scale = std::max(1.0, std::abs(r.f_analytic));
  r.converged = std::abs(last - prev) <= 1e-8 * scale &&
                std::abs(r.f_extrapolated - r.f_analytic) <= 1e-10 * scale;
  return r;
}

double slope_M(double J, double J1) {
  return 0.5 * std::max({2.0 * (J1 - J), 3.0 * J1 - J, 4.0 * J1, J1 - J, 0.0});
}

AsymptoteResult f_infinity(double J, double J1, std::span<const double> beta_samples) {
  if (!(J1 > 0.0) || !(J + J1 > 0.0)) {
    throw InvalidArgument("f_infinity requires J1 > 0 and J + J1 > 0");
  }
  if (beta_samples.empty()) beta_samples = kDefaultBetaSamples;
  if (beta_samples.size() < 2) throw InvalidArgument("f_infinity needs at least two samples");
  if (!std::is_sorted(beta_samples.begin(), beta_samples.end()) ||
      std::adjacent_find(beta_samples.begin(), beta_samples.end()) != beta_samples.end()) {
    throw InvalidArgument("f_infinity: beta samples must be strictly increasing");
  }

  AsymptoteResult r;
  r.M = slope_M(J, J1);
  r.method = AsymptoteMethod::numeric_limit;
  for (double beta : beta_samples) {
    const ModelParams p(J, J1, beta);
    const double h = branch_field(p, Branch::plus);
    r.samples.emplace_back(beta, -D_factor(p, h, h) / (2.0 * beta));
  }
  // βF(β) is affine in β up to exponentially small terms.
  auto extrapolate = [&](std::size_t i) {
    const auto [b1, f1] = r.samples[i - 1];
    const auto [b2, f2] = r.samples[i];
    return (b2 * f2 - b1 * f1) / (b2 - b1);
  };
  const std::size_t k = r.samples.size() - 1;
  r.F_infinity = extrapolate(k);
  r.stability_gap = k >= 2 ? std::abs(r.F_infinity - extrapolate(k - 1))
                           : std::abs(r.samples[k].second - r.samples[k - 1].second);
  r.stable = r.stability_gap < kAsymptoteStability;
  return r;
}

AsymptoteResult f_infinity_closed_form(double J, double J1, ClosedFormVariant variant) {
  AsymptoteResult r;
  r.method = AsymptoteMethod::closed_form_experimental;
  r.M = slope_M(J, J1);
  const double M = r.M;
  double total = 0.0;
  for (double delta : {1.0, -1.0}) {
    // Verbatim: the summand carries βJ and no ε, so the ε-weighted sum is
    // |X|·(+1) + |X|·(−1) = 0 for every β.
    double inner = 0.0;
    if (variant != ClosedFormVariant::verbatim) {
      for (double eps : {1.0, -1.0}) inner += eps * std::abs(delta * J1 + eps * J + M);
    }
    // ½·inner is the slope of f(δβJ₁ + Mβ); the printed form subtracts it.
    const double f_slope = variant == ClosedFormVariant::sign_corrected ? 0.5 * inner : -0.5 * inner;
    total += 0.5 * std::abs(delta * J1 + M + f_slope);
    for (double eps : {1.0, -1.0}) total += 0.25 * std::abs(J1 + eps * J + delta * M);
  }
  r.display_scale_value = total;
  r.F_infinity = -0.5 * total;
  r.stable = true;
  return r;
}

}  // namespace cbtree
