#pragma once

// Free energy through the per-level factor D = ln a(x):
//   Z_n = exp(Σ_{x∈W_{n−1}} D(h_y, h_z)) · Z_{n−1},
//   F   = −lim_n ln Z_n / (3β·2ⁿ).
// Every β-dependent quantity goes through ln2cosh, so β of several hundred
// times 1/|J| is still representable.

#include <span>
#include <utility>
#include <vector>

#include "cbtree/field_recursion.hpp"
#include "cbtree/model.hpp"
#include "cbtree/topology.hpp"

namespace cbtree {

/// ln(2 cosh x) = |x| + log1p(e^{−2|x|}).
double ln2cosh(double x);

/// d_b(x) = ¼ ln[4 cosh(x−b) cosh(x+b)].
double d_kernel(double b, double x);

/// Δ_b(x, y) = ½ ln[4 cosh(x−b) cosh(y+b)].
double delta_kernel(double b, double x, double y);

/// f(x) = atanh(tanh(βJ) tanh x), evaluated as ½[ln2cosh(x+βJ) − ln2cosh(x−βJ)].
double f_kernel(double x, const ModelParams& params);

/// Logs of the two four-term sums over the children's spins with the parent
/// spin fixed to +1 and −1.
struct WSums {
  double log_plus;   // ln W₁
  double log_minus;  // ln W₋₁
};

WSums w_sums(const ModelParams& params, double h_y, double h_z);

/// D(J₁, J, h_y, h_z) = d_{βJ}(βJ₁+h_z) + d_{βJ}(−βJ₁+h_z)
///                    + Δ_{βJ₁}(h_y + f(−βJ₁+h_z), h_y + f(βJ₁+h_z)).
/// Equals ln a(x) = ½(ln W₁ + ln W₋₁).
double D_factor(const ModelParams& params, double h_y, double h_z);

/// ln Z₁ by direct enumeration of the root and its children, with `level1`
/// the fields on W₁ (3 values on a full tree, 2 on a half tree).
double log_partition_base(TreeMode mode, const ModelParams& params,
                          std::span<const double> level1);

/// ln Z_N = ln Z₁ + Σ_{m=1}^{N−1} Σ_{x∈W_m} D(h_{y(x)}, h_{z(x)}). The fields
/// must satisfy the child-to-parent recursion on levels 1..N−1 (e.g. from
/// propagate_inward); the root value is not used.
double log_partition_recursive(const TreeIndex& tree, const ModelParams& params,
                               const FieldAssignment& fields);

/// Same recursion for a constant field h on a tree of the given depth, using
/// level sizes instead of an explicit tree; valid for any depth.
double log_partition_ti(int depth, TreeMode mode, const ModelParams& params, double h);

/// Translation-invariant solution used as boundary condition.
enum class Branch {
  minus,      // u₁*
  symmetric,  // u₂* = 1
  plus,       // u₃*
};

std::string_view to_string(Branch branch);

/// Log-field of a branch; throws InvalidArgument when the branch does not
/// exist at these parameters.
double branch_field(const ModelParams& params, Branch branch);

struct FreeEnergyReport {
  Branch branch = Branch::symmetric;
  double h = 0.0;
  /// D(h, h). The closed-form display of the free energy reports this
  /// number directly; the definition above gives F = −D/(2β).
  double display_value = 0.0;
  std::vector<double> level_contributions;  // |W_m|·D for m = 1..n_max−1
  std::vector<double> log_z;                // ln Z_n for n = 1..n_max
  std::vector<double> f_n;                  // −ln Z_n/(3β·2ⁿ)
  double f_extrapolated = 0.0;              // 2F_{n_max} − F_{n_max−1}
  double f_analytic = 0.0;                  // −D/(2β)
  double cauchy_constant = 0.0;             // max_n 2ⁿ |F_n − F_extrapolated|
  bool converged = false;
  // The n-limit is the only limit taken; no outer β-limit is applied.
  bool outer_beta_limit_dropped = true;
};

/// Free energy of the full tree with a translation-invariant boundary field.
FreeEnergyReport free_energy(const ModelParams& params, Branch branch, int n_max = 30);

/// Slope of h(β) for the u₃* branch:
/// M = ½ max{2(J₁−J), 3J₁−J, 4J₁, J₁−J, 0}.
double slope_M(double J, double J1);

enum class AsymptoteMethod { numeric_limit, closed_form_experimental };

struct AsymptoteResult {
  double M = 0.0;
  double F_infinity = 0.0;
  AsymptoteMethod method = AsymptoteMethod::numeric_limit;
  std::vector<std::pair<double, double>> samples;  // (β, F(β)) on the u₃* branch
  /// Difference between the estimates from the last two sample pairs.
  double stability_gap = 0.0;
  bool stable = false;
  /// Closed forms only: the value on the D(h,h)/β scale
  /// (F_infinity = −½ of it).
  double display_scale_value = 0.0;
};

inline constexpr double kAsymptoteStability = 1e-3;

/// β → ∞ limit of F on the u₃* branch. F(β) = F(∞) + c/β up to
/// exponentially small terms, so consecutive samples are extrapolated
/// linearly in 1/β. Requires J₁ > 0 and J + J₁ > 0, and every sample in the
/// three-solution regime.
AsymptoteResult f_infinity(double J, double J1,
                           std::span<const double> beta_samples = {});

enum class ClosedFormVariant {
  verbatim,        // as printed, with βJ inside the inner absolute value
  corrected,       // βJ → εJ inside the ε-sum
  sign_corrected,  // βJ → εJ and f(x) ~ +½(|x+J|−|x−J|)β, matching atanh(tanh(βJ) tanh x)
};

/// Experimental closed-form limit. The verbatim reading has an ε-sum whose
/// summand does not depend on ε, so it cancels and β drops out. Only the
/// sign-corrected reading agrees with the numeric limit.
AsymptoteResult f_infinity_closed_form(double J, double J1, ClosedFormVariant variant);

}  // namespace cbtree
