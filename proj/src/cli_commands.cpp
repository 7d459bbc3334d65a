#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "cbtree/cli.hpp"
#include "cbtree/error.hpp"
#include "cbtree/exact_oracle.hpp"
#include "cbtree/field_recursion.hpp"
#include "cbtree/free_energy.hpp"
#include "cbtree/ground_states.hpp"
#include "cbtree/model.hpp"
#include "cbtree/parallel.hpp"
#include "cli_report.hpp"

namespace cbtree::cli {

namespace {

ModelParams point_params(const RunConfig& cfg) {
  const bool j_mode = cfg.J || cfg.J1 || cfg.beta;
  const bool t_mode = cfg.theta || cfg.theta1;
  if (j_mode && t_mode) throw InvalidArgument("use either --J/--J1/--beta or --theta/--theta1, not both");
  if (t_mode) {
    if (!cfg.theta || !cfg.theta1) throw InvalidArgument("--theta and --theta1 go together");
    if (!(*cfg.theta > 0.0) || !(*cfg.theta1 > 0.0)) throw InvalidArgument("theta and theta1 must be > 0");
    return ModelParams::from_theta(*cfg.theta, *cfg.theta1);
  }
  if (!cfg.J || !cfg.J1 || !cfg.beta) {
    throw InvalidArgument("parameters required: --J --J1 --beta or --theta --theta1");
  }
  return ModelParams(*cfg.J, *cfg.J1, *cfg.beta);
}

// (J, J₁) for commands that sweep β; θ-mode maps through β = 1.
std::pair<double, double> couplings(const RunConfig& cfg) {
  const bool j_mode = cfg.J || cfg.J1;
  const bool t_mode = cfg.theta || cfg.theta1;
  if (j_mode && t_mode) throw InvalidArgument("use either --J/--J1 or --theta/--theta1, not both");
  if (t_mode) {
    if (!cfg.theta || !cfg.theta1) throw InvalidArgument("--theta and --theta1 go together");
    if (!(*cfg.theta > 0.0) || !(*cfg.theta1 > 0.0)) throw InvalidArgument("theta and theta1 must be > 0");
    return {0.5 * std::log(*cfg.theta), 0.5 * std::log(*cfg.theta1)};
  }
  if (!cfg.J || !cfg.J1) throw InvalidArgument("couplings required: --J --J1 or --theta --theta1");
  return {*cfg.J, *cfg.J1};
}

const std::vector<double>& grid_axis(const RunConfig& cfg, std::initializer_list<const char*> allowed,
                                     const std::string& axis) {
  const std::vector<double>* found = nullptr;
  for (const GridSpec& g : cfg.grids) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return g.axis == a; })) {
      throw InvalidArgument("unexpected grid axis '" + g.axis + "' for " + cfg.command);
    }
    if (g.axis == axis) found = &g.values;
  }
  if (!found) throw InvalidArgument("missing --grid " + axis + "=start:stop:count");
  return *found;
}

Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::string vertex_list(const std::vector<Vertex>& vs) {
  std::string s;
  for (Vertex v : vs) s += (s.empty() ? "" : " ") + std::to_string(v);
  return s;
}

}  // namespace

int cmd_phase_diagram(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& theta1s = grid_axis(cfg, {"theta1", "theta"}, "theta1");
  const auto& thetas = grid_axis(cfg, {"theta1", "theta"}, "theta");
  if (theta1s.front() <= 0.0 || thetas.front() <= 0.0) {
    throw InvalidArgument("theta and theta1 grids must be positive");
  }

  Report report;
  report.command = cfg.command;
  report.columns = {"theta1", "theta", "regime", "u1", "u3"};
  const std::size_t nt = thetas.size();
  std::vector<TIFixedPoints> points(theta1s.size() * nt);
  parallel_for(points.size(), [&](std::size_t k) {
    points[k] = ti_fixed_points(ModelParams::from_theta(thetas[k % nt], theta1s[k / nt]));
  });
  for (std::size_t k = 0; k < points.size(); ++k) {
    const TIFixedPoints& fp = points[k];
    report.rows.push_back({theta1s[k / nt], thetas[k % nt], std::string(to_string(fp.regime)), fp.u1,
                           fp.u3});
  }
  report.add_meta("points", static_cast<std::int64_t>(points.size()));
  report.add_meta("three_phase_points",
                  static_cast<std::int64_t>(std::count_if(points.begin(), points.end(), [](const auto& p) {
                    return p.regime == Regime::three;
                  })));

  if (cfg.curve_out) {
    const double floor = std::sqrt(3.0) * (1.0 + kPoleGuard);
    const double ceiling = std::sqrt(3.0) * (1.0 - kPoleGuard);
    std::vector<double> usable;
    std::int64_t below = 0;
    for (double t1 : theta1s) {
      if (t1 > floor) {
        usable.push_back(t1);
      } else if (t1 >= ceiling) {
        err << "warning: theta1 = " << format_double(t1) << " is at the pole sqrt(3); skipped\n";
      } else {
        ++below;
      }
    }
    std::ostringstream curve;
    curve << "# critical curve theta_c = 2 theta1 / (theta1^2 - 3)\n";
    curve << "# theta1 values at or below sqrt(3) have no critical point: " << below << "\n";
    curve << "theta1,theta_c\n";
    for (const CriticalPoint& p : critical_curve(usable)) {
      curve << format_double(p.theta1) << ',' << format_double(p.theta_c) << '\n';
    }
    std::ofstream file(*cfg.curve_out, std::ios::binary);
    if (!(file << curve.str()) || !file.flush()) {
      err << "error: cannot write " << *cfg.curve_out << '\n';
      return kExitUsage;
    }
  }
  write_report(report, cfg.format, out);
  return kExitOk;
}

int cmd_fixed_points(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ModelParams params = point_params(cfg);
  const TIFixedPoints fp = ti_fixed_points(params);
  const bool three = fp.regime == Regime::three;

  Report report;
  report.command = cfg.command;
  report.add_meta("J", params.J());
  report.add_meta("J1", params.J1());
  report.add_meta("beta", params.beta());
  report.add_meta("theta", params.theta_exp());
  report.add_meta("theta1", params.theta1_exp());
  report.columns = {"regime", "phase_predicate", "root_count", "u1", "u2", "u3", "h1", "h3",
                    "residual_u1", "residual_u3", "u1_times_u3", "root_prob_u3", "root_prob_u1",
                    "interval_check"};
  Cell residual_u1, residual_u3, interval;
  if (three) {
    residual_u1 = std::abs(vertex_map_u(params, fp.u1, fp.u1) - fp.u1);
    residual_u3 = std::abs(vertex_map_u(params, fp.u3, fp.u3) - fp.u3);
    interval = interval_check(params, 64);
  }
  report.rows.push_back({std::string(to_string(fp.regime)), phase_predicate(params),
                         static_cast<std::int64_t>(fp.root_count()), fp.u1, 1.0, fp.u3, fp.h1, fp.h3,
                         residual_u1, residual_u3, fp.u1 * fp.u3, root_magnetization_from_field(fp.h3),
                         root_magnetization_from_field(fp.h1), interval});
  write_report(report, cfg.format, out);
  return kExitOk;
}

int cmd_free_energy(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ModelParams params = point_params(cfg);
  const int n_max = cfg.depth.value_or(30);
  const TIFixedPoints fp = ti_fixed_points(params);

  Report report;
  report.command = cfg.command;
  report.add_meta("J", params.J());
  report.add_meta("J1", params.J1());
  report.add_meta("beta", params.beta());
  report.add_meta("n_max", static_cast<std::int64_t>(n_max));
  report.add_meta("regime", std::string(to_string(fp.regime)));
  report.add_meta("normalization", std::string("F = -lim ln Z_n / (3 beta 2^n) = -D(h,h) / (2 beta)"));
  report.add_meta("outer_beta_limit_dropped", true);
  report.columns = {"branch", "exists", "h", "D", "F", "F_n_max", "F_extrapolated", "cauchy_constant",
                    "converged"};
  std::optional<double> f_plus, f_minus;
  for (Branch b : {Branch::minus, Branch::symmetric, Branch::plus}) {
    const bool exists = b == Branch::symmetric || fp.regime == Regime::three;
    if (!exists) {
      report.rows.push_back({std::string(to_string(b)), false, {}, {}, {}, {}, {}, {}, {}});
      continue;
    }
    const FreeEnergyReport r = free_energy(params, b, n_max);
    if (b == Branch::plus) f_plus = r.f_analytic;
    if (b == Branch::minus) f_minus = r.f_analytic;
    report.rows.push_back({std::string(to_string(b)), true, r.h, r.display_value, r.f_analytic,
                           r.f_n.back(), r.f_extrapolated, r.cauchy_constant, r.converged});
  }
  report.add_meta("F_symmetry_gap", f_plus && f_minus ? Cell{std::abs(*f_plus - *f_minus)} : Cell{});

  if (cfg.experimental_closed_form) {
    const double J = params.J();
    const double J1 = params.J1();
    report.add_meta("M", slope_M(J, J1));
    if (J1 > 0.0 && J + J1 > 0.0) {
      try {
        const AsymptoteResult num = f_infinity(J, J1);
        report.add_meta("F_infinity_numeric", num.F_infinity);
        report.add_meta("F_infinity_numeric_gap", num.stability_gap);
        report.add_meta("F_infinity_numeric_stable", num.stable);
      } catch (const InvalidArgument&) {
        report.add_meta("F_infinity_numeric", Cell{});
      }
    } else {
      report.add_meta("F_infinity_numeric", Cell{});
    }
    const std::pair<const char*, ClosedFormVariant> variants[] = {
        {"verbatim", ClosedFormVariant::verbatim},
        {"corrected", ClosedFormVariant::corrected},
        {"sign_corrected", ClosedFormVariant::sign_corrected}};
    for (const auto& [name, v] : variants) {
      const AsymptoteResult r = f_infinity_closed_form(J, J1, v);
      report.add_meta(std::string("F_infinity_closed_form_") + name + "_experimental", r.F_infinity);
    }
  }
  write_report(report, cfg.format, out);
  return kExitOk;
}

int cmd_beta_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto [J, J1] = couplings(cfg);
  if (cfg.beta) throw InvalidArgument("beta-sweep takes beta from --grid beta=...");
  const auto& betas = grid_axis(cfg, {"beta"}, "beta");
  if (!(betas.front() > 0.0)) throw InvalidArgument("beta grid must be positive");
  const int depth = cfg.depth.value_or(2);
  const TreeIndex tree(depth, TreeMode::full);
  const bool with_mass = depth <= kFullEnumerationCap;

  Report report;
  report.command = cfg.command;
  report.add_meta("J", J);
  report.add_meta("J1", J1);
  report.add_meta("depth", static_cast<std::int64_t>(depth));
  report.add_meta("mass_plus", std::string(with_mass ? "mu3(sigma_plus | V_depth) by enumeration"
                                                     : "empty: depth above enumeration cap"));
  report.columns = {"beta", "regime", "u1", "u3", "F_u3", "F_u1", "F_sym_check", "root_prob", "mass_plus"};
  for (double beta : betas) {
    const ModelParams params(J, J1, beta);
    const TIFixedPoints fp = ti_fixed_points(params);
    const bool three = fp.regime == Regime::three;
    const double h3 = three ? fp.h3 : 0.0;
    const double h1 = three ? fp.h1 : 0.0;
    const double f3 = -D_factor(params, h3, h3) / (2.0 * beta);
    const double f1 = -D_factor(params, h1, h1) / (2.0 * beta);
    Cell mass;
    if (three && with_mass) {
      const std::vector<double> one{beta};
      mass = *ground_state_scan(J, J1, one, tree).front().mass_plus;
    }
    report.rows.push_back({beta, std::string(to_string(fp.regime)), three ? fp.u1 : 1.0,
                           three ? fp.u3 : 1.0, f3, f1, std::abs(f3 - f1),
                           root_magnetization_from_field(h3), mass});
  }
  write_report(report, cfg.format, out);
  return kExitOk;
}

int cmd_ground_state(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto [J, J1] = couplings(cfg);
  const auto& betas = grid_axis(cfg, {"beta"}, "beta");
  if (!(betas.front() > 0.0)) throw InvalidArgument("beta grid must be positive");
  const TreeIndex tree(cfg.depth.value_or(2), cfg.tree);
  const std::vector<GroundScanRow> rows = ground_state_scan(J, J1, betas, tree);

  Report report;
  report.command = cfg.command;
  report.add_meta("J", J);
  report.add_meta("J1", J1);
  report.add_meta("tree", std::string(cfg.tree == TreeMode::full ? "full" : "half"));
  report.add_meta("depth", static_cast<std::int64_t>(tree.depth()));
  report.add_meta("mass_plus_monotone", mass_plus_monotone(rows));
  report.columns = {"beta", "regime", "u1", "u3", "root_prob", "mass_plus", "mass_minus"};
  for (const GroundScanRow& r : rows) {
    report.rows.push_back({r.beta, std::string(to_string(r.regime)), r.u1, r.u3, r.root_prob,
                           opt_cell(r.mass_plus), opt_cell(r.mass_minus)});
  }
  write_report(report, cfg.format, out);
  return kExitOk;
}

int cmd_lemma_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TreeIndex tree(cfg.depth.value_or(2), cfg.tree);
  const BoundInequalityReport r = bound_inequality_exhaustive(tree);

  Report report;
  report.command = cfg.command;
  report.add_meta("tree", std::string(cfg.tree == TreeMode::full ? "full" : "half"));
  report.add_meta("depth", static_cast<std::int64_t>(r.depth));
  report.add_meta("bound_B_minus_A", r.bound);
  report.add_meta("holds", r.total_violations() == 0);
  report.columns = {"check", "checked", "violations", "max_excess", "witness"};

  std::string config_witness;
  if (r.config_witness) {
    std::vector<Vertex> minus;
    for (Vertex v = 0; v < r.config_witness->size(); ++v) {
      if (r.config_witness->spin(v) < 0) minus.push_back(v);
    }
    config_witness = "minus at " + vertex_list(minus);
  }
  report.rows.push_back({std::string("configurations"), i64(r.configs_checked), i64(r.config_violations),
                         r.max_excess, config_witness});
  if (r.subsets_run) {
    report.rows.push_back({std::string("connected_subsets"), i64(r.subsets_checked),
                           i64(r.subset_violations), Cell{},
                           r.subset_witness ? "K = " + vertex_list(*r.subset_witness) : std::string()});
  }
  write_report(report, cfg.format, out);
  if (r.total_violations() > 0) {
    err << "lemma-check: " << r.total_violations() << " violations\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

namespace {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  // Uniform on [a, b) from the top 53 bits; identical on every platform.
  double uniform(double a, double b) {
    return a + (b - a) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  // A point of the three-solution regime: β, then couplings with θ₁ > √3 and
  // θ above the critical curve.
  ModelParams three_phase() {
    const double beta = uniform(0.5, 3.0);
    const double bj1 = uniform(0.35, 1.5);
    const double theta1 = std::exp(2.0 * bj1);
    const double bj = 0.5 * (std::log(critical_theta(theta1)) + uniform(0.1, 3.0));
    return ModelParams(bj / beta, bj1 / beta, beta);
  }

 private:
  std::mt19937_64 rng_;
};

struct Check {
  std::string name;
  std::int64_t draws = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool informational = false;
  bool pass() const { return max_error <= tolerance; }
};

// W_{±1} by direct exponentials; arguments stay below e^{60}.
std::pair<double, double> direct_w(double bj, double bj1, double hy, double hz) {
  double wp = 0.0, wm = 0.0;
  for (int sy : {1, -1}) {
    for (int sz : {1, -1}) {
      const double common = bj * sy * sz + hy * sy + hz * sz;
      wp += std::exp(common + bj1 * (sy + sz));
      wm += std::exp(common - bj1 * (sy + sz));
    }
  }
  return {wp, wm};
}

std::vector<double> random_boundary(Draws& d, const TreeIndex& tree, double spread) {
  std::vector<double> h(tree.level(tree.depth()).size());
  for (double& x : h) x = d.uniform(-spread, spread);
  return h;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Draws d(cfg.seed);
  const int n = cfg.draws;
  std::vector<Check> checks;

  {
    Check w{"D_vs_sqrt_W1_Wm1", n, 0.0, 1e-10};
    Check h{"h_via_W_vs_child_to_parent", n, 0.0, 1e-12};
    for (int i = 0; i < n; ++i) {
      const double bj = d.uniform(-10, 10), bj1 = d.uniform(-10, 10);
      const double hy = d.uniform(-10, 10), hz = d.uniform(-10, 10);
      const ModelParams p(bj, bj1, 1.0);
      const auto [wp, wm] = direct_w(bj, bj1, hy, hz);
      const double log_sqrt = 0.5 * (std::log(wp) + std::log(wm));
      w.max_error = std::max(w.max_error, std::abs(std::expm1(D_factor(p, hy, hz) - log_sqrt)));
      const double hx = 0.5 * (std::log(wp) - std::log(wm));
      h.max_error = std::max(h.max_error, rel(child_to_parent(p, hy, hz), hx));
    }
    checks.push_back(w);
    checks.push_back(h);
  }
  {
    Check c{"kernel_symmetries", n, 0.0, 1e-12};
    for (int i = 0; i < n; ++i) {
      const double b = d.uniform(-10, 10), x = d.uniform(-20, 20), y = d.uniform(-20, 20);
      const ModelParams p(d.uniform(-10, 10), d.uniform(-10, 10), 1.0);
      const double errs[] = {
          rel(d_kernel(b, -x), d_kernel(b, x)),
          rel(d_kernel(-b, x), d_kernel(b, x)),
          rel(delta_kernel(-b, y, x), delta_kernel(b, x, y)),
          rel(delta_kernel(b, -y, -x), delta_kernel(b, x, y)),
          rel(f_kernel(-x, p), -f_kernel(x, p)),
          rel(D_factor(p, -x, -y), D_factor(p, x, y)),
      };
      for (double e : errs) c.max_error = std::max(c.max_error, e);
    }
    checks.push_back(c);
  }
  {
    Check c{"fixed_point_residual", n, 0.0, 1e-10};
    for (int i = 0; i < n; ++i) {
      const ModelParams p = d.three_phase();
      const TIFixedPoints fp = ti_fixed_points(p);
      if (fp.regime != Regime::three) {
        c.max_error = std::numeric_limits<double>::infinity();
        continue;
      }
      c.max_error = std::max({c.max_error, rel(vertex_map_u(p, fp.u3, fp.u3), fp.u3),
                              rel(vertex_map_u(p, fp.u1, fp.u1), fp.u1), std::abs(fp.u1 * fp.u3 - 1.0)});
    }
    checks.push_back(c);
  }
  {
    Check c{"recursion_vs_enumeration", 0, 0.0, 1e-10};
    const std::pair<int, TreeMode> shapes[] = {
        {2, TreeMode::full}, {3, TreeMode::full}, {2, TreeMode::half}, {3, TreeMode::half}};
    for (int i = 0; i < 5; ++i) {
      const ModelParams p = d.three_phase();
      const TIFixedPoints fp = ti_fixed_points(p);
      for (const auto& [depth, mode] : shapes) {
        const TreeIndex tree(depth, mode);
        const std::vector<double> branch(tree.level(depth).size(), fp.h3);
        for (const auto& boundary : {branch, random_boundary(d, tree, 2.0)}) {
          const FieldAssignment f = propagate_inward(tree, p, boundary);
          const double exact = log_partition(tree, p, BoundaryField::from_fields(tree, f));
          c.max_error = std::max(c.max_error, std::abs(log_partition_recursive(tree, p, f) - exact) /
                                                  std::abs(exact));
          ++c.draws;
        }
      }
    }
    checks.push_back(c);
  }
  {
    Check c{"consistency", 0, 0.0, 1e-12};
    Check root{"consistency_root_step_full", 0, 0.0, 1e-12, true};
    const std::pair<int, TreeMode> shapes[] = {
        {2, TreeMode::full}, {3, TreeMode::full}, {1, TreeMode::half}, {2, TreeMode::half},
        {3, TreeMode::half}};
    const TreeIndex root_tree(1, TreeMode::full);
    for (int i = 0; i < 5; ++i) {
      const ModelParams p = d.three_phase();
      for (const auto& [depth, mode] : shapes) {
        const TreeIndex tree(depth, mode);
        const FieldAssignment f = propagate_inward(tree, p, random_boundary(d, tree, 2.0));
        c.max_error = std::max(c.max_error, check_consistency(tree, p, f));
        ++c.draws;
      }
      const FieldAssignment f = propagate_inward(root_tree, p, random_boundary(d, root_tree, 2.0));
      root.max_error = std::max(root.max_error, consistency_deviation(root_tree, p, f));
      ++root.draws;
    }
    checks.push_back(c);
    checks.push_back(root);
  }
  {
    Check half{"bound_inequality_half_tree", 0, 0.0, 0.0};
    Check full{"bound_inequality_full_tree", 0, 0.0, 0.0, true};
    for (int depth = 1; depth <= 3; ++depth) {
      const BoundInequalityReport h = bound_inequality_exhaustive(TreeIndex(depth, TreeMode::half));
      half.draws += i64(h.configs_checked + h.subsets_checked);
      half.max_error += static_cast<double>(h.total_violations());
      const BoundInequalityReport f = bound_inequality_exhaustive(TreeIndex(depth, TreeMode::full));
      full.draws += i64(f.configs_checked + f.subsets_checked);
      full.max_error += static_cast<double>(f.total_violations());
    }
    checks.push_back(half);
    checks.push_back(full);
  }
  {
    Check c{"free_energy_symmetry", n, 0.0, 1e-10};
    for (int i = 0; i < n; ++i) {
      const ModelParams p = d.three_phase();
      const double h3 = branch_field(p, Branch::plus);
      const double h1 = branch_field(p, Branch::minus);
      c.max_error = std::max(c.max_error, std::abs(D_factor(p, h3, h3) - D_factor(p, h1, h1)) /
                                              (2.0 * p.beta()));
    }
    checks.push_back(c);
  }

  if (cfg.inject_fault) {
    auto it = std::find_if(checks.begin(), checks.end(),
                           [&](const Check& c) { return c.name == *cfg.inject_fault; });
    if (it == checks.end() || it->informational) {
      throw InvalidArgument("--inject-fault: no gating check named '" + *cfg.inject_fault + "'");
    }
    it->max_error += 1.0;
  }

  bool all_pass = true;
  Report report;
  report.command = cfg.command;
  report.add_meta("seed", i64(cfg.seed));
  report.add_meta("draws", static_cast<std::int64_t>(n));
  report.columns = {"check_name", "draws", "max_error", "tolerance", "pass", "informational"};
  for (const Check& c : checks) {
    report.rows.push_back({c.name, c.draws, c.max_error, c.tolerance, c.pass(), c.informational});
    if (!c.informational && !c.pass()) {
      all_pass = false;
      err << "verify: check " << c.name << " FAILED (max_error " << format_double(c.max_error)
          << " > " << format_double(c.tolerance) << ")\n";
    }
  }
  report.add_meta("all_pass", all_pass);
  write_report(report, cfg.format, out);
  return all_pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace cbtree::cli
