#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it with in-memory streams.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbtree/topology.hpp"

namespace cbtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// One --grid axis. Accepts `axis=start:stop:count` (linear, endpoints
/// included) or `axis=v1,v2,...`.
struct GridSpec {
  std::string axis;
  std::vector<double> values;
};

/// Throws InvalidArgument on malformed text, an empty grid, or values that
/// are not strictly increasing.
GridSpec parse_grid(std::string_view text);

struct RunConfig {
  std::string command;
  std::optional<double> J, J1, beta;
  std::optional<double> theta, theta1;
  std::vector<GridSpec> grids;
  std::optional<int> depth;
  std::uint64_t seed = 1;
  int draws = 1000;
  std::optional<std::string> out;
  std::optional<std::string> curve_out;
  std::string format;  // empty: json for verify, csv otherwise
  bool experimental_closed_form = false;
  TreeMode tree = TreeMode::full;
  std::optional<std::string> inject_fault;  // verify self-test hook
};

/// %.17g with "nan"/"inf" spelled out; locale independent.
std::string format_double(double x);

/// Parses `args` (without the program name) and runs the command. Returns
/// the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Individual commands; `out` is the report destination.
int cmd_phase_diagram(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fixed_points(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_free_energy(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_beta_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ground_state(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_lemma_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace cbtree::cli
