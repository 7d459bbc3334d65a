#include "cbtree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "cbtree/error.hpp"
#include "cli_report.hpp"

namespace cbtree::cli {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw InvalidArgument("bad number '" + s + "' in " + std::string(what));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string csv_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + '"';
    }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double x) const {
      if (!std::isfinite(x)) return nullptr;
      return x;
    }
    nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
    nlohmann::ordered_json operator()(bool x) const { return x; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, cell);
}

using Command = std::function<int(const RunConfig&, std::ostream&, std::ostream&)>;

enum Flags : unsigned {
  kParams = 1u << 0,     // --J --J1 --beta --theta --theta1
  kCouplings = 1u << 1,  // same without --beta
  kGrid = 1u << 2,
  kDepth = 1u << 3,
  kTree = 1u << 4,
  kVerify = 1u << 5,
  kCurve = 1u << 6,
  kClosedForm = 1u << 7,
};

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GridSpec parse_grid(std::string_view text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InvalidArgument("grid '" + std::string(text) + "' must look like axis=start:stop:count");
  }
  GridSpec grid;
  grid.axis = std::string(text.substr(0, eq));
  const std::string_view body = text.substr(eq + 1);
  if (body.empty()) throw InvalidArgument("grid '" + grid.axis + "' is empty");

  if (body.find(':') != std::string_view::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) {
      throw InvalidArgument("grid '" + grid.axis + "' must look like axis=start:stop:count");
    }
    const double start = parse_number(parts[0], grid.axis);
    const double stop = parse_number(parts[1], grid.axis);
    const double count_d = parse_number(parts[2], grid.axis);
    if (count_d != std::floor(count_d) || count_d < 0 || count_d > 1e7) {
      throw InvalidArgument("grid '" + grid.axis + "': count must be a non-negative integer");
    }
    const auto count = static_cast<std::size_t>(count_d);
    if (count == 0) throw InvalidArgument("grid '" + grid.axis + "' is empty");
    if (count == 1) {
      if (start != stop) throw InvalidArgument("grid '" + grid.axis + "': count 1 needs start == stop");
      grid.values.push_back(start);
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        grid.values.push_back(i + 1 == count ? stop
                                             : start + (stop - start) * static_cast<double>(i) /
                                                           static_cast<double>(count - 1));
      }
    }
  } else {
    for (std::string_view part : split(body, ',')) grid.values.push_back(parse_number(part, grid.axis));
  }
  for (std::size_t i = 1; i < grid.values.size(); ++i) {
    if (!(grid.values[i] > grid.values[i - 1])) {
      throw InvalidArgument("grid '" + grid.axis + "' must be strictly increasing");
    }
  }
  return grid;
}

void write_report(const Report& report, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = report.command;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.meta) meta[key] = json_cell(value);
    doc["meta"] = meta;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < report.columns.size(); ++i) obj[report.columns[i]] = json_cell(row[i]);
      rows.push_back(obj);
    }
    doc["rows"] = rows;
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# cbtree " << report.command << "\n";
  for (const auto& [key, value] : report.meta) out << "# " << key << ": " << csv_cell(value) << '\n';
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    out << (i ? "," : "") << report.columns[i];
  }
  out << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ising model with competing interactions on the order-2 Cayley tree", "cbtree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cbtree 1.0");

  RunConfig cfg;
  std::vector<std::string> grid_texts;
  std::string tree_text = "full";

  struct Entry {
    const char* name;
    const char* help;
    unsigned flags;
    Command fn;
  };
  const std::vector<Entry> entries{
      {"phase-diagram", "Classify a (theta1, theta) grid and write the critical curve",
       kGrid | kCurve, cmd_phase_diagram},
      {"fixed-points", "Translation-invariant fixed points at one parameter point", kParams,
       cmd_fixed_points},
      {"free-energy", "Free energy of the translation-invariant branches",
       kParams | kDepth | kClosedForm, cmd_free_energy},
      {"beta-sweep", "Branches, free energies and plus-state mass over a beta grid",
       kCouplings | kGrid | kDepth, cmd_beta_sweep},
      {"ground-state", "Mass of the two ground states over a beta grid",
       kCouplings | kGrid | kDepth | kTree, cmd_ground_state},
      {"lemma-check", "Exhaustive check of B(s) - A(s) <= B - A and |d2 K| <= |d K|",
       kDepth | kTree, cmd_lemma_check},
      {"verify", "Run every oracle identity on seeded random draws", kVerify, cmd_verify},
  };

  std::map<CLI::App*, const Entry*> by_app;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    by_app[sub] = &e;
    auto number = [&](const char* flag, std::optional<double>& slot, const char* help) {
      sub->add_option_function<double>(flag, [&slot](double v) { slot = v; }, help);
    };
    if (e.flags & (kParams | kCouplings)) {
      number("--J", cfg.J, "sibling coupling J");
      number("--J1", cfg.J1, "nearest-neighbour coupling J1");
      number("--theta", cfg.theta, "exp(2J) at beta = 1");
      number("--theta1", cfg.theta1, "exp(2J1) at beta = 1");
    }
    if (e.flags & kParams) number("--beta", cfg.beta, "inverse temperature");
    if (e.flags & kGrid) {
      sub->add_option("--grid", grid_texts, "axis=start:stop:count or axis=v1,v2,... (repeatable)");
    }
    if (e.flags & kDepth) {
      sub->add_option_function<int>("--depth", [&cfg](int d) { cfg.depth = d; }, "tree depth");
    }
    if (e.flags & kTree) {
      sub->add_option("--tree", tree_text, "tree shape")->check(CLI::IsMember({"full", "half"}));
    }
    if (e.flags & kVerify) {
      sub->add_option("--seed", cfg.seed, "seed for the random draws");
      sub->add_option("--draws", cfg.draws, "draws per randomized identity")
          ->check(CLI::PositiveNumber);
      sub->add_option_function<std::string>(
             "--inject-fault", [&cfg](const std::string& s) { cfg.inject_fault = s; },
             "perturb the named check (harness self-test)")
          ->group("");
    }
    if (e.flags & kCurve) {
      sub->add_option_function<std::string>(
          "--curve-out", [&cfg](const std::string& s) { cfg.curve_out = s; },
          "write theta1,theta_c to this file");
    }
    if (e.flags & kClosedForm) {
      sub->add_flag("--experimental-closed-form", cfg.experimental_closed_form,
                    "also report the experimental closed-form beta -> infinity limits");
    }
    sub->add_option_function<std::string>(
        "--out", [&cfg](const std::string& s) { cfg.out = s; }, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Entry* entry = nullptr;
  for (CLI::App* sub : app.get_subcommands()) {
    entry = by_app.at(sub);
    cfg.command = entry->name;
  }
  cfg.tree = tree_text == "half" ? TreeMode::half : TreeMode::full;
  if (cfg.format.empty()) cfg.format = cfg.command == "verify" ? "json" : "csv";

  try {
    for (const std::string& text : grid_texts) {
      GridSpec grid = parse_grid(text);
      for (const GridSpec& seen : cfg.grids) {
        if (seen.axis == grid.axis) throw InvalidArgument("grid axis '" + grid.axis + "' given twice");
      }
      cfg.grids.push_back(std::move(grid));
    }
    if (!cfg.out) return entry->fn(cfg, out, err);

    std::ostringstream buffer;
    const int code = entry->fn(cfg, buffer, err);
    std::ofstream file(*cfg.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << *cfg.out << " for writing\n";
      return kExitUsage;
    }
    file << buffer.str();
    if (!file.flush()) {
      err << "error: writing " << *cfg.out << " failed\n";
      return kExitUsage;
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cbtree::cli
