#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "maxdd/experiments.hpp"
#include "maxdd/krylov.hpp"
#include "maxdd/log.hpp"

using namespace maxdd;

namespace {

constexpr int kConfigError = 2;

BoundaryCondition parse_bc(const std::string& s) {
  if (s == "pec") return BoundaryCondition::PEC;
  if (s == "imp") return BoundaryCondition::Impedance;
  throw InvalidArgument("unknown boundary condition '" + s + "'");
}

OverlapRule parse_overlap(const std::string& s) {
  if (s == "2h") return OverlapRule::TwoH;
  if (s == "generous") return OverlapRule::Generous;
  throw InvalidArgument("unknown overlap rule '" + s + "'");
}

struct RunOptions {
  std::string preset = "custom";
  std::vector<double> k;
  double alpha = 0, alpha_prime = 0, beta = 0, mesh_constant = 0, tol = 0;
  std::string bc, overlap, pou, format = "md", out;
  std::vector<std::string> kinds;
  std::vector<int> levels;
  int max_iter = 0;
  long long cap = 0;
  std::uint64_t seed = 0;
  bool no_fit = false;
};

int run(const RunOptions& o, const CLI::App& cmd) {
  const auto preset = parse_preset(o.preset);
  if (!preset) throw InvalidArgument("unknown preset '" + o.preset + "'");
  ExperimentSpec spec = make_preset(*preset);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--k")) spec.k_list = o.k;
  if (given("--alpha")) spec.alpha = o.alpha;
  if (given("--alpha-prime")) spec.alpha_prime = o.alpha_prime;
  if (given("--beta")) spec.beta = o.beta;
  if (given("--bc")) spec.bc = parse_bc(o.bc);
  if (given("--overlap")) spec.overlap = parse_overlap(o.overlap);
  if (given("--pou")) spec.pou = parse_pou(o.pou);
  if (given("--mesh-constant")) spec.mesh_constant = o.mesh_constant;
  if (given("--tol")) spec.tol = o.tol;
  if (given("--max-iter")) spec.max_iter = o.max_iter;
  if (given("--seed")) spec.seed = o.seed;
  if (given("--cap")) spec.dof_cap = o.cap;
  if (given("--kinds") || given("--levels")) {
    std::vector<SchwarzKind> kinds;
    if (given("--kinds")) {
      for (const auto& name : o.kinds) {
        const auto k = parse_schwarz_kind(name);
        if (!k) throw InvalidArgument("unknown preconditioner kind '" + name + "'");
        kinds.push_back(*k);
      }
    } else {
      for (const auto& c : spec.kinds)
        if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) kinds.push_back(c.kind);
    }
    std::vector<Levels> levels{Levels::Two};
    if (given("--levels")) {
      levels.clear();
      for (int l : o.levels) levels.push_back(l == 1 ? Levels::One : Levels::Two);
    }
    spec.kinds.clear();
    for (auto k : kinds)
      for (auto l : levels) spec.kinds.push_back({k, l});
  }
  const TableFormat format = o.format == "csv" ? TableFormat::CSV : TableFormat::Markdown;

  validate(spec);
  auto table = run_experiment(spec, [](std::string_view msg) {
    if (log_level() < LogLevel::Info) std::cerr << msg << '\n';
  });
  table.fit = !o.no_fit;
  const std::string text = emit_table(table, format);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out);
    if (!f) throw InvalidArgument("cannot write '" + o.out + "'");
    f << text;
  }
  return 0;
}

int fit(const std::string& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto grid = parse_csv(text);
  if (grid.empty()) throw InvalidArgument("empty table");
  const auto& head = grid[0];
  const auto k_col = std::find(head.begin(), head.end(), "k") - head.begin();
  const auto y_col = std::find(head.begin(), head.end(), column) - head.begin();
  if (k_col == static_cast<long>(head.size()) || y_col == static_cast<long>(head.size()))
    throw InvalidArgument("columns 'k' and '" + column + "' are required");
  std::vector<double> ks, ys;
  for (std::size_t r = 1; r < grid.size(); ++r) {
    const auto& row = grid[r];
    if (row.size() <= static_cast<std::size_t>(std::max(k_col, y_col))) continue;
    try {
      std::size_t used = 0;
      const double k = std::stod(row[k_col]);
      const double y = std::stod(row[y_col], &used);
      if (used != row[y_col].size()) continue;  // "> 200", "-"
      ks.push_back(k);
      ys.push_back(y);
    } catch (const std::exception&) {
      continue;  // footer rows
    }
  }
  const double g = fit_growth_exponent(ks, ys);
  std::printf("points %zu\ngamma %.4f\nxi %.4f\n", ks.size(), g, xi_from_gamma(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level Schwarz preconditioners for time-harmonic Maxwell on the unit cube"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Run an iteration-count sweep and print a table");
  run_cmd->add_option("--preset", ro.preset, "exp1|exp2|exp3|exp4|custom")->capture_default_str();
  run_cmd->add_option("--k", ro.k, "Wavenumbers, comma separated")->delimiter(',');
  run_cmd->add_option("--alpha", ro.alpha, "Subdomain size H_sub ~ k^-alpha");
  run_cmd->add_option("--alpha-prime", ro.alpha_prime, "Coarse size H ~ k^-alpha'");
  run_cmd->add_option("--beta", ro.beta, "Preconditioner absorption kappa_prec = k^beta");
  run_cmd->add_option("--bc", ro.bc, "pec|imp");
  run_cmd->add_option("--overlap", ro.overlap, "2h|generous");
  run_cmd->add_option("--pou", ro.pou, "Partition of unity: owner|multiplicity");
  run_cmd->add_option("--kinds", ro.kinds, "as,ras,hras,has,impras,imphras")->delimiter(',');
  run_cmd->add_option("--levels", ro.levels, "1, 2 or 1,2")->delimiter(',')->check(CLI::IsMember({1, 2}));
  run_cmd->add_option("--mesh-constant", ro.mesh_constant, "c in n = round(c k^{3/2})");
  run_cmd->add_option("--tol", ro.tol, "GMRES relative tolerance");
  run_cmd->add_option("--max-iter", ro.max_iter, "GMRES iteration cap");
  run_cmd->add_option("--seed", ro.seed, "Seed of the random initial guess");
  run_cmd->add_option("--cap", ro.cap, "Skip rows with more dofs than this");
  run_cmd->add_option("--format", ro.format, "csv|md")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();
  run_cmd->add_option("--out", ro.out, "Write the table to FILE instead of stdout");
  run_cmd->add_flag("--no-fit", ro.no_fit, "Omit the gamma/xi footer");

  double h = 0, delta = 0, k = 0, h_sub = 0, c1 = 1.0;
  int m = 1;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate the weighted-GMRES convergence bound");
  bound_cmd->add_option("--H", h, "Coarse mesh size")->required();
  bound_cmd->add_option("--delta", delta, "Overlap width")->required();
  bound_cmd->add_option("--m", m, "Number of iterations")->capture_default_str();
  bound_cmd->add_option("--k", k, "Wavenumber, to check the resolution condition");
  bound_cmd->add_option("--H-sub", h_sub, "Subdomain size, to check the resolution condition");
  bound_cmd->add_option("--C1", c1, "Constant in the resolution condition")->capture_default_str();

  std::string csv_path, column;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the growth exponent of a table column against k");
  fit_cmd->add_option("file", csv_path, "CSV table written by 'run --format csv'")->required();
  fit_cmd->add_option("--column", column, "Column name, e.g. n or #HRAS")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(ro, *run_cmd);
    if (*bound_cmd) {
      std::printf("bound %.12g\n", theorem_bound(h, delta, m));
      if (bound_cmd->count("--k") && bound_cmd->count("--H-sub"))
        std::printf("condition %s\n", theorem_condition(k, h, h_sub, delta, c1) ? "holds" : "violated");
      return 0;
    }
    if (*fit_cmd) return fit(csv_path, column);
  } catch (const std::exception& e) {
    // Every failure that reaches here stems from the requested configuration
    // (bad sizes, an overlap too small for the cover, unreadable files).
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
