#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxdd/decomposition.hpp"
#include "maxdd/precond.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

enum class Preset { Exp1, Exp2, Exp3, Exp4, Custom };
enum class KappaRule { KSquared, K, Zero };
enum class OverlapRule { TwoH, Generous };
enum class TableFormat { CSV, Markdown };

std::optional<Preset> parse_preset(std::string_view text);
std::string_view to_string(Preset preset);

struct KindColumn {
  SchwarzKind kind = SchwarzKind::HRAS;
  Levels levels = Levels::Two;

  friend bool operator==(const KindColumn&, const KindColumn&) = default;
};

/// Column label as printed in tables, e.g. "#HRAS" or "#ImpHRAS(1-level)".
std::string column_label(const KindColumn& column);

/// A sweep over wavenumbers. Fine mesh n = round(c k^{3/2}) (snapped, see
/// resolve_sizes); subdomains per axis ~ k^alpha; coarse cells per axis
/// ~ k^alpha_prime; kappa_prec = k^beta.
struct ExperimentSpec {
  Preset preset = Preset::Custom;
  std::vector<double> k_list;
  double alpha = 1.0;
  double alpha_prime = 1.0;
  double beta = 2.0;
  KappaRule kappa_prob_rule = KappaRule::KSquared;
  BoundaryCondition bc = BoundaryCondition::PEC;
  OverlapRule overlap = OverlapRule::TwoH;
  PouKind pou = PouKind::Owner;
  std::vector<KindColumn> kinds;
  double mesh_constant = 1.3;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 200;
  long long dof_cap = 2'000'000;
};

/// Preset defaults: Exp3 uses alpha = alpha' = 0.8, beta = 2; Exp4 uses
/// (alpha, alpha') = (0.6, 0.9). Callers may switch to the other published
/// values before validating.
ExperimentSpec make_preset(Preset preset);

/// Checks the preset invariants and basic ranges; throws InvalidArgument.
void validate(const ExperimentSpec& spec);

struct ResolvedSizes {
  int n_fine = 0;
  int n_sub_per_dir = 0;
  int n_coarse = 0;
  int overlap_layers = 0;
  double kappa_prob = 0.0;
  double kappa_prec = 0.0;
};

/// Mesh-size snapping: among n in [n0 - 3, n0 + 3], n0 = round(c k^{3/2}),
/// prefer n divisible by both targets round(k^alpha) and round(k^alpha'),
/// then the larger achievable divisors, then the smallest |n - n0|, then the
/// smaller n. Subdomain and coarse counts are the largest divisors of n not
/// exceeding their targets.
ResolvedSizes resolve_sizes(const ExperimentSpec& spec, double k);

/// Number of active dofs for a cube mesh with n subdivisions.
long long count_dofs(int n, BoundaryCondition bc);

struct ColumnResult {
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  double seconds = 0.0;  // preconditioner setup + GMRES
};

struct ResultRow {
  double k = 0.0;
  ResolvedSizes sizes;
  long long n = 0;      // system size
  int n_subdomains = 0;
  long long n_cs = 0;   // coarse space size (0 without a coarse level)
  bool skipped = false;
  std::string note;
  std::vector<ColumnResult> columns;
};

struct ResultTable {
  std::vector<KindColumn> columns;
  std::vector<ResultRow> rows;
  int max_iter = 200;
  bool fit = true;
};

using ProgressCallback = std::function<void(std::string_view)>;

ResultTable run_experiment(const ExperimentSpec& spec, const ProgressCallback& progress = {});

/// Least-squares slope of log(y) against log(k).
double fit_growth_exponent(const std::vector<double>& ks, const std::vector<double>& ys);

/// Growth in the problem size: xi = 2 gamma / 9 since n ~ k^{9/2}.
constexpr double xi_from_gamma(double gamma) { return gamma * 2.0 / 9.0; }

std::string emit_table(const ResultTable& table, TableFormat format);

/// Minimal CSV reader for tables written by emit_table (no quoting).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Coercive model problem curl curl E + E = J with PEC and the smooth
/// solution E* = (sin(pi y) sin(pi z), sin(pi z) sin(pi x), sin(pi x) sin(pi y)).
struct ManufacturedResult {
  int n = 0;
  int dofs = 0;
  double hcurl_error = 0.0;
  double l2_error = 0.0;
};

ManufacturedResult solve_manufactured(int n);

}  // namespace maxdd
