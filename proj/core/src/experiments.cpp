#include "maxdd/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <tuple>

#include "maxdd/assembly.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/krylov.hpp"
#include "maxdd/log.hpp"
#include "maxdd/mesh.hpp"
#include "maxdd/quadrature.hpp"
#include "maxdd/sparse_ldlt.hpp"

namespace maxdd {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int round_positive(double x) { return std::max(1, static_cast<int>(std::lround(x))); }

int largest_divisor_at_most(int n, int target) {
  for (int d = std::min(n, std::max(1, target)); d >= 1; --d)
    if (n % d == 0) return d;
  return 1;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

std::string format_k(double k) {
  std::ostringstream os;
  os << k;
  return os.str();
}

}  // namespace

std::optional<Preset> parse_preset(std::string_view text) {
  if (text == "exp1") return Preset::Exp1;
  if (text == "exp2") return Preset::Exp2;
  if (text == "exp3") return Preset::Exp3;
  if (text == "exp4") return Preset::Exp4;
  if (text == "custom") return Preset::Custom;
  return std::nullopt;
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::Exp1: return "exp1";
    case Preset::Exp2: return "exp2";
    case Preset::Exp3: return "exp3";
    case Preset::Exp4: return "exp4";
    case Preset::Custom: return "custom";
  }
  return "?";
}

std::string column_label(const KindColumn& column) {
  std::string label = "#" + std::string(to_string(column.kind));
  if (column.levels == Levels::One) label += "(1-level)";
  return label;
}

ExperimentSpec make_preset(Preset preset) {
  ExperimentSpec s;
  s.preset = preset;
  switch (preset) {
    case Preset::Exp1:
      s.k_list = {10, 15, 20};
      s.bc = BoundaryCondition::PEC;
      s.kappa_prob_rule = KappaRule::KSquared;
      s.beta = 2.0;
      s.alpha = s.alpha_prime = 1.0;
      s.overlap = OverlapRule::Generous;
      s.kinds = {{SchwarzKind::AS, Levels::Two},
                 {SchwarzKind::RAS, Levels::Two},
                 {SchwarzKind::HRAS, Levels::Two}};
      break;
    case Preset::Exp2:
      s.k_list = {10, 20, 30, 40};
      s.bc = BoundaryCondition::PEC;
      s.kappa_prob_rule = KappaRule::KSquared;
      s.beta = 2.0;
      s.alpha = s.alpha_prime = 0.8;
      s.overlap = OverlapRule::TwoH;
      s.kinds = {{SchwarzKind::RAS, Levels::Two},
                 {SchwarzKind::HRAS, Levels::Two},
                 {SchwarzKind::ImpRAS, Levels::Two},
                 {SchwarzKind::ImpHRAS, Levels::Two}};
      break;
    case Preset::Exp3:
      s.k_list = {10, 20, 30, 40};
      s.bc = BoundaryCondition::Impedance;
      s.kappa_prob_rule = KappaRule::K;
      s.beta = 2.0;
      s.alpha = s.alpha_prime = 0.8;
      s.overlap = OverlapRule::TwoH;
      s.kinds = {{SchwarzKind::ImpHRAS, Levels::Two}};
      break;
    case Preset::Exp4:
      s.k_list = {10, 15, 20, 25, 30};
      s.bc = BoundaryCondition::Impedance;
      s.kappa_prob_rule = KappaRule::Zero;
      s.beta = 1.0;
      s.alpha = 0.6;
      s.alpha_prime = 0.9;
      s.overlap = OverlapRule::TwoH;
      s.kinds = {{SchwarzKind::ImpHRAS, Levels::Two}, {SchwarzKind::ImpHRAS, Levels::One}};
      break;
    case Preset::Custom:
      s.k_list = {5};
      s.kinds = {{SchwarzKind::HRAS, Levels::Two}};
      break;
  }
  return s;
}

void validate(const ExperimentSpec& s) {
  for (double k : s.k_list)
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("experiment: k values must be positive");
  if (!(s.mesh_constant > 0.0)) throw InvalidArgument("experiment: mesh constant must be positive");
  if (!(s.tol > 0.0)) throw InvalidArgument("experiment: tol must be positive");
  if (s.max_iter < 1) throw InvalidArgument("experiment: max_iter must be >= 1");
  if (s.dof_cap < 1) throw InvalidArgument("experiment: dof cap must be positive");
  for (const auto& c : s.kinds)
    if (uses_impedance_blocks(c.kind) && s.bc == BoundaryCondition::PEC &&
        s.preset != Preset::Custom && s.preset != Preset::Exp2)
      throw InvalidArgument("experiment: impedance-block kinds are not part of this preset");

  auto fail = [&](const std::string& what) {
    throw InvalidArgument("experiment preset " + std::string(to_string(s.preset)) + ": " + what);
  };
  switch (s.preset) {
    case Preset::Exp1:
      if (s.bc != BoundaryCondition::PEC || s.kappa_prob_rule != KappaRule::KSquared ||
          !near(s.beta, 2.0) || !near(s.alpha, 1.0) || !near(s.alpha_prime, 1.0) ||
          s.overlap != OverlapRule::Generous)
        fail("requires PEC, kappa_prob = k^2, beta = 2, alpha = alpha' = 1, generous overlap");
      break;
    case Preset::Exp2:
      if (s.bc != BoundaryCondition::PEC || s.kappa_prob_rule != KappaRule::KSquared ||
          !near(s.beta, 2.0) || !near(s.alpha, 0.8) || !near(s.alpha_prime, 0.8) ||
          s.overlap != OverlapRule::TwoH)
        fail("requires PEC, kappa_prob = k^2, beta = 2, alpha = alpha' = 0.8, 2h overlap");
      break;
    case Preset::Exp3:
      if (s.bc != BoundaryCondition::Impedance || s.kappa_prob_rule != KappaRule::K ||
          !near(s.alpha, s.alpha_prime) || !(near(s.alpha, 0.6) || near(s.alpha, 0.8)) ||
          !(near(s.beta, 1.0) || near(s.beta, 2.0)) || s.overlap != OverlapRule::TwoH)
        fail("requires impedance, kappa_prob = k, alpha = alpha' in {0.6, 0.8}, beta in {1, 2}, 2h overlap");
      break;
    case Preset::Exp4: {
      const bool pair_ok = (near(s.alpha, 0.6) && near(s.alpha_prime, 0.9)) ||
                           (near(s.alpha, 0.7) && near(s.alpha_prime, 0.8)) ||
                           (near(s.alpha, 0.8) && near(s.alpha_prime, 0.8));
      if (s.bc != BoundaryCondition::Impedance || s.kappa_prob_rule != KappaRule::Zero ||
          !near(s.beta, 1.0) || !pair_ok || s.overlap != OverlapRule::TwoH)
        fail("requires impedance, kappa_prob = 0, kappa_prec = k, (alpha, alpha') in "
             "{(0.6,0.9), (0.7,0.8), (0.8,0.8)}, 2h overlap");
      break;
    }
    case Preset::Custom:
      break;
  }
}

ResolvedSizes resolve_sizes(const ExperimentSpec& spec, double k) {
  if (!(k > 0.0)) throw InvalidArgument("resolve_sizes: k must be positive");
  const int nominal = round_positive(spec.mesh_constant * std::pow(k, 1.5));
  const int t_sub = round_positive(std::pow(k, spec.alpha));
  const int t_coarse = round_positive(std::pow(k, spec.alpha_prime));

  using Score = std::tuple<int, int, int, int>;
  Score best{-1, -1, 0, 0};
  ResolvedSizes out;
  for (int n = std::max(1, nominal - 3); n <= nominal + 3; ++n) {
    const int ds = largest_divisor_at_most(n, t_sub);
    const int dc = largest_divisor_at_most(n, t_coarse);
    const Score score{(ds == t_sub) + (dc == t_coarse), ds + dc, -std::abs(n - nominal), -n};
    if (score > best) {
      best = score;
      out.n_fine = n;
      out.n_sub_per_dir = ds;
      out.n_coarse = dc;
    }
  }
  out.overlap_layers = spec.overlap == OverlapRule::Generous
                           ? generous_overlap_layers(out.n_fine, out.n_sub_per_dir)
                           : 1;
  switch (spec.kappa_prob_rule) {
    case KappaRule::KSquared: out.kappa_prob = k * k; break;
    case KappaRule::K: out.kappa_prob = k; break;
    case KappaRule::Zero: out.kappa_prob = 0.0; break;
  }
  out.kappa_prec = std::pow(k, spec.beta);
  return out;
}

long long count_dofs(int n, BoundaryCondition bc) {
  const long long m = n;
  const long long edges = 3 * m * (m + 1) * (m + 1) + 3 * m * m * (m + 1) + m * m * m;
  if (bc == BoundaryCondition::Impedance) return edges;
  const long long boundary = 6 * (2 * m * (m + 1) + m * m) - 12 * m;
  return edges - boundary;
}

ResultTable run_experiment(const ExperimentSpec& spec, const ProgressCallback& progress) {
  validate(spec);
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
    log_info(msg);
  };

  ResultTable table;
  table.columns = spec.kinds;
  table.max_iter = spec.max_iter;
  if (spec.kinds.empty()) return table;

  const bool need_coarse = std::any_of(spec.kinds.begin(), spec.kinds.end(),
                                       [](const KindColumn& c) { return c.levels == Levels::Two; });

  for (double k : spec.k_list) {
    ResultRow row;
    row.k = k;
    row.sizes = resolve_sizes(spec, k);
    const auto& sz = row.sizes;
    row.n = count_dofs(sz.n_fine, spec.bc);
    row.n_subdomains = sz.n_sub_per_dir * sz.n_sub_per_dir * sz.n_sub_per_dir;
    row.n_cs = need_coarse ? count_dofs(sz.n_coarse, spec.bc) : 0;
    if (row.n > spec.dof_cap) {
      row.skipped = true;
      row.note = "skipped: " + std::to_string(row.n) + " dofs exceeds cap " +
                 std::to_string(spec.dof_cap);
      log_warning("k=" + format_k(k) + " " + row.note);
      table.rows.push_back(std::move(row));
      continue;
    }
    say("k=" + format_k(k) + ": n_fine=" + std::to_string(sz.n_fine) +
        " n_sub=" + std::to_string(sz.n_sub_per_dir) + " n_coarse=" + std::to_string(sz.n_coarse) +
        " layers=" + std::to_string(sz.overlap_layers) + " dofs=" + std::to_string(row.n));

    auto mesh = std::make_shared<const TetMesh>(build_cube_mesh(sz.n_fine));
    auto dofs = std::make_shared<const DofMap>(make_dof_map(*mesh, spec.bc));
    std::shared_ptr<const SparseComplexMatrix> a_prob, a_prec;
    {
      const auto ops = assemble_operators(*mesh, *dofs, spec.bc);
      a_prec = std::make_shared<const SparseComplexMatrix>(combine(ops, k, sz.kappa_prec));
      a_prob = sz.kappa_prob == sz.kappa_prec
                   ? a_prec
                   : std::make_shared<const SparseComplexMatrix>(combine(ops, k, sz.kappa_prob));
    }
    const ProblemConfig prob_config{k, sz.kappa_prob, spec.bc, SourceKind::GaussianBump};
    const ComplexVector rhs = assemble_rhs(*mesh, prob_config, *dofs);

    auto cover = std::make_shared<const Cover>(
        build_cover(*mesh, *dofs, sz.n_sub_per_dir, sz.overlap_layers, spec.bc, spec.pou));
    std::shared_ptr<const CoarseSpace> coarse;
    if (need_coarse) {
      coarse = std::make_shared<const CoarseSpace>(build_coarse_restriction(
          build_nested_pair(mesh, sz.n_coarse), *dofs, spec.bc));
      row.n_cs = coarse->coarse_dofs.size();
    }
    row.n = dofs->size();

    const ProblemConfig prec_config{k, sz.kappa_prec, spec.bc, SourceKind::GaussianBump};
    row.columns.resize(spec.kinds.size());

    // PEC-block kinds first, then impedance-block kinds, so only one family
    // of local factorizations is alive at a time.
    for (bool imp_family : {false, true}) {
      SchwarzBuilder builder(mesh, cover, coarse, prec_config, dofs, a_prec);
      for (std::size_t c = 0; c < spec.kinds.size(); ++c) {
        const auto& col = spec.kinds[c];
        if (uses_impedance_blocks(col.kind) != imp_family) continue;
        const Preconditioner precond = builder.build(col.kind, col.levels);
        const double setup = builder.setup_seconds(col.kind, col.levels);

        GmresConfig gcfg;
        gcfg.tol = spec.tol;
        gcfg.max_iter = spec.max_iter;
        gcfg.seed = spec.seed;
        const auto start = Clock::now();
        const auto res = gmres(matrix_operator(*a_prob), preconditioner_operator(precond), rhs,
                               nullptr, gcfg);
        auto& out = row.columns[c];
        out.iterations = res.iterations;
        out.converged = res.converged;
        out.final_residual = res.final_relative_residual();
        out.seconds = setup + seconds_since(start);
        say("  " + column_label(col) + ": " + std::to_string(res.iterations) + " iterations" +
            (res.converged ? "" : " (not converged)") + ", " + std::to_string(out.seconds) + " s");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

double fit_growth_exponent(const std::vector<double>& ks, const std::vector<double>& ys) {
  if (ks.size() != ys.size()) throw InvalidArgument("fit_growth_exponent: length mismatch");
  if (ks.size() < 2) throw InvalidArgument("fit_growth_exponent: need at least two points");
  double sx = 0.0, sy = 0.0;
  const double m = static_cast<double>(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || !(ys[i] > 0.0))
      throw InvalidArgument("fit_growth_exponent: values must be positive");
    sx += std::log(ks[i]);
    sy += std::log(ys[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double dx = std::log(ks[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_growth_exponent: k values must not all coincide");
  return sxy / sxx;
}

ManufacturedResult solve_manufactured(int n) {
  const TetMesh mesh = build_cube_mesh(n);
  const DofMap dofs = make_dof_map(mesh, BoundaryCondition::PEC);
  const auto ops = assemble_operators(mesh, dofs, BoundaryCondition::PEC);
  SparseComplexMatrix a = ops.curl_curl.cast<Complex>();
  for (int p = 0; p < a.nonZeros(); ++p) a.valuePtr()[p] += ops.mass.valuePtr()[p];
  const ProblemConfig config{1.0, 0.0, BoundaryCondition::PEC, SourceKind::Manufactured};
  const ComplexVector rhs = assemble_rhs(mesh, config, dofs);
  const ComplexVector u = SparseLdlt(a).solve(rhs);

  const auto rule = tet_quadrature(6);
  double err_l2 = 0.0, err_curl = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto x = mesh.tet_coordinates(t);
    const double vol = signed_volume(x);
    const auto g = barycentric_gradients(x);
    std::array<double, 6> c{};
    Vector3 curl_h = Vector3::Zero();
    for (int e = 0; e < 6; ++e) {
      const auto& te = mesh.tet_edges[t][e];
      const int d = dofs.dof_of_edge[te.edge];
      c[e] = d >= 0 ? u[d].real() : 0.0;
      curl_h += c[e] * 2.0 * te.sign * g[kLocalEdges[e][0]].cross(g[kLocalEdges[e][1]]);
    }
    for (const auto& q : rule) {
      Point p{0.0, 0.0, 0.0};
      for (int v = 0; v < 4; ++v)
        for (int d = 0; d < 3; ++d) p[d] += q.barycentric[v] * x[v][d];
      Vector3 eh = Vector3::Zero();
      for (int e = 0; e < 6; ++e) eh += c[e] * edge_basis(g, q.barycentric, e, mesh.tet_edges[t][e].sign);
      err_l2 += vol * q.w * (manufactured_field(p) - eh).squaredNorm();
      err_curl += vol * q.w * (manufactured_curl(p) - curl_h).squaredNorm();
    }
  }
  return {n, dofs.size(), std::sqrt(err_l2 + err_curl), std::sqrt(err_l2)};
}

}  // namespace maxdd
