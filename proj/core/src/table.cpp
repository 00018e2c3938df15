#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "maxdd/experiments.hpp"

namespace maxdd {
namespace {

using Grid = std::vector<std::vector<std::string>>;

std::string number(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> header(const ResultTable& table) {
  std::vector<std::string> h{"k", "n", "N_sub", "n_CS"};
  for (const auto& c : table.columns) h.push_back(column_label(c));
  for (const auto& c : table.columns) h.push_back("Time" + column_label(c).substr(1));
  return h;
}

// Fitted exponent for one column, or "" if fewer than two usable rows.
std::string fitted(const std::vector<double>& ks, const std::vector<double>& ys, bool xi) {
  if (ks.size() < 2) return "";
  try {
    const double g = fit_growth_exponent(ks, ys);
    return fixed(xi ? xi_from_gamma(g) : g, 2);
  } catch (const InvalidArgument&) {
    return "";
  }
}

Grid build_grid(const ResultTable& table) {
  Grid grid{header(table)};
  const std::size_t nk = table.columns.size();
  for (const auto& row : table.rows) {
    std::vector<std::string> line{number(row.k), std::to_string(row.n),
                                  std::to_string(row.n_subdomains), std::to_string(row.n_cs)};
    for (std::size_t c = 0; c < nk; ++c) {
      if (row.skipped || c >= row.columns.size()) {
        line.push_back("-");
        continue;
      }
      const auto& r = row.columns[c];
      line.push_back(r.converged ? std::to_string(r.iterations)
                                 : "> " + std::to_string(table.max_iter));
    }
    for (std::size_t c = 0; c < nk; ++c)
      line.push_back(row.skipped || c >= row.columns.size() ? "-" : fixed(row.columns[c].seconds, 2));
    grid.push_back(std::move(line));
  }
  if (!table.fit || table.rows.empty()) return grid;

  // Growth exponents for n and each iteration column over the completed rows.
  for (bool xi : {false, true}) {
    std::vector<std::string> line{xi ? "xi" : "gamma"};
    std::vector<double> ks, ns;
    for (const auto& row : table.rows)
      if (!row.skipped) {
        ks.push_back(row.k);
        ns.push_back(static_cast<double>(row.n));
      }
    line.push_back(fitted(ks, ns, xi));
    line.push_back("");
    line.push_back("");
    for (std::size_t c = 0; c < nk; ++c) {
      std::vector<double> kc, ys;
      for (const auto& row : table.rows) {
        if (row.skipped || c >= row.columns.size()) continue;
        const auto& r = row.columns[c];
        kc.push_back(row.k);
        ys.push_back(r.converged ? r.iterations : table.max_iter);
      }
      line.push_back(fitted(kc, ys, xi));
    }
    for (std::size_t c = 0; c < nk; ++c) line.push_back("");
    grid.push_back(std::move(line));
  }
  return grid;
}

}  // namespace

std::string emit_table(const ResultTable& table, TableFormat format) {
  const Grid grid = build_grid(table);
  std::ostringstream os;
  if (format == TableFormat::CSV) {
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) os << (i ? "," : "") << line[i];
      os << '\n';
    }
    return os.str();
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  auto emit_line = [&](const std::vector<std::string>& line) {
    os << '|';
    for (std::size_t i = 0; i < line.size(); ++i)
      os << ' ' << line[i] << std::string(width[i] - line[i].size(), ' ') << " |";
    os << '\n';
  };
  emit_line(grid[0]);
  os << '|';
  for (std::size_t w : width) os << std::string(w + 2, '-') << '|';
  os << '\n';
  for (std::size_t r = 1; r < grid.size(); ++r) emit_line(grid[r]);
  return os.str();
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(fields));
  }
  return out;
}

}  // namespace maxdd
