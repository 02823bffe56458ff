#pragma once

// CSV report layouts.
//
// table1.csv      region,<V>,<V>_pct,...       variants in the order R, RP, RU, RPU;
//                                               13 region rows then WORLD; pct of world SCC
// table2.csv      region,nonurban_R,urban_RU,urban_nouhi_R,exposure_R,uhi_int_RU[,..._RP/RPU]
// scuhi.csv       variant,region,npv_usd,urban_population,per_dweller_usd,marginal_a_npv
// percentiles.csv variant,region,q<q>...
// Monetary values are USD-2005 (per tCO2 for SCC) printed with 10 significant
// digits; percentages are computed from unrounded values and printed with 2 decimals.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridscc/error.hpp"
#include "gridscc/region.hpp"
#include "gridscc/scc.hpp"

namespace gridscc {

inline std::string format_value(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string format_percent(double fraction) {
  double pct = 100.0 * fraction;
  if (pct == 0.0) pct = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", pct);
  return buf;
}

inline std::vector<Variant> table_order(const std::map<Variant, SccReport>& reports) {
  std::vector<Variant> out;
  for (auto v : kAllVariants)
    if (reports.count(v)) out.push_back(v);
  return out;
}

inline std::string format_table1(const std::map<Variant, SccReport>& reports) {
  const auto order = table_order(reports);
  std::string out = "region";
  for (auto v : order) out += "," + std::string(to_string(v)) + "," + std::string(to_string(v)) + "_pct";
  out += "\n";
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    out += std::string(kRegionCodes[r]);
    for (auto v : order) {
      const auto& rep = reports.at(v);
      out += "," + format_value(rep.region[r]) + "," + format_percent(rep.fraction(r));
    }
    out += "\n";
  }
  out += "WORLD";
  for (auto v : order) {
    const auto& rep = reports.at(v);
    out += "," + format_value(rep.world()) + "," + format_percent(rep.world() == 0.0 ? 0.0 : 1.0);
  }
  out += "\n";
  return out;
}

/// Relative closure check used before emission.
inline bool closes(double lhs, double rhs, double rel = 1e-9) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) <= rel * scale;
}

/// Checks nu + u_nouhi + uhi_int == total for every row and, when the SCC of
/// the UHI variant is supplied, that nu + u reproduces it.
inline void verify_decomposition(const Decomposition& d, const std::optional<SccReport>& total = std::nullopt) {
  auto check = [&](const DecompositionRow& row, double expected_total, const std::string& where) {
    if (!closes(row.nu + row.u_nouhi + row.uhi_int(), row.total()))
      throw Error(ErrorCode::IoFailure, "decomposition does not close for " + where);
    if (total && !closes(row.total(), expected_total, 1e-9) && std::abs(row.total() - expected_total) > 1e-12)
      throw Error(ErrorCode::IoFailure, "decomposition total differs from the SCC for " + where);
  };
  for (std::size_t r = 0; r < kRegionCount; ++r)
    check(d.region[r], total ? total->region[r] : 0.0, std::string(kRegionCodes[r]));
  check(d.world(), total ? total->world() : 0.0, "WORLD");
}

struct DecompositionGroup {
  Decomposition decomposition;
  std::optional<SccReport> total;  // SCC of RU (or RPU) for the closure check
};

inline std::string format_table2(const std::optional<DecompositionGroup>& plain,
                                 const std::optional<DecompositionGroup>& persistent) {
  std::vector<const DecompositionGroup*> groups;
  if (plain) groups.push_back(&*plain);
  if (persistent) groups.push_back(&*persistent);
  for (const auto* g : groups) verify_decomposition(g->decomposition, g->total);

  std::string out = "region";
  for (const auto* g : groups) {
    const std::string r = g->decomposition.persistent ? "RP" : "R";
    const std::string ru = g->decomposition.persistent ? "RPU" : "RU";
    out += ",nonurban_" + r + ",urban_" + ru + ",urban_nouhi_" + r + ",exposure_" + r + ",uhi_int_" + ru;
  }
  out += "\n";
  auto row_text = [](const DecompositionRow& row) {
    return "," + format_value(row.nu) + "," + format_value(row.u) + "," + format_value(row.u_nouhi) + "," +
           format_value(row.exposure()) + "," + format_value(row.uhi_int());
  };
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    out += std::string(kRegionCodes[r]);
    for (const auto* g : groups) out += row_text(g->decomposition.region[r]);
    out += "\n";
  }
  out += "WORLD";
  for (const auto* g : groups) out += row_text(g->decomposition.world());
  out += "\n";
  return out;
}

struct ScuhiRow {
  ScuhiReport report;
  RegionValues marginal_a{};  // PV of dD/da
};

inline std::string format_scuhi(const std::vector<ScuhiRow>& rows) {
  std::string out = "variant,region,npv_usd,urban_population,per_dweller_usd,marginal_a_npv\n";
  for (const auto& row : rows) {
    const auto& rep = row.report;
    const std::string v(to_string(rep.variant));
    for (std::size_t r = 0; r < kRegionCount; ++r)
      out += v + "," + std::string(kRegionCodes[r]) + "," + format_value(rep.total_npv[r]) + "," +
             format_value(rep.urban_population[r]) + "," + format_value(rep.per_dweller(r)) + "," +
             format_value(row.marginal_a[r]) + "\n";
    out += v + ",WORLD," + format_value(rep.world_npv()) + "," + format_value(rep.world_population()) + "," +
           format_value(rep.world_per_dweller()) + "," + format_value(world_total(row.marginal_a)) + "\n";
  }
  return out;
}

inline std::string format_percentiles(const std::vector<EnsembleSummary>& summaries) {
  if (summaries.empty()) return "variant,region\n";
  std::string out = "variant,region";
  for (double q : summaries.front().quantiles) out += ",q" + format_value(q);
  out += "\n";
  for (const auto& s : summaries) {
    const std::string v(to_string(s.variant));
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      out += v + "," + std::string(kRegionCodes[r]);
      for (std::size_t i = 0; i < s.quantiles.size(); ++i) out += "," + format_value(s.region[i][r]);
      out += "\n";
    }
    out += v + ",WORLD";
    for (double w : s.world) out += "," + format_value(w);
    out += "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace gridscc
