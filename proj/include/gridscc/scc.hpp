#pragma once

// Social cost of carbon from a baseline/pulsed pair of runs, its urban and
// non-urban decomposition, and the social cost of the urban heat island.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gridscc/climate.hpp"
#include "gridscc/damage.hpp"
#include "gridscc/error.hpp"
#include "gridscc/pulse.hpp"
#include "gridscc/region.hpp"
#include "gridscc/scenario.hpp"

namespace gridscc {

struct DiscountSpec {
  double rate = 0.015;
  int base_year = 2010;
  int horizon = 2100;
};

inline void validate(const DiscountSpec& d) {
  if (!(d.rate > -1.0)) throw Error(ErrorCode::InvalidRange, "discount rate must exceed -1");
  if (d.horizon < d.base_year) throw Error(ErrorCode::InvalidRange, "horizon precedes discount base year");
}

/// (1 + rate)^-(year - base_year)
inline double discount_factor(const DiscountSpec& d, int year) {
  if (year < d.base_year || year > d.horizon)
    throw Error(ErrorCode::YearOutOfRange, "year " + std::to_string(year) + " outside [" +
                                               std::to_string(d.base_year) + ", " + std::to_string(d.horizon) + "]");
  return std::pow(1.0 + d.rate, -static_cast<double>(year - d.base_year));
}

/// Discount factors on `axis`; zero for years outside [base_year, horizon].
inline std::vector<double> discount_weights(const DiscountSpec& d, YearAxis axis) {
  validate(d);
  std::vector<double> w(axis.size(), 0.0);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const int year = axis.year(i);
    if (year >= d.base_year && year <= d.horizon) w[i] = discount_factor(d, year);
  }
  return w;
}

/// Present value, per region, of (hi - lo) restricted to one cell class, with
/// persistence applied to each run before differencing.
inline RegionValues discounted_difference(const RegionLosses& hi, const RegionLosses& lo, CellClass cls,
                                          const DiscountSpec& d) {
  if (hi.variant() != lo.variant())
    throw Error(ErrorCode::VariantMismatch,
                std::string(to_string(hi.variant())) + " vs " + std::string(to_string(lo.variant())));
  if (hi.years() != lo.years()) throw Error(ErrorCode::VariantMismatch, "runs are on different year axes");
  const auto w = discount_weights(d, hi.years());
  RegionValues out{};
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    const auto a = hi.effective(r, cls);
    const auto b = lo.effective(r, cls);
    double pv = 0.0;
    for (std::size_t y = 0; y < w.size(); ++y) pv += w[y] * (a[y] - b[y]);
    out[r] = pv;
  }
  return out;
}

/// SCC of one variant, USD per tCO2 by region; the world value is the plain sum.
struct SccReport {
  Variant variant = Variant::R;
  RegionValues region{};

  double world() const { return world_total(region); }
  /// Share of the world total; zero when the world total is zero.
  double fraction(std::size_t r) const {
    const double w = world();
    return w == 0.0 ? 0.0 : region[r] / w;
  }
};

inline double tonnes_co2(const PulseParams& pulse) { return pulse.size_gtc * kTonnesCo2PerGtC; }

inline SccReport scc(const RegionLosses& base, const RegionLosses& pulsed, const DiscountSpec& d,
                     const PulseParams& pulse) {
  SccReport out{base.variant(), discounted_difference(pulsed, base, CellClass::All, d)};
  const double tonnes = tonnes_co2(pulse);
  for (double& v : out.region) v /= tonnes;
  return out;
}

inline SccReport scc(const DamageLedger& base, const DamageLedger& pulsed, const DiscountSpec& d,
                     const PulseParams& pulse) {
  if (base.variant != pulsed.variant) throw Error(ErrorCode::VariantMismatch, "baseline and pulsed ledgers");
  return scc(base.aggregate(), pulsed.aggregate(), d, pulse);
}

// ---------------------------------------------------------------------------
// Decomposition

/// One row of the five-way split. Stored components are nu, u and u_nouhi;
/// exposure and uhi_int are derived so the identities hold by construction.
struct DecompositionRow {
  double nu = 0.0;       // non-urban cells, R (or RP)
  double u = 0.0;        // urban cells, RU (or RPU)
  double u_nouhi = 0.0;  // urban cells, R (or RP)

  double exposure() const { return u_nouhi - nu; }
  double uhi_int() const { return u - u_nouhi; }
  double total() const { return nu + u; }
};

struct Decomposition {
  bool persistent = false;
  std::array<DecompositionRow, kRegionCount> region{};

  DecompositionRow world() const {
    DecompositionRow w;
    for (const auto& row : region) {
      w.nu += row.nu;
      w.u += row.u;
      w.u_nouhi += row.u_nouhi;
    }
    return w;
  }
};

/// Splits the SCC of the UHI variant. `r_*` are runs of R (or RP), `ru_*`
/// of RU (or RPU), all on the same scenario and mask.
inline Decomposition decompose(const RegionLosses& r_base, const RegionLosses& r_pulsed, const RegionLosses& ru_base,
                               const RegionLosses& ru_pulsed, const DiscountSpec& d, const PulseParams& pulse) {
  if (has_uhi(r_base.variant()) || !has_uhi(ru_base.variant()) ||
      is_persistent(r_base.variant()) != is_persistent(ru_base.variant()))
    throw Error(ErrorCode::VariantMismatch, "decomposition needs (R, RU) or (RP, RPU) runs");
  const double tonnes = tonnes_co2(pulse);
  const auto nu = discounted_difference(r_pulsed, r_base, CellClass::NonUrban, d);
  const auto u_nouhi = discounted_difference(r_pulsed, r_base, CellClass::Urban, d);
  const auto u = discounted_difference(ru_pulsed, ru_base, CellClass::Urban, d);
  Decomposition out;
  out.persistent = is_persistent(ru_base.variant());
  for (std::size_t r = 0; r < kRegionCount; ++r) out.region[r] = {nu[r] / tonnes, u[r] / tonnes, u_nouhi[r] / tonnes};
  return out;
}

inline Decomposition decompose(const DamageLedger& r_base, const DamageLedger& r_pulsed, const DamageLedger& ru_base,
                               const DamageLedger& ru_pulsed, const DiscountSpec& d, const PulseParams& pulse) {
  return decompose(r_base.aggregate(), r_pulsed.aggregate(), ru_base.aggregate(), ru_pulsed.aggregate(), d, pulse);
}

// ---------------------------------------------------------------------------
// Social cost of the urban heat island

struct ScuhiOptions {
  bool persistent = false;           // carry derivative losses through the persistence recursion
  bool ratchet = false;              // UHI population is the running maximum
  std::vector<double> scaling;       // per-year global-DF scaling; empty means 1
};

/// Present value of dD/da summed over urban cell-years, by region, where
/// dD/da = 2 alpha_u (T_ghg + T_uhi) P^b and losses are GDP-weighted.
inline RegionValues scuhi_marginal_a(const Scenario& scenario, const UrbanMask& mask, const ClimateField& field,
                                     const UhiParams& uhi, const DamageParams& params, const DiscountSpec& d,
                                     const ScuhiOptions& opt = {}) {
  const std::size_t ny = scenario.year_count();
  const auto w = discount_weights(d, scenario.years());
  std::array<std::vector<double>, kRegionCount> per_year;
  for (auto& v : per_year) v.assign(ny, 0.0);
  for (std::size_t c = 0; c < scenario.cell_count(); ++c) {
    const auto region = index_of(scenario.cell(c).region);
    const double alpha_u = params.region[region].alpha_u;
    const auto pop = uhi_population(scenario.population_series(c), opt.ratchet);
    for (std::size_t y = 0; y < ny; ++y) {
      if (!mask.urban(c, y)) continue;
      const double s = opt.scaling.empty() ? 1.0 : opt.scaling[y];
      const double pb = pop[y] > 0.0 ? std::pow(pop[y], uhi.b) : 0.0;
      per_year[region][y] += s * scenario.gdp(c, y) * 2.0 * alpha_u * (field.ghg(c, y) + field.uhi(c, y)) * pb;
    }
  }
  RegionValues out{};
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    const auto series = opt.persistent ? apply_persistence(per_year[r], params.region[r].phi) : per_year[r];
    for (std::size_t y = 0; y < ny; ++y) out[r] += w[y] * series[y];
  }
  return out;
}

struct CellMarginal {
  std::int64_t cell_id = 0;
  Region region = Region::US;
  double value = 0.0;
};

/// Per urban cell, present value of dD/dP = 2 alpha_u a b (T_ghg + T_uhi) P^(b-1),
/// GDP-weighted. Cells never urban are omitted.
inline std::vector<CellMarginal> scuhi_marginal_p(const Scenario& scenario, const UrbanMask& mask,
                                                  const ClimateField& field, const UhiParams& uhi,
                                                  const DamageParams& params, const DiscountSpec& d,
                                                  const ScuhiOptions& opt = {}) {
  const std::size_t ny = scenario.year_count();
  const auto w = discount_weights(d, scenario.years());
  std::vector<CellMarginal> out;
  for (std::size_t c = 0; c < scenario.cell_count(); ++c) {
    const auto& cell = scenario.cell(c);
    const auto& dp = params.of(cell.region);
    const auto pop = uhi_population(scenario.population_series(c), opt.ratchet);
    std::vector<double> series(ny, 0.0);
    bool any = false;
    for (std::size_t y = 0; y < ny; ++y) {
      if (!mask.urban(c, y)) continue;
      if (!(pop[y] > 0.0))
        throw Error(ErrorCode::ZeroPopulation, "cell " + std::to_string(cell.cell_id) + ", year " +
                                                   std::to_string(scenario.years().year(y)));
      any = true;
      const double s = opt.scaling.empty() ? 1.0 : opt.scaling[y];
      series[y] = s * scenario.gdp(c, y) * 2.0 * dp.alpha_u * uhi.a * uhi.b * (field.ghg(c, y) + field.uhi(c, y)) *
                  std::pow(pop[y], uhi.b - 1.0);
    }
    if (!any) continue;
    if (opt.persistent) series = apply_persistence(series, dp.phi);
    double pv = 0.0;
    for (std::size_t y = 0; y < ny; ++y) pv += w[y] * series[y];
    out.push_back({cell.cell_id, cell.region, pv});
  }
  return out;
}

enum class ReferencePopulation { PulseYear, Horizon, Mean };

/// Urban population per region used to express SCUHI per dweller.
inline RegionValues reference_urban_population(const Scenario& scenario, const UrbanMask& mask, const DiscountSpec& d,
                                               ReferencePopulation mode = ReferencePopulation::PulseYear) {
  const auto axis = scenario.years();
  std::vector<std::size_t> years;
  auto add_year = [&](int year) {
    if (!axis.contains(year))
      throw Error(ErrorCode::YearOutOfRange, "reference year " + std::to_string(year) + " not on the scenario axis");
    years.push_back(axis.index(year));
  };
  switch (mode) {
    case ReferencePopulation::PulseYear: add_year(std::max(d.base_year, axis.first)); break;
    case ReferencePopulation::Horizon: add_year(std::min(d.horizon, axis.last)); break;
    case ReferencePopulation::Mean:
      for (int t = std::max(d.base_year, axis.first); t <= std::min(d.horizon, axis.last); ++t) add_year(t);
      break;
  }
  RegionValues out{};
  for (std::size_t c = 0; c < scenario.cell_count(); ++c)
    for (auto y : years)
      if (mask.urban(c, y)) out[index_of(scenario.cell(c).region)] += scenario.population(c, y);
  if (!years.empty())
    for (double& v : out) v /= static_cast<double>(years.size());
  return out;
}

struct ScuhiReport {
  Variant variant = Variant::RU;
  double reduction = 0.01;
  RegionValues total_npv{};         // USD-2005
  RegionValues urban_population{};  // reference urban dwellers

  double world_npv() const { return world_total(total_npv); }
  double world_population() const { return world_total(urban_population); }
  double per_dweller(std::size_t r) const {
    return urban_population[r] > 0.0 ? total_npv[r] / urban_population[r] : 0.0;
  }
  double world_per_dweller() const {
    const double p = world_population();
    return p > 0.0 ? world_npv() / p : 0.0;
  }
};

/// Benefit of lowering a by `reduction`: PV of urban losses under a minus
/// those under (1 - reduction) a. Both runs share everything else.
inline ScuhiReport scuhi_one_percent(const RegionLosses& base, const RegionLosses& reduced, const DiscountSpec& d,
                                     const RegionValues& reference_population, double reduction = 0.01) {
  if (!has_uhi(base.variant()))
    throw Error(ErrorCode::VariantMismatch, "SCUHI needs an RU or RPU run");
  ScuhiReport out;
  out.variant = base.variant();
  out.reduction = reduction;
  out.total_npv = discounted_difference(base, reduced, CellClass::Urban, d);
  out.urban_population = reference_population;
  return out;
}

inline ScuhiReport scuhi_one_percent(const DamageLedger& base, const DamageLedger& reduced, const DiscountSpec& d,
                                     const RegionValues& reference_population, double reduction = 0.01) {
  return scuhi_one_percent(base.aggregate(), reduced.aggregate(), d, reference_population, reduction);
}

// ---------------------------------------------------------------------------
// Ensemble summaries

/// Linear-interpolation quantile of unsorted data (q in [0, 1]).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyEnsemble, "no values");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidRange, "quantile outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct EnsembleSummary {
  Variant variant = Variant::R;
  std::vector<double> quantiles;
  std::vector<RegionValues> region;  // one per quantile
  std::vector<double> world;         // quantiles of the world total
};

inline EnsembleSummary ensemble_percentiles(const std::vector<SccReport>& reports, const std::vector<double>& quantiles) {
  if (reports.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
  EnsembleSummary out;
  out.variant = reports.front().variant;
  out.quantiles = quantiles;
  for (const auto& rep : reports)
    if (rep.variant != out.variant) throw Error(ErrorCode::VariantMismatch, "mixed variants in ensemble");
  std::vector<double> column(reports.size());
  for (double q : quantiles) {
    RegionValues row{};
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      for (std::size_t i = 0; i < reports.size(); ++i) column[i] = reports[i].region[r];
      row[r] = quantile(column, q);
    }
    out.region.push_back(row);
    for (std::size_t i = 0; i < reports.size(); ++i) column[i] = reports[i].world();
    out.world.push_back(quantile(column, q));
  }
  return out;
}

}  // namespace gridscc
