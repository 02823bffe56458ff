#pragma once

// Temperature -> GDP loss under the four damage function variants:
//   R    regional quadratic in greenhouse warming
//   RU   adds the urban heat island expansion on urban cell-years
//   RP   R with persistence of losses at region level
//   RPU  RU with persistence
// Grid-cell losses are rescaled each year so the world R aggregate matches a
// chosen global damage function.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridscc/climate.hpp"
#include "gridscc/csv.hpp"
#include "gridscc/error.hpp"
#include "gridscc/region.hpp"
#include "gridscc/scenario.hpp"

namespace gridscc {

enum class Variant { R, RU, RP, RPU };

inline constexpr std::array<Variant, 4> kAllVariants = {Variant::R, Variant::RP, Variant::RU, Variant::RPU};

constexpr std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::R: return "R";
    case Variant::RU: return "RU";
    case Variant::RP: return "RP";
    case Variant::RPU: return "RPU";
  }
  return "?";
}

constexpr std::optional<Variant> parse_variant(std::string_view s) {
  for (auto v : kAllVariants)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

constexpr bool has_uhi(Variant v) { return v == Variant::RU || v == Variant::RPU; }
constexpr bool is_persistent(Variant v) { return v == Variant::RP || v == Variant::RPU; }

/// The variant without the urban term (RU -> R, RPU -> RP).
constexpr Variant without_uhi(Variant v) { return is_persistent(v) ? Variant::RP : Variant::R; }

struct RegionDamage {
  double alpha_r = 0.00236;  // fraction of GDP per degC^2
  double alpha_u = 0.00236;
  double phi = 0.0;
};

/// Per-region quadratic coefficients and persistence.
struct DamageParams {
  std::array<RegionDamage, kRegionCount> region{};

  const RegionDamage& of(Region r) const { return region[index_of(r)]; }
  RegionDamage& of(Region r) { return region[index_of(r)]; }

  std::array<double, kRegionCount> phi() const {
    std::array<double, kRegionCount> out{};
    for (std::size_t i = 0; i < kRegionCount; ++i) out[i] = region[i].phi;
    return out;
  }
};

inline void validate(const DamageParams& p) {
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const auto& d = p.region[i];
    if (!(d.alpha_r >= 0.0) || !(d.alpha_u >= 0.0))
      throw Error(ErrorCode::InvalidRange, std::string(kRegionCodes[i]) + ": damage coefficients must be >= 0");
    if (!(d.phi >= 0.0 && d.phi <= 1.0))
      throw Error(ErrorCode::PhiOutOfRange, std::string(kRegionCodes[i]) + ": phi = " + std::to_string(d.phi));
  }
}

/// Reads `region,alpha_r,alpha_u,phi`. A blank alpha_u takes the region's alpha_r.
/// Regions not listed keep the defaults in `base`.
inline DamageParams load_damage_params(const std::filesystem::path& path, DamageParams base = {}) {
  auto table = csv::Table::read(path);
  const auto c_region = table.column("region");
  const auto c_ar = table.column("alpha_r");
  const auto c_au = table.column("alpha_u");
  const auto c_phi = table.column("phi");
  std::array<bool, kRegionCount> seen{};
  for (std::size_t r = 0; r < table.size(); ++r) {
    auto region = parse_region(table.at(r, c_region));
    if (!region) throw Error(ErrorCode::UnknownRegion, table.where(r) + ": '" + std::string(table.at(r, c_region)) + "'");
    if (seen[index_of(*region)]) throw Error(ErrorCode::DuplicateRow, table.where(r));
    seen[index_of(*region)] = true;
    auto& d = base.of(*region);
    d.alpha_r = csv::parse_double(table.at(r, c_ar), table.where(r));
    d.alpha_u = table.at(r, c_au).empty() ? d.alpha_r : csv::parse_double(table.at(r, c_au), table.where(r));
    d.phi = csv::parse_double(table.at(r, c_phi), table.where(r));
  }
  validate(base);
  return base;
}

inline double cell_damage_fraction_r(double alpha_r, double t_ghg) { return alpha_r * t_ghg * t_ghg; }

/// alpha_r T_ghg^2 + 2 alpha_u T_ghg T_uhi + alpha_u T_uhi^2; reduces to the R form when T_uhi = 0.
inline double cell_damage_fraction_ru(double alpha_r, double alpha_u, double t_ghg, double t_uhi) {
  return alpha_r * t_ghg * t_ghg + 2.0 * alpha_u * t_ghg * t_uhi + alpha_u * t_uhi * t_uhi;
}

// ---------------------------------------------------------------------------
// Global damage functions

enum class GlobalDfKind { Quadratic, Weitzman, Table };

constexpr std::string_view to_string(GlobalDfKind k) {
  switch (k) {
    case GlobalDfKind::Quadratic: return "quadratic";
    case GlobalDfKind::Weitzman: return "weitzman";
    case GlobalDfKind::Table: return "external-table";
  }
  return "?";
}

/// quadratic:      D = c T^2                          (c defaults to the DICE2016 value)
/// weitzman:       D = d / (1 + d), d = (T/s1)^2 + (T/s2)^p
/// external-table: piecewise linear through (T_i, D_i), anchored at (0, 0),
///                 extended past the last point with the last slope
struct GlobalDf {
  GlobalDfKind kind = GlobalDfKind::Quadratic;
  double coefficient = 0.00236;
  double s1 = 20.46;
  double s2 = 6.081;
  double power = 6.754;
  std::vector<double> table_t;
  std::vector<double> table_d;

  static GlobalDf quadratic(double c = 0.00236) {
    GlobalDf df;
    df.coefficient = c;
    return df;
  }
  static GlobalDf weitzman(double s1 = 20.46, double s2 = 6.081, double power = 6.754) {
    GlobalDf df;
    df.kind = GlobalDfKind::Weitzman;
    df.s1 = s1;
    df.s2 = s2;
    df.power = power;
    return df;
  }
  static GlobalDf table(std::vector<double> t, std::vector<double> d) {
    GlobalDf df;
    df.kind = GlobalDfKind::Table;
    df.table_t = std::move(t);
    df.table_d = std::move(d);
    return df;
  }
};

inline void validate(const GlobalDf& df) {
  switch (df.kind) {
    case GlobalDfKind::Quadratic:
      if (!(df.coefficient >= 0.0)) throw Error(ErrorCode::InvalidRange, "quadratic coefficient must be >= 0");
      break;
    case GlobalDfKind::Weitzman:
      if (!(df.s1 > 0.0 && df.s2 > 0.0 && df.power > 0.0))
        throw Error(ErrorCode::InvalidRange, "weitzman parameters must be positive");
      break;
    case GlobalDfKind::Table: {
      const auto& t = df.table_t;
      const auto& d = df.table_d;
      if (t.empty() || t.size() != d.size())
        throw Error(ErrorCode::NonMonotoneTable, "table needs matching, non-empty temperature and damage columns");
      double prev_t = 0.0, prev_d = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const bool anchor = i == 0 && t[0] == 0.0;
        if (anchor ? d[0] != 0.0 : !(t[i] > prev_t && d[i] >= prev_d))
          throw Error(ErrorCode::NonMonotoneTable, "entry " + std::to_string(i));
        prev_t = t[i];
        prev_d = d[i];
      }
      break;
    }
  }
}

inline double global_df_eval(const GlobalDf& df, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidRange, "global DF evaluated at negative temperature");
  switch (df.kind) {
    case GlobalDfKind::Quadratic:
      return df.coefficient * t * t;
    case GlobalDfKind::Weitzman: {
      const double d = (t / df.s1) * (t / df.s1) + std::pow(t / df.s2, df.power);
      return d / (1.0 + d);
    }
    case GlobalDfKind::Table: {
      validate(df);
      double t0 = 0.0, d0 = 0.0;
      for (std::size_t i = 0; i < df.table_t.size(); ++i) {
        const double t1 = df.table_t[i], d1 = df.table_d[i];
        if (t <= t1) return t1 == t0 ? d1 : d0 + (d1 - d0) * (t - t0) / (t1 - t0);
        t0 = t1;
        d0 = d1;
      }
      // past the last point: continue the last segment
      const std::size_t n = df.table_t.size();
      const double tp = n >= 2 ? df.table_t[n - 2] : 0.0;
      const double dp = n >= 2 ? df.table_d[n - 2] : 0.0;
      const double slope = (d0 - dp) / (t0 - tp);
      return d0 + slope * (t - t0);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Scaling to the global damage function

struct ScalingSeries {
  std::vector<double> s;
};

/// s(t) = global_df(T(t)) * world_gdp(t) / r_aggregate(t), with s = 1 where
/// both numerator and denominator vanish.
inline ScalingSeries scaling_series(std::span<const double> world_gdp, const GlobalDf& df,
                                    std::span<const double> t_global, std::span<const double> r_aggregate) {
  if (world_gdp.size() != t_global.size() || world_gdp.size() != r_aggregate.size())
    throw Error(ErrorCode::OutOfRange, "scaling inputs are not aligned");
  ScalingSeries out;
  out.s.resize(world_gdp.size());
  for (std::size_t i = 0; i < world_gdp.size(); ++i) {
    const double target = global_df_eval(df, t_global[i]) * world_gdp[i];
    if (r_aggregate[i] == 0.0) {
      if (target != 0.0) throw Error(ErrorCode::ZeroDenominator, "R aggregate is zero at index " + std::to_string(i));
      out.s[i] = 1.0;
    } else {
      out.s[i] = target / r_aggregate[i];
    }
  }
  return out;
}

/// I(t) = L(t) + phi I(t-1), I(first) = L(first).
inline std::vector<double> apply_persistence(std::span<const double> per_period, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw Error(ErrorCode::PhiOutOfRange, "phi = " + std::to_string(phi));
  std::vector<double> out(per_period.begin(), per_period.end());
  if (phi == 0.0) return out;
  for (std::size_t t = 1; t < out.size(); ++t) out[t] = per_period[t] + phi * out[t - 1];
  return out;
}

/// Region-level form: one series per region, same phi vector layout as DamageParams.
inline std::array<std::vector<double>, kRegionCount> apply_persistence(
    const std::array<std::vector<double>, kRegionCount>& per_period, const std::array<double, kRegionCount>& phi) {
  std::array<std::vector<double>, kRegionCount> out;
  for (std::size_t r = 0; r < kRegionCount; ++r) out[r] = apply_persistence(per_period[r], phi[r]);
  return out;
}

// ---------------------------------------------------------------------------
// Region-level loss aggregates

enum class CellClass { NonUrban = 0, Urban = 1, All = 2 };

/// Per-period USD losses summed by (region, year, urban class). Everything
/// downstream of the grid (persistence, SCC, decomposition) works on these.
class RegionLosses {
 public:
  RegionLosses() = default;
  RegionLosses(YearAxis years, Variant variant, std::array<double, kRegionCount> phi)
      : years_(years), variant_(variant), phi_(phi), values_(kRegionCount * years.size() * 2, 0.0) {}

  const YearAxis& years() const { return years_; }
  Variant variant() const { return variant_; }
  const std::array<double, kRegionCount>& phi() const { return phi_; }

  double& at(std::size_t region, std::size_t y, CellClass cls) {
    return values_[(region * years_.size() + y) * 2 + static_cast<std::size_t>(cls)];
  }
  double at(std::size_t region, std::size_t y, CellClass cls) const {
    return values_[(region * years_.size() + y) * 2 + static_cast<std::size_t>(cls)];
  }

  /// Per-period losses of one region restricted to a cell class.
  std::vector<double> per_period(std::size_t region, CellClass cls) const {
    std::vector<double> out(years_.size());
    for (std::size_t y = 0; y < years_.size(); ++y)
      out[y] = cls == CellClass::All ? at(region, y, CellClass::NonUrban) + at(region, y, CellClass::Urban)
                                     : at(region, y, cls);
    return out;
  }

  /// Losses carried through the persistence recursion for persistent variants.
  std::vector<double> effective(std::size_t region, CellClass cls) const {
    auto series = per_period(region, cls);
    return is_persistent(variant_) ? apply_persistence(series, phi_[region]) : series;
  }

  /// Multiplies every entry of year index y.
  void scale_year(std::size_t y, double s) {
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      at(r, y, CellClass::NonUrban) *= s;
      at(r, y, CellClass::Urban) *= s;
    }
  }

  RegionLosses& operator+=(const RegionLosses& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }

 private:
  YearAxis years_;
  Variant variant_ = Variant::R;
  std::array<double, kRegionCount> phi_{};
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Cell-level ledger

/// Cell-major per-year loss fractions and (scaled) USD losses for one variant.
struct DamageLedger {
  Variant variant = Variant::R;
  YearAxis years;
  std::size_t cells = 0;
  std::vector<double> loss_fraction;
  std::vector<double> loss_usd;
  ScalingSeries scaling;                       // applied factors, 1 when unscaled
  std::vector<std::uint8_t> region;            // region index per cell
  std::vector<std::uint8_t> urban;             // urban flag per cell-year
  std::array<double, kRegionCount> phi{};

  double usd(std::size_t c, std::size_t y) const { return loss_usd[c * years.size() + y]; }
  double fraction(std::size_t c, std::size_t y) const { return loss_fraction[c * years.size() + y]; }

  RegionLosses aggregate() const {
    RegionLosses out(years, variant, phi);
    const std::size_t ny = years.size();
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t y = 0; y < ny; ++y)
        out.at(region[c], y, urban[c * ny + y] ? CellClass::Urban : CellClass::NonUrban) += loss_usd[c * ny + y];
    return out;
  }

  /// Region losses after persistence (the carried value I^p for RP/RPU).
  std::array<std::vector<double>, kRegionCount> persistence_state() const {
    auto agg = aggregate();
    std::array<std::vector<double>, kRegionCount> out;
    for (std::size_t r = 0; r < kRegionCount; ++r) out[r] = agg.effective(r, CellClass::All);
    return out;
  }

  /// World sum of loss_usd per year.
  std::vector<double> world_per_period() const {
    std::vector<double> out(years.size(), 0.0);
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t y = 0; y < years.size(); ++y) out[y] += loss_usd[c * years.size() + y];
    return out;
  }
};

/// Multiplies loss_usd(cell, t) by s(t).
inline DamageLedger apply_scaling(DamageLedger ledger, const ScalingSeries& s) {
  if (s.s.size() != ledger.years.size()) throw Error(ErrorCode::OutOfRange, "scaling series is not aligned");
  const std::size_t ny = ledger.years.size();
  for (std::size_t c = 0; c < ledger.cells; ++c)
    for (std::size_t y = 0; y < ny; ++y) ledger.loss_usd[c * ny + y] *= s.s[y];
  if (ledger.scaling.s.size() != ny) ledger.scaling.s.assign(ny, 1.0);
  for (std::size_t y = 0; y < ny; ++y) ledger.scaling.s[y] *= s.s[y];
  return ledger;
}

/// Per-period R-variant USD losses summed over all cells, per year.
inline std::vector<double> r_aggregate(const Scenario& scenario, const ClimateField& field, const DamageParams& params) {
  const std::size_t ny = scenario.year_count();
  std::vector<double> out(ny, 0.0);
  for (std::size_t c = 0; c < scenario.cell_count(); ++c) {
    const double alpha_r = params.of(scenario.cell(c).region).alpha_r;
    for (std::size_t y = 0; y < ny; ++y)
      out[y] += cell_damage_fraction_r(alpha_r, field.ghg(c, y)) * scenario.gdp(c, y);
  }
  return out;
}

/// Builds the ledger for `variant`. When `df` is given, every cell-year is
/// scaled by the factor that makes the world R aggregate match df(T_global) * world GDP;
/// the factor comes from the R variant and is reused for RU/RP/RPU.
/// `global` is the global anomaly trajectory that drove `field`.
inline DamageLedger build_ledger(const Scenario& scenario, const UrbanMask& mask, const ClimateField& field,
                                 Variant variant, const DamageParams& params, const std::optional<GlobalDf>& df,
                                 const GlobalTrajectory& global) {
  validate(params);
  if (field.years != scenario.years() || field.cells != scenario.cell_count() ||
      mask.cell_count() != scenario.cell_count() || mask.year_count() != scenario.year_count())
    throw Error(ErrorCode::OutOfRange, "scenario, mask and climate field axes differ");

  const std::size_t nc = scenario.cell_count();
  const std::size_t ny = scenario.year_count();
  DamageLedger ledger;
  ledger.variant = variant;
  ledger.years = scenario.years();
  ledger.cells = nc;
  ledger.loss_fraction.resize(nc * ny);
  ledger.loss_usd.resize(nc * ny);
  ledger.scaling.s.assign(ny, 1.0);
  ledger.region.resize(nc);
  ledger.urban.resize(nc * ny);
  ledger.phi = params.phi();

  for (std::size_t c = 0; c < nc; ++c) {
    const auto& d = params.of(scenario.cell(c).region);
    ledger.region[c] = static_cast<std::uint8_t>(index_of(scenario.cell(c).region));
    for (std::size_t y = 0; y < ny; ++y) {
      const bool urban = mask.urban(c, y);
      const double f = has_uhi(variant) && urban
                           ? cell_damage_fraction_ru(d.alpha_r, d.alpha_u, field.ghg(c, y), field.uhi(c, y))
                           : cell_damage_fraction_r(d.alpha_r, field.ghg(c, y));
      ledger.loss_fraction[c * ny + y] = f;
      ledger.loss_usd[c * ny + y] = f * scenario.gdp(c, y);
      ledger.urban[c * ny + y] = urban ? 1 : 0;
    }
  }

  if (df) {
    validate(*df);
    const auto traj = global.restricted(scenario.years());
    std::vector<double> world_gdp(ny);
    for (std::size_t y = 0; y < ny; ++y) world_gdp[y] = scenario.world_gdp(y);
    const auto s = scaling_series(world_gdp, *df, traj.anomaly, r_aggregate(scenario, field, params));
    ledger = apply_scaling(std::move(ledger), s);
  }
  return ledger;
}

}  // namespace gridscc
