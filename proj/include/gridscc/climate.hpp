#pragma once

// Hazard layer: pattern-scaled greenhouse warming per cell, the ECS
// distribution, and the urban heat island term a * P^b.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridscc/csv.hpp"
#include "gridscc/error.hpp"
#include "gridscc/scenario.hpp"

namespace gridscc {

/// Global mean temperature anomaly (degC above pre-industrial) per year.
struct GlobalTrajectory {
  std::string label;
  YearAxis years;
  std::vector<double> anomaly;

  double at(int year) const {
    if (!years.contains(year))
      throw Error(ErrorCode::YearOutOfRange, "trajectory has no year " + std::to_string(year));
    return anomaly[years.index(year)];
  }

  /// Restriction to `axis`; the trajectory must cover it.
  GlobalTrajectory restricted(YearAxis axis) const {
    if (axis.first < years.first || axis.last > years.last)
      throw Error(ErrorCode::OutOfRange, "trajectory [" + std::to_string(years.first) + ", " +
                                             std::to_string(years.last) + "] does not cover [" +
                                             std::to_string(axis.first) + ", " + std::to_string(axis.last) + "]");
    GlobalTrajectory out{label, axis, {}};
    out.anomaly.assign(anomaly.begin() + static_cast<std::ptrdiff_t>(years.index(axis.first)),
                       anomaly.begin() + static_cast<std::ptrdiff_t>(years.index(axis.last)) + 1);
    return out;
  }
};

/// Reads `year,anomaly_degC`; years must be contiguous and increasing.
inline GlobalTrajectory load_trajectory(const std::filesystem::path& path) {
  auto table = csv::Table::read(path);
  const auto c_year = table.column("year");
  const auto c_anom = table.column("anomaly_degC");
  GlobalTrajectory out;
  out.label = path.stem().string();
  for (std::size_t r = 0; r < table.size(); ++r) {
    const int year = static_cast<int>(csv::parse_int(table.at(r, c_year), table.where(r)));
    const double v = csv::parse_double(table.at(r, c_anom), table.where(r));
    if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, table.where(r) + ": non-finite anomaly");
    if (r == 0) {
      out.years.first = year;
    } else if (year != out.years.first + static_cast<int>(r)) {
      throw Error(ErrorCode::ParseError, table.where(r) + ": trajectory years must be annual and increasing");
    }
    out.anomaly.push_back(v);
  }
  if (out.anomaly.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty trajectory");
  out.years.last = out.years.first + static_cast<int>(out.anomaly.size()) - 1;
  return out;
}

/// Local degC per global degC, one slope per cell.
struct PatternField {
  std::string model_tag;
  std::unordered_map<std::int64_t, double> slope;

  double slope_of(const GridCell& cell) const {
    auto it = slope.find(cell.cell_id);
    if (it == slope.end()) throw Error(ErrorCode::MissingPattern, "cell " + std::to_string(cell.cell_id));
    return it->second;
  }

  /// Slopes in scenario cell order.
  std::vector<double> slopes_for(const Scenario& scenario) const {
    std::vector<double> out;
    out.reserve(scenario.cell_count());
    for (const auto& cell : scenario.cells()) out.push_back(slope_of(cell));
    return out;
  }
};

/// Reads `cell_id,slope`. Precipitation columns are rejected.
inline PatternField load_pattern(const std::filesystem::path& path) {
  auto table = csv::Table::read(path);
  for (const char* extra : {"precip_slope", "precipitation", "pr_slope"})
    if (table.has_column(extra))
      throw Error(ErrorCode::ParseError, path.string() + ": precipitation patterns are not supported");
  const auto c_id = table.column("cell_id");
  const auto c_slope = table.column("slope");
  PatternField out;
  out.model_tag = path.stem().string();
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto id = csv::parse_int(table.at(r, c_id), table.where(r));
    const double s = csv::parse_double(table.at(r, c_slope), table.where(r));
    if (!std::isfinite(s)) throw Error(ErrorCode::ParseError, table.where(r) + ": non-finite slope");
    if (!out.slope.emplace(id, s).second)
      throw Error(ErrorCode::DuplicateRow, table.where(r) + ": cell " + std::to_string(id));
  }
  return out;
}

/// Triangular equilibrium climate sensitivity, degC.
struct EcsDistribution {
  double lower = 2.0;
  double mode = 3.0;
  double upper = 5.0;
};

inline constexpr double kReferenceEcs = 3.0;

/// Inverse CDF of the triangular distribution at u in [0, 1].
inline double sample_ecs(const EcsDistribution& d, double u) {
  if (!(d.lower < d.mode && d.mode < d.upper))
    throw Error(ErrorCode::InvalidRange, "ECS distribution needs lower < mode < upper");
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::InvalidRange, "deviate outside [0, 1]");
  const double width = d.upper - d.lower;
  const double at_mode = (d.mode - d.lower) / width;
  if (u <= at_mode) return d.lower + std::sqrt(u * width * (d.mode - d.lower));
  return d.upper - std::sqrt((1.0 - u) * width * (d.upper - d.mode));
}

/// First-order stand-in for re-running the climate emulator at another ECS.
inline GlobalTrajectory scale_trajectory(const GlobalTrajectory& reference, double ecs,
                                         double reference_ecs = kReferenceEcs) {
  if (!(reference_ecs > 0.0) || !(ecs > 0.0))
    throw Error(ErrorCode::NonPositiveEcs, "ecs " + std::to_string(ecs) + ", reference " + std::to_string(reference_ecs));
  GlobalTrajectory out = reference;
  const double factor = ecs / reference_ecs;
  for (double& v : out.anomaly) v *= factor;
  return out;
}

inline double local_temperature(const GlobalTrajectory& global, const PatternField& pattern, const GridCell& cell,
                                int year) {
  return pattern.slope_of(cell) * global.at(year);
}

struct UhiParams {
  double a = 1.85e-3;  // degC; placeholder default, not a published value
  double b = 0.45;
};

inline void validate(const UhiParams& p) {
  if (!(p.a >= 0.0)) throw Error(ErrorCode::InvalidRange, "UHI coefficient a must be >= 0");
  if (!(p.b > 0.0 && p.b < 1.0)) throw Error(ErrorCode::InvalidRange, "UHI exponent b must lie in (0, 1)");
}

inline double uhi_intensity(const UhiParams& p, double population) {
  if (population <= 0.0) return 0.0;
  return p.a * std::pow(population, p.b);
}

/// Per-cell, per-year warming, cell-major like Scenario.
struct ClimateField {
  YearAxis years;
  std::size_t cells = 0;
  std::vector<double> t_ghg;
  std::vector<double> t_uhi;

  double ghg(std::size_t c, std::size_t y) const { return t_ghg[c * years.size() + y]; }
  double uhi(std::size_t c, std::size_t y) const { return t_uhi[c * years.size() + y]; }
};

/// Population that drives the UHI term. With `ratchet`, the running maximum
/// so that UHI never recedes when population declines.
inline std::vector<double> uhi_population(std::span<const double> population, bool ratchet) {
  std::vector<double> out(population.begin(), population.end());
  if (ratchet)
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

inline ClimateField build_climate_field(const Scenario& scenario, const UrbanMask& mask,
                                        const GlobalTrajectory& global, const PatternField& pattern,
                                        const UhiParams& uhi, bool ratchet = false) {
  validate(uhi);
  const auto axis = scenario.years();
  const auto traj = global.restricted(axis);
  const auto slopes = pattern.slopes_for(scenario);
  const std::size_t ny = axis.size();

  ClimateField field{axis, scenario.cell_count(), std::vector<double>(scenario.cell_count() * ny),
                     std::vector<double>(scenario.cell_count() * ny, 0.0)};
  for (std::size_t c = 0; c < scenario.cell_count(); ++c) {
    const auto pop = uhi_population(scenario.population_series(c), ratchet);
    for (std::size_t y = 0; y < ny; ++y) {
      field.t_ghg[c * ny + y] = slopes[c] * traj.anomaly[y];
      if (mask.urban(c, y)) field.t_uhi[c * ny + y] = uhi_intensity(uhi, pop[y]);
    }
  }
  return field;
}

}  // namespace gridscc
