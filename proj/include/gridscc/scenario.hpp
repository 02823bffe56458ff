#pragma once

// Gridded socioeconomic exposure: population and GDP per cell and year,
// plus the region each cell reports to and the urban classification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscc/csv.hpp"
#include "gridscc/error.hpp"
#include "gridscc/region.hpp"

namespace gridscc {

inline constexpr double kDefaultUrbanThreshold = 250'000.0;

struct GridCell {
  std::int64_t cell_id = 0;
  double lat = 0.0;
  double lon = 0.0;
  Region region = Region::US;
};

/// Inclusive annual axis [first, last].
struct YearAxis {
  int first = 0;
  int last = -1;

  std::size_t size() const { return last < first ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool contains(int year) const { return year >= first && year <= last; }
  std::size_t index(int year) const { return static_cast<std::size_t>(year - first); }
  int year(std::size_t i) const { return first + static_cast<int>(i); }
  friend bool operator==(const YearAxis&, const YearAxis&) = default;
};

/// Population and GDP of one cell on an annual axis.
struct CellTimeseries {
  YearAxis years;
  std::vector<double> population;
  std::vector<double> gdp;
};

/// Population and GDP of one cell at irregular (typically decadal) support years.
struct SparseTimeseries {
  std::vector<int> years;
  std::vector<double> population;
  std::vector<double> gdp;
};

/// Piecewise-linear interpolation onto `axis`. Support values are returned
/// unchanged; years outside the support range raise OutOfRange.
inline CellTimeseries interpolate_annual(const SparseTimeseries& sparse, YearAxis axis) {
  const auto& ys = sparse.years;
  if (ys.size() < 2) throw Error(ErrorCode::OutOfRange, "interpolation needs at least two support years");
  if (sparse.population.size() != ys.size() || sparse.gdp.size() != ys.size())
    throw Error(ErrorCode::ParseError, "support series lengths differ");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] <= ys[i - 1]) throw Error(ErrorCode::ParseError, "support years must be strictly increasing");
  if (axis.first < ys.front() || axis.last > ys.back())
    throw Error(ErrorCode::OutOfRange, "axis [" + std::to_string(axis.first) + ", " + std::to_string(axis.last) +
                                           "] exceeds supports [" + std::to_string(ys.front()) + ", " +
                                           std::to_string(ys.back()) + "]");

  CellTimeseries out;
  out.years = axis;
  out.population.resize(axis.size());
  out.gdp.resize(axis.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const int t = axis.year(i);
    while (seg + 1 < ys.size() && ys[seg + 1] <= t) ++seg;
    if (ys[seg] == t) {
      out.population[i] = sparse.population[seg];
      out.gdp[i] = sparse.gdp[seg];
      continue;
    }
    const double w = static_cast<double>(t - ys[seg]) / static_cast<double>(ys[seg + 1] - ys[seg]);
    out.population[i] = sparse.population[seg] + (sparse.population[seg + 1] - sparse.population[seg]) * w;
    out.gdp[i] = sparse.gdp[seg] + (sparse.gdp[seg + 1] - sparse.gdp[seg]) * w;
  }
  return out;
}

/// Immutable after construction. Series are stored cell-major:
/// value(cell, year) lives at [cell * years.size() + year_index].
class Scenario {
 public:
  Scenario() = default;

  Scenario(std::string label, YearAxis years, std::vector<GridCell> cells, std::vector<double> population,
           std::vector<double> gdp)
      : label_(std::move(label)),
        years_(years),
        cells_(std::move(cells)),
        population_(std::move(population)),
        gdp_(std::move(gdp)) {
    const std::size_t n = cells_.size() * years_.size();
    if (population_.size() != n || gdp_.size() != n)
      throw Error(ErrorCode::ParseError, "scenario series size does not match cells x years");
    for (std::size_t c = 0; c < cells_.size(); ++c)
      for (std::size_t y = 0; y < years_.size(); ++y) {
        const double p = population_[c * years_.size() + y];
        const double g = gdp_[c * years_.size() + y];
        if (!(p >= 0.0) || !(g >= 0.0) || !std::isfinite(p) || !std::isfinite(g))
          throw Error(ErrorCode::NegativeExposure, "cell " + std::to_string(cells_[c].cell_id) + ", year " +
                                                       std::to_string(years_.year(y)));
      }
  }

  const std::string& label() const { return label_; }
  const YearAxis& years() const { return years_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t year_count() const { return years_.size(); }
  const std::vector<GridCell>& cells() const { return cells_; }
  const GridCell& cell(std::size_t c) const { return cells_[c]; }

  double population(std::size_t c, std::size_t y) const { return population_[c * years_.size() + y]; }
  double gdp(std::size_t c, std::size_t y) const { return gdp_[c * years_.size() + y]; }
  std::span<const double> population_series(std::size_t c) const {
    return {population_.data() + c * years_.size(), years_.size()};
  }
  std::span<const double> gdp_series(std::size_t c) const { return {gdp_.data() + c * years_.size(), years_.size()}; }

  std::array<bool, kRegionCount> regions_present() const {
    std::array<bool, kRegionCount> present{};
    for (const auto& c : cells_) present[index_of(c.region)] = true;
    return present;
  }

  double world_gdp(std::size_t y) const {
    double sum = 0.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) sum += gdp(c, y);
    return sum;
  }

 private:
  std::string label_;
  YearAxis years_;
  std::vector<GridCell> cells_;
  std::vector<double> population_;
  std::vector<double> gdp_;
};

/// Sidecar metadata (`<stem>.meta.json` or `scenario.meta.json`).
struct ScenarioMeta {
  std::string label;
  std::optional<int> base_year;
  std::optional<int> horizon;
  std::optional<double> threshold;
};

inline ScenarioMeta parse_scenario_meta(const nlohmann::json& j) {
  ScenarioMeta m;
  try {
    if (j.contains("label")) m.label = j.at("label").get<std::string>();
    if (j.contains("base_year")) m.base_year = j.at("base_year").get<int>();
    if (j.contains("horizon")) m.horizon = j.at("horizon").get<int>();
    if (j.contains("threshold")) m.threshold = j.at("threshold").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scenario metadata: ") + e.what());
  }
  return m;
}

inline std::optional<std::filesystem::path> find_scenario_meta(const std::filesystem::path& csv_path) {
  auto dir = csv_path.parent_path();
  auto stem_meta = dir / (csv_path.stem().string() + ".meta.json");
  if (std::filesystem::exists(stem_meta)) return stem_meta;
  auto generic = dir / "scenario.meta.json";
  if (std::filesystem::exists(generic)) return generic;
  return std::nullopt;
}

inline ScenarioMeta load_scenario_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return parse_scenario_meta(j);
}

/// Builds a validated scenario from a parsed `cell_id,lat,lon,region,year,population,gdp`
/// table. Non-annual (e.g. decadal) inputs are interpolated onto the annual axis
/// [meta.base_year, meta.horizon], defaulting to the span of the input years.
inline Scenario scenario_from_table(const csv::Table& table, const ScenarioMeta& meta = {}) {
  const auto c_id = table.column("cell_id");
  const auto c_lat = table.column("lat");
  const auto c_lon = table.column("lon");
  const auto c_region = table.column("region");
  const auto c_year = table.column("year");
  const auto c_pop = table.column("population");
  const auto c_gdp = table.column("gdp");

  struct Rows {
    GridCell cell;
    std::map<int, std::pair<double, double>> by_year;
  };
  std::map<std::int64_t, Rows> cells;

  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto where = table.where(r);
    GridCell cell;
    cell.cell_id = csv::parse_int(table.at(r, c_id), where);
    cell.lat = csv::parse_double(table.at(r, c_lat), where);
    cell.lon = csv::parse_double(table.at(r, c_lon), where);
    if (!(cell.lat >= -90.0 && cell.lat <= 90.0) || !(cell.lon >= -180.0 && cell.lon < 180.0))
      throw Error(ErrorCode::OutOfRange, where + ": coordinates outside [-90,90] x [-180,180)");
    auto region = parse_region(table.at(r, c_region));
    if (!region) throw Error(ErrorCode::UnknownRegion, where + ": '" + std::string(table.at(r, c_region)) + "'");
    cell.region = *region;
    const int year = static_cast<int>(csv::parse_int(table.at(r, c_year), where));
    const double pop = csv::parse_double(table.at(r, c_pop), where);
    const double gdp = csv::parse_double(table.at(r, c_gdp), where);
    if (!(pop >= 0.0) || !(gdp >= 0.0) || !std::isfinite(pop) || !std::isfinite(gdp))
      throw Error(ErrorCode::NegativeExposure,
                  where + ": cell " + std::to_string(cell.cell_id) + ", year " + std::to_string(year));

    auto [it, fresh] = cells.try_emplace(cell.cell_id, Rows{cell, {}});
    if (!fresh && (it->second.cell.region != cell.region || it->second.cell.lat != cell.lat ||
                   it->second.cell.lon != cell.lon))
      throw Error(ErrorCode::ParseError, where + ": cell " + std::to_string(cell.cell_id) +
                                             " has conflicting coordinates or region");
    if (!it->second.by_year.emplace(year, std::make_pair(pop, gdp)).second)
      throw Error(ErrorCode::DuplicateRow,
                  where + ": cell " + std::to_string(cell.cell_id) + ", year " + std::to_string(year));
  }
  if (cells.empty()) throw Error(ErrorCode::ParseError, table.source() + ": no data rows");

  // all cells must share the support years
  const auto& first_support = cells.begin()->second.by_year;
  std::vector<int> support;
  for (const auto& [y, _] : first_support) support.push_back(y);
  for (const auto& [id, rows] : cells) {
    bool same = rows.by_year.size() == support.size();
    if (same) {
      std::size_t i = 0;
      for (const auto& [y, _] : rows.by_year) same = same && y == support[i++];
    }
    if (!same) throw Error(ErrorCode::OutOfRange, "cell " + std::to_string(id) + " does not share the year axis");
  }

  YearAxis axis{meta.base_year.value_or(support.front()), meta.horizon.value_or(support.back())};
  if (axis.last < axis.first) throw Error(ErrorCode::OutOfRange, "horizon precedes base year");
  const bool annual = support.size() == static_cast<std::size_t>(support.back() - support.front() + 1);

  std::vector<GridCell> grid;
  std::vector<double> population, gdp;
  grid.reserve(cells.size());
  population.reserve(cells.size() * axis.size());
  gdp.reserve(cells.size() * axis.size());
  for (const auto& [id, rows] : cells) {
    grid.push_back(rows.cell);
    if (annual) {
      if (axis.first < support.front() || axis.last > support.back())
        throw Error(ErrorCode::OutOfRange, "scenario axis exceeds input years");
      for (int t = axis.first; t <= axis.last; ++t) {
        const auto& v = rows.by_year.at(t);
        population.push_back(v.first);
        gdp.push_back(v.second);
      }
    } else {
      SparseTimeseries sparse;
      for (const auto& [y, v] : rows.by_year) {
        sparse.years.push_back(y);
        sparse.population.push_back(v.first);
        sparse.gdp.push_back(v.second);
      }
      auto annual_series = interpolate_annual(sparse, axis);
      population.insert(population.end(), annual_series.population.begin(), annual_series.population.end());
      gdp.insert(gdp.end(), annual_series.gdp.begin(), annual_series.gdp.end());
    }
  }
  return Scenario(meta.label, axis, std::move(grid), std::move(population), std::move(gdp));
}

/// Loads the scenario CSV and, when present, its JSON sidecar.
inline Scenario load_scenario(const std::filesystem::path& path, std::optional<ScenarioMeta> meta = std::nullopt) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
  if (!meta) {
    if (auto sidecar = find_scenario_meta(path)) meta = load_scenario_meta(*sidecar);
  }
  auto table = csv::Table::read(path);
  auto resolved = meta.value_or(ScenarioMeta{});
  if (resolved.label.empty()) resolved.label = path.stem().string();
  return scenario_from_table(table, resolved);
}

/// Per-cell, per-year urban flag: urban iff population >= threshold.
class UrbanMask {
 public:
  UrbanMask() = default;
  UrbanMask(double threshold, std::size_t years, std::vector<std::uint8_t> flags)
      : threshold_(threshold), years_(years), flags_(std::move(flags)) {}

  double threshold() const { return threshold_; }
  bool urban(std::size_t c, std::size_t y) const { return flags_[c * years_ + y] != 0; }
  std::size_t cell_count() const { return years_ == 0 ? 0 : flags_.size() / years_; }
  std::size_t year_count() const { return years_; }

 private:
  double threshold_ = kDefaultUrbanThreshold;
  std::size_t years_ = 0;
  std::vector<std::uint8_t> flags_;
};

inline UrbanMask classify_urban(const Scenario& scenario, double threshold = kDefaultUrbanThreshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidRange, "urban threshold must be positive");
  std::vector<std::uint8_t> flags(scenario.cell_count() * scenario.year_count());
  for (std::size_t c = 0; c < scenario.cell_count(); ++c)
    for (std::size_t y = 0; y < scenario.year_count(); ++y)
      flags[c * scenario.year_count() + y] = scenario.population(c, y) >= threshold ? 1 : 0;
  return UrbanMask(threshold, scenario.year_count(), std::move(flags));
}

struct UrbanShares {
  double population = 0.0;
  double gdp = 0.0;
};

/// Urban fraction of world population and GDP in `year`. Zero when the world total is zero.
inline UrbanShares urban_shares(const Scenario& scenario, const UrbanMask& mask, int year) {
  if (!scenario.years().contains(year))
    throw Error(ErrorCode::YearOutOfRange, "year " + std::to_string(year) + " not on the scenario axis");
  const auto y = scenario.years().index(year);
  double pop_u = 0, pop_w = 0, gdp_u = 0, gdp_w = 0;
  for (std::size_t c = 0; c < scenario.cell_count(); ++c) {
    pop_w += scenario.population(c, y);
    gdp_w += scenario.gdp(c, y);
    if (mask.urban(c, y)) {
      pop_u += scenario.population(c, y);
      gdp_u += scenario.gdp(c, y);
    }
  }
  return {pop_w > 0 ? pop_u / pop_w : 0.0, gdp_w > 0 ? gdp_u / gdp_w : 0.0};
}

}  // namespace gridscc
