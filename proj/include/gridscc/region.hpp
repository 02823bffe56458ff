#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gridscc {

// The 13 aggregation regions. Order is the row order of the emitted tables.
enum class Region : std::uint8_t {
  US,
  EU,
  JAPAN,
  RUSSIA,
  EURASIA,
  CHINA,
  INDIA,
  MEAST,
  AFRICA,
  LAM,
  OHI,
  OASIA,
  MX,
};

inline constexpr std::size_t kRegionCount = 13;

inline constexpr std::array<std::string_view, kRegionCount> kRegionCodes = {
    "US", "EU", "JAPAN", "RUSSIA", "EURASIA", "CHINA", "INDIA",
    "MEAST", "AFRICA", "LAM", "OHI", "OASIA", "MX"};

inline constexpr std::array<Region, kRegionCount> kAllRegions = {
    Region::US,    Region::EU,     Region::JAPAN, Region::RUSSIA, Region::EURASIA,
    Region::CHINA, Region::INDIA,  Region::MEAST, Region::AFRICA, Region::LAM,
    Region::OHI,   Region::OASIA,  Region::MX};

constexpr std::size_t index_of(Region r) { return static_cast<std::size_t>(r); }

constexpr std::string_view to_string(Region r) { return kRegionCodes[index_of(r)]; }

constexpr std::optional<Region> parse_region(std::string_view code) {
  for (std::size_t i = 0; i < kRegionCount; ++i)
    if (kRegionCodes[i] == code) return static_cast<Region>(i);
  return std::nullopt;
}

/// One value per region; the world figure is always the plain sum.
using RegionValues = std::array<double, kRegionCount>;

inline double world_total(const RegionValues& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum;
}

}  // namespace gridscc
