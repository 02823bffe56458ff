#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "gridscc/gridscc.hpp"
#include "support/oracle.hpp"

namespace fixtures {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gridscc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

/// Library-side view of an oracle instance. Region i of the instance maps to
/// `codes[i]`.
struct World {
  gridscc::Scenario scenario;
  gridscc::UrbanMask mask;
  gridscc::PatternField pattern;
  gridscc::GlobalTrajectory base;
  gridscc::GlobalTrajectory pulsed;
  gridscc::DamageParams damage;
  gridscc::UhiParams uhi;
  gridscc::PulseParams pulse;
  gridscc::DiscountSpec discount;
  std::optional<gridscc::GlobalDf> df;
};

inline World to_world(const oracle::Instance& in, const std::vector<gridscc::Region>& codes) {
  using namespace gridscc;
  const YearAxis axis{in.first_year, in.first_year + static_cast<int>(in.years()) - 1};
  std::vector<GridCell> cells;
  std::vector<double> pop, gdp;
  PatternField pattern;
  pattern.model_tag = "fixture";
  for (std::size_t c = 0; c < in.cells.size(); ++c) {
    cells.push_back({static_cast<std::int64_t>(c + 1), 10.0 + static_cast<double>(c), 20.0,
                     codes[static_cast<std::size_t>(in.cells[c].region)]});
    pop.insert(pop.end(), in.cells[c].population.begin(), in.cells[c].population.end());
    gdp.insert(gdp.end(), in.cells[c].gdp.begin(), in.cells[c].gdp.end());
    pattern.slope[static_cast<std::int64_t>(c + 1)] = in.cells[c].slope;
  }
  World w;
  w.scenario = Scenario("fixture", axis, std::move(cells), std::move(pop), std::move(gdp));
  w.mask = classify_urban(w.scenario, in.threshold);
  w.pattern = pattern;
  w.base = GlobalTrajectory{"base", axis, in.anomaly};
  w.pulse.year = in.pulse_year;
  w.pulse.size_gtc = in.pulse_size;
  for (int i = 0; i < 3; ++i) {
    w.pulse.amplitude[static_cast<std::size_t>(i)] = in.amp[i];
    w.pulse.tau[static_cast<std::size_t>(i)] = in.tau[i];
  }
  w.pulsed = perturbed_trajectory(w.base, w.pulse);
  for (std::size_t r = 0; r < in.regions.size(); ++r) {
    auto& d = w.damage.of(codes[r]);
    d.alpha_r = in.regions[r].alpha_r;
    d.alpha_u = in.regions[r].alpha_u;
    d.phi = in.regions[r].phi;
  }
  w.uhi = {in.uhi_a, in.uhi_b};
  w.discount = {in.rate, in.pulse_year, in.horizon};
  if (in.df_coefficient > 0.0) w.df = GlobalDf::quadratic(in.df_coefficient);
  return w;
}

/// The 4-cell, 2-region, 3-year instance used by the oracle-equivalence checks.
/// Cell 3 crosses the urban threshold in the second year.
inline oracle::Instance tiny_instance() {
  oracle::Instance in;
  in.first_year = 2010;
  in.anomaly = {1.00, 1.06, 1.13};
  in.regions = {{0.0020, 0.0030, 0.4}, {0.0025, 0.0025, 0.7}};
  in.cells = {
      {0, 1.2, {300000, 320000, 340000}, {5.0e10, 5.2e10, 5.4e10}},
      {0, 0.8, {50000, 52000, 54000}, {2.0e9, 2.1e9, 2.2e9}},
      {1, 0.9, {2.0e6, 2.1e6, 2.2e6}, {3.0e10, 3.3e10, 3.6e10}},
      {1, 1.4, {200000, 260000, 270000}, {4.0e9, 4.4e9, 4.8e9}},
  };
  return in;
}

inline const std::vector<gridscc::Region> kTinyRegions = {gridscc::Region::US, gridscc::Region::CHINA};

/// Random non-negative-warming instance for property checks.
inline oracle::Instance random_instance(std::mt19937_64& rng, std::size_t cells = 8, std::size_t years = 12,
                                        std::size_t regions = 4) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  oracle::Instance in;
  in.first_year = 2010;
  in.pulse_year = 2010;
  double t = 0.5 + u01(rng);
  for (std::size_t y = 0; y < years; ++y) {
    in.anomaly.push_back(t);
    t += 0.05 * u01(rng);
  }
  for (std::size_t r = 0; r < regions; ++r)
    in.regions.push_back({0.0005 + 0.004 * u01(rng), 0.0005 + 0.004 * u01(rng), u01(rng)});
  for (std::size_t c = 0; c < cells; ++c) {
    oracle::Cell cell;
    cell.region = static_cast<int>(c % regions);
    cell.slope = 0.3 + 1.5 * u01(rng);
    double p = std::exp(9.0 + 7.0 * u01(rng));  // ~8e3 .. 9e6
    double g = p * (2000.0 + 40000.0 * u01(rng));
    for (std::size_t y = 0; y < years; ++y) {
      cell.population.push_back(p);
      cell.gdp.push_back(g);
      p *= 0.98 + 0.06 * u01(rng);
      g *= 1.0 + 0.04 * u01(rng);
    }
    in.cells.push_back(cell);
  }
  return in;
}

inline std::vector<gridscc::Region> first_regions(std::size_t n) {
  return {gridscc::kAllRegions.begin(), gridscc::kAllRegions.begin() + static_cast<std::ptrdiff_t>(n)};
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fixtures
