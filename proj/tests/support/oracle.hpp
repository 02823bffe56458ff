#pragma once

// Direct-enumeration reference for small instances. Works on plain arrays and
// substitutes every formula by hand; nothing here calls the library's
// evaluation code, so it can serve as an independent check of it.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Cell {
  int region = 0;  // index into Instance::regions
  double slope = 1.0;
  std::vector<double> population;
  std::vector<double> gdp;
};

struct RegionParams {
  double alpha_r = 0.0;
  double alpha_u = 0.0;
  double phi = 0.0;
};

struct Instance {
  int first_year = 2010;
  std::vector<double> anomaly;  // baseline global anomaly per year
  std::vector<Cell> cells;
  std::vector<RegionParams> regions;
  double threshold = 250000.0;
  double uhi_a = 1.85e-3;
  double uhi_b = 0.45;
  double df_coefficient = 0.00236;  // quadratic global DF; <= 0 disables scaling
  // pulse
  int pulse_year = 2010;
  double pulse_size = 1.0;
  double amp[3] = {-2.308, 0.743, -0.191};
  double tau[3] = {2.241, 35.750, 97.180};
  // discounting
  double rate = 0.015;
  int horizon = 2100;

  std::size_t years() const { return anomaly.size(); }
};

inline double pulse_mk(const Instance& in, int year) {
  if (year < in.pulse_year) return 0.0;
  const double t = year - in.pulse_year;
  double v = -(in.amp[0] + in.amp[1] + in.amp[2]);
  for (int i = 0; i < 3; ++i) v += in.amp[i] * std::exp(-t / in.tau[i]);
  return v;
}

inline std::vector<double> pulsed_anomaly(const Instance& in) {
  std::vector<double> out = in.anomaly;
  for (std::size_t y = 0; y < out.size(); ++y)
    out[y] += pulse_mk(in, in.first_year + static_cast<int>(y)) * in.pulse_size / 1000.0;
  return out;
}

inline bool is_urban(const Instance& in, std::size_t c, std::size_t y) {
  return in.cells[c].population[y] >= in.threshold;
}

/// Cell loss fraction; `uhi_scale` multiplies a (1 for the plain run).
inline double fraction(const Instance& in, std::size_t c, std::size_t y, double t_global, bool with_uhi,
                       double uhi_scale = 1.0) {
  const auto& cell = in.cells[c];
  const auto& p = in.regions[cell.region];
  const double tg = cell.slope * t_global;
  if (!with_uhi || !is_urban(in, c, y)) return p.alpha_r * tg * tg;
  const double tu = uhi_scale * in.uhi_a * std::pow(cell.population[y], in.uhi_b);
  // expanded form written out term by term
  return p.alpha_r * tg * tg + 2.0 * p.alpha_u * tg * tu + p.alpha_u * tu * tu;
}

/// Scaling factor for year y of a run driven by `anomaly`.
inline double scale(const Instance& in, const std::vector<double>& anomaly, std::size_t y) {
  if (in.df_coefficient <= 0.0) return 1.0;
  double world_gdp = 0.0, r_sum = 0.0;
  for (std::size_t c = 0; c < in.cells.size(); ++c) {
    world_gdp += in.cells[c].gdp[y];
    r_sum += fraction(in, c, y, anomaly[y], false) * in.cells[c].gdp[y];
  }
  const double target = in.df_coefficient * anomaly[y] * anomaly[y] * world_gdp;
  if (r_sum == 0.0) return 1.0;
  return target / r_sum;
}

enum class Subset { All, NonUrban, Urban };

inline bool in_subset(const Instance& in, std::size_t c, std::size_t y, Subset s) {
  if (s == Subset::All) return true;
  return (s == Subset::Urban) == is_urban(in, c, y);
}

/// Region-year USD losses of one run after scaling and (optionally) persistence.
inline std::vector<std::vector<double>> region_losses(const Instance& in, const std::vector<double>& anomaly,
                                                      bool with_uhi, bool persistent, Subset subset,
                                                      double uhi_scale = 1.0) {
  const std::size_t ny = in.years();
  std::vector<std::vector<double>> out(in.regions.size(), std::vector<double>(ny, 0.0));
  for (std::size_t y = 0; y < ny; ++y) {
    const double s = scale(in, anomaly, y);
    for (std::size_t c = 0; c < in.cells.size(); ++c) {
      if (!in_subset(in, c, y, subset)) continue;
      out[in.cells[c].region][y] += s * fraction(in, c, y, anomaly[y], with_uhi, uhi_scale) * in.cells[c].gdp[y];
    }
  }
  if (persistent) {
    for (std::size_t r = 0; r < out.size(); ++r) {
      std::vector<double> carried(ny);
      for (std::size_t y = 0; y < ny; ++y)
        carried[y] = y == 0 ? out[r][0] : out[r][y] + in.regions[r].phi * carried[y - 1];
      out[r] = carried;
    }
  }
  return out;
}

inline double discount(const Instance& in, std::size_t y) {
  const int year = in.first_year + static_cast<int>(y);
  if (year < in.pulse_year || year > in.horizon) return 0.0;
  return 1.0 / std::pow(1.0 + in.rate, year - in.pulse_year);
}

inline double tonnes(const Instance& in) { return in.pulse_size * 44.01 / 12.011 * 1e9; }

/// SCC by region for one damage function type and cell subset.
inline std::vector<double> scc(const Instance& in, bool with_uhi, bool persistent, Subset subset = Subset::All) {
  const auto pulsed = pulsed_anomaly(in);
  const auto hi = region_losses(in, pulsed, with_uhi, persistent, subset);
  const auto lo = region_losses(in, in.anomaly, with_uhi, persistent, subset);
  std::vector<double> out(in.regions.size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (std::size_t y = 0; y < in.years(); ++y) out[r] += discount(in, y) * (hi[r][y] - lo[r][y]);
  for (double& v : out) v /= tonnes(in);
  return out;
}

/// PV of urban losses at a minus urban losses at (1 - reduction) a, baseline run.
inline std::vector<double> scuhi_benefit(const Instance& in, bool persistent, double reduction = 0.01) {
  const auto hi = region_losses(in, in.anomaly, true, persistent, Subset::Urban, 1.0);
  const auto lo = region_losses(in, in.anomaly, true, persistent, Subset::Urban, 1.0 - reduction);
  std::vector<double> out(in.regions.size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (std::size_t y = 0; y < in.years(); ++y) out[r] += discount(in, y) * (hi[r][y] - lo[r][y]);
  return out;
}

/// PV of total discounted urban RU losses as a function of the UHI coefficient.
inline double urban_pv_at(const Instance& in, double a, bool persistent) {
  Instance copy = in;
  copy.uhi_a = a;
  const auto l = region_losses(copy, copy.anomaly, true, persistent, Subset::Urban);
  double pv = 0.0;
  for (std::size_t r = 0; r < l.size(); ++r)
    for (std::size_t y = 0; y < copy.years(); ++y) pv += discount(copy, y) * l[r][y];
  return pv;
}

}  // namespace oracle
