#pragma once

// Fused single-pass evaluation of a baseline/pulsed pair over the grid.
//
// Instead of materialising per-cell ClimateField and DamageLedger arrays
// (several GB at global 0.5 degree resolution), each cell is evaluated once
// and its losses are accumulated straight into (region, year, urban class)
// aggregates. Cells are processed in fixed-size chunks whose partial sums are
// reduced in chunk order, so results are bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include "gridscc/climate.hpp"
#include "gridscc/damage.hpp"
#include "gridscc/scenario.hpp"

namespace gridscc {

inline constexpr std::size_t kKernelChunkCells = 4096;

struct KernelInputs {
  const Scenario* scenario = nullptr;
  const UrbanMask* mask = nullptr;
  std::vector<double> slopes;            // per cell, scenario order
  std::vector<double> base_anomaly;      // on the scenario axis
  std::vector<double> pulsed_anomaly;    // on the scenario axis
  UhiParams uhi;
  DamageParams damage;
  std::optional<GlobalDf> global_df;     // scaling target; none leaves losses unscaled
  double uhi_reduction = 0.01;           // fractional cut in a for the SCUHI run
  int reduction_start_year = 0;          // cut applies from this year on
  bool ratchet = false;
  unsigned threads = 1;
};

/// Aggregated losses of one grid pass, already scaled to the global DF.
struct KernelResult {
  RegionLosses r_base, r_pulsed;         // R variant
  RegionLosses ru_base, ru_pulsed;       // RU variant
  RegionLosses ru_reduced;               // RU baseline with a cut by uhi_reduction
  RegionLosses marginal_a;               // dD/da, urban class only
  ScalingSeries scaling_base, scaling_pulsed;
  std::vector<double> world_gdp;
};

/// Copy of `losses` relabelled as `variant` (R <-> RP, RU <-> RPU share per-period losses).
inline RegionLosses as_variant(const RegionLosses& losses, Variant variant) {
  RegionLosses out(losses.years(), variant, losses.phi());
  out += losses;
  return out;
}

namespace detail {

struct KernelPartial {
  RegionLosses r_base, r_pulsed, ru_base, ru_pulsed, ru_reduced, marginal_a;
  std::vector<double> world_gdp;

  KernelPartial(YearAxis axis, const std::array<double, kRegionCount>& phi)
      : r_base(axis, Variant::R, phi),
        r_pulsed(axis, Variant::R, phi),
        ru_base(axis, Variant::RU, phi),
        ru_pulsed(axis, Variant::RU, phi),
        ru_reduced(axis, Variant::RU, phi),
        marginal_a(axis, Variant::RU, phi),
        world_gdp(axis.size(), 0.0) {}

  KernelPartial& operator+=(const KernelPartial& o) {
    r_base += o.r_base;
    r_pulsed += o.r_pulsed;
    ru_base += o.ru_base;
    ru_pulsed += o.ru_pulsed;
    ru_reduced += o.ru_reduced;
    marginal_a += o.marginal_a;
    for (std::size_t y = 0; y < world_gdp.size(); ++y) world_gdp[y] += o.world_gdp[y];
    return *this;
  }
};

inline void evaluate_chunk(const KernelInputs& in, std::size_t begin, std::size_t end, KernelPartial& acc) {
  const Scenario& sc = *in.scenario;
  const std::size_t ny = sc.year_count();
  const double a = in.uhi.a;
  const double b = in.uhi.b;
  const double a_cut = (1.0 - in.uhi_reduction) * a;
  const auto axis = sc.years();
  std::vector<double> pop_buffer(ny);

  for (std::size_t c = begin; c < end; ++c) {
    const auto region = index_of(sc.cell(c).region);
    const auto& d = in.damage.region[region];
    const double slope = in.slopes[c];
    const auto pop = sc.population_series(c);
    const auto gdp = sc.gdp_series(c);
    double running = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      running = in.ratchet ? std::max(running, pop[y]) : pop[y];
      pop_buffer[y] = running;
    }

    for (std::size_t y = 0; y < ny; ++y) {
      const double g = gdp[y];
      const double tb = slope * in.base_anomaly[y];
      const double tp = slope * in.pulsed_anomaly[y];
      const double rb = cell_damage_fraction_r(d.alpha_r, tb) * g;
      const double rp = cell_damage_fraction_r(d.alpha_r, tp) * g;
      acc.world_gdp[y] += g;
      if (!in.mask->urban(c, y)) {
        acc.r_base.at(region, y, CellClass::NonUrban) += rb;
        acc.r_pulsed.at(region, y, CellClass::NonUrban) += rp;
        acc.ru_base.at(region, y, CellClass::NonUrban) += rb;
        acc.ru_pulsed.at(region, y, CellClass::NonUrban) += rp;
        acc.ru_reduced.at(region, y, CellClass::NonUrban) += rb;
        continue;
      }
      const double p = pop_buffer[y];
      const double pb = p > 0.0 ? std::pow(p, b) : 0.0;
      const double tu = p > 0.0 ? a * pb : 0.0;
      const double tu_cut = axis.year(y) >= in.reduction_start_year ? (p > 0.0 ? a_cut * pb : 0.0) : tu;
      acc.r_base.at(region, y, CellClass::Urban) += rb;
      acc.r_pulsed.at(region, y, CellClass::Urban) += rp;
      acc.ru_base.at(region, y, CellClass::Urban) += cell_damage_fraction_ru(d.alpha_r, d.alpha_u, tb, tu) * g;
      acc.ru_pulsed.at(region, y, CellClass::Urban) += cell_damage_fraction_ru(d.alpha_r, d.alpha_u, tp, tu) * g;
      acc.ru_reduced.at(region, y, CellClass::Urban) += cell_damage_fraction_ru(d.alpha_r, d.alpha_u, tb, tu_cut) * g;
      acc.marginal_a.at(region, y, CellClass::Urban) += g * 2.0 * d.alpha_u * (tb + tu) * pb;
    }
  }
}

inline std::vector<double> world_r_sum(const RegionLosses& r) {
  std::vector<double> out(r.years().size(), 0.0);
  for (std::size_t y = 0; y < out.size(); ++y)
    for (std::size_t reg = 0; reg < kRegionCount; ++reg)
      out[y] += r.at(reg, y, CellClass::NonUrban) + r.at(reg, y, CellClass::Urban);
  return out;
}

}  // namespace detail

inline KernelResult run_kernel(const KernelInputs& in) {
  const Scenario& sc = *in.scenario;
  validate(in.damage);
  validate(in.uhi);
  const std::size_t ny = sc.year_count();
  if (in.slopes.size() != sc.cell_count() || in.base_anomaly.size() != ny || in.pulsed_anomaly.size() != ny ||
      in.mask->cell_count() != sc.cell_count() || in.mask->year_count() != ny)
    throw Error(ErrorCode::OutOfRange, "kernel inputs are not aligned with the scenario");

  const auto phi = in.damage.phi();
  const std::size_t chunks = (sc.cell_count() + kKernelChunkCells - 1) / kKernelChunkCells;
  std::vector<detail::KernelPartial> partials(chunks, detail::KernelPartial(sc.years(), phi));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < chunks; k = next.fetch_add(1)) {
      const std::size_t begin = k * kKernelChunkCells;
      detail::evaluate_chunk(in, begin, std::min(begin + kKernelChunkCells, sc.cell_count()), partials[k]);
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(in.threads, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  detail::KernelPartial total(sc.years(), phi);
  for (const auto& p : partials) total += p;

  KernelResult out{std::move(total.r_base),   std::move(total.r_pulsed),   std::move(total.ru_base),
                   std::move(total.ru_pulsed), std::move(total.ru_reduced), std::move(total.marginal_a),
                   {std::vector<double>(ny, 1.0)}, {std::vector<double>(ny, 1.0)}, std::move(total.world_gdp)};

  if (in.global_df) {
    validate(*in.global_df);
    out.scaling_base = scaling_series(out.world_gdp, *in.global_df, in.base_anomaly, detail::world_r_sum(out.r_base));
    out.scaling_pulsed =
        scaling_series(out.world_gdp, *in.global_df, in.pulsed_anomaly, detail::world_r_sum(out.r_pulsed));
    for (std::size_t y = 0; y < ny; ++y) {
      const double sb = out.scaling_base.s[y];
      const double sp = out.scaling_pulsed.s[y];
      out.r_base.scale_year(y, sb);
      out.ru_base.scale_year(y, sb);
      out.ru_reduced.scale_year(y, sb);
      out.marginal_a.scale_year(y, sb);
      out.r_pulsed.scale_year(y, sp);
      out.ru_pulsed.scale_year(y, sp);
    }
  }
  return out;
}

}  // namespace gridscc
