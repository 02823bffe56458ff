#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gridscc/damage.hpp"
#include "support/fixtures.hpp"

using namespace gridscc;

TEST(Damage, FractionExamples) {
  EXPECT_NEAR(cell_damage_fraction_r(0.00236, 3.191), 0.02403, 1e-5);
  EXPECT_DOUBLE_EQ(cell_damage_fraction_r(0.1, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(cell_damage_fraction_ru(0.01, 0.01, 2.0, 1.0), 0.09);
  EXPECT_EQ(cell_damage_fraction_ru(0.01, 0.02, 2.0, 0.0), cell_damage_fraction_r(0.01, 2.0));
}

TEST(Damage, ExpansionIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> alpha(0.0, 0.01), temp(0.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const double ar = alpha(rng), au = alpha(rng), tg = temp(rng), tu = temp(rng);
    const double ru = cell_damage_fraction_ru(ar, au, tg, tu);
    const double diff = ru - cell_damage_fraction_r(ar, tg);
    const double expect = 2.0 * au * tg * tu + au * tu * tu;
    EXPECT_LE(std::abs(diff - expect), 1e-12 * ru);
    // common alpha: the full square, up to rounding
    const double sq = ar * (tg + tu) * (tg + tu);
    EXPECT_NEAR(cell_damage_fraction_ru(ar, ar, tg, tu), sq, 1e-14 * sq + 1e-300);
  }
}

TEST(GlobalDf, Evaluations) {
  EXPECT_NEAR(global_df_eval(GlobalDf::quadratic(), 3.0), 0.02124, 1e-12);
  const double t = 3.0;
  const double d = std::pow(t / 20.46, 2) + std::pow(t / 6.081, 6.754);
  EXPECT_NEAR(global_df_eval(GlobalDf::weitzman(), t), d / (1 + d), 1e-15);
  EXPECT_EQ(global_df_eval(GlobalDf::weitzman(), 0.0), 0.0);
  EXPECT_THROW(global_df_eval(GlobalDf::quadratic(), -0.1), Error);
}

TEST(GlobalDf, TableInterpolationAndExtrapolation) {
  auto df = GlobalDf::table({1.0, 2.0, 4.0}, {0.01, 0.03, 0.10});
  EXPECT_DOUBLE_EQ(global_df_eval(df, 0.5), 0.005);
  EXPECT_DOUBLE_EQ(global_df_eval(df, 1.5), 0.02);
  EXPECT_DOUBLE_EQ(global_df_eval(df, 3.0), 0.065);
  EXPECT_NEAR(global_df_eval(df, 6.0), 0.10 + 0.035 * 2.0, 1e-15);
  auto anchored = GlobalDf::table({0.0, 2.0}, {0.0, 0.04});
  EXPECT_DOUBLE_EQ(global_df_eval(anchored, 1.0), 0.02);
  try {
    validate(GlobalDf::table({1.0, 2.0}, {0.02, 0.01}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotoneTable);
  }
  EXPECT_THROW(validate(GlobalDf::table({2.0, 1.0}, {0.01, 0.02})), Error);
}

TEST(Scaling, Examples) {
  std::vector<double> gdp{100.0, 200.0}, t{1.0, 2.0}, r{0.5, 2.0};
  auto s = scaling_series(gdp, GlobalDf::quadratic(0.01), t, r);
  EXPECT_DOUBLE_EQ(s.s[0], 0.01 * 100 / 0.5);
  EXPECT_DOUBLE_EQ(s.s[1], 0.04 * 200 / 2.0);
  std::vector<double> zero{0.0, 0.0}, zt{0.0, 0.0};
  EXPECT_EQ(scaling_series(gdp, GlobalDf::quadratic(), zt, zero).s, (std::vector<double>{1.0, 1.0}));
  try {
    scaling_series(gdp, GlobalDf::quadratic(), t, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDenominator);
  }
}

TEST(Scaling, SelfCalibrationGivesOne) {
  auto in = fixtures::tiny_instance();
  in.regions = {{0.00236, 0.00236, 0.0}, {0.00236, 0.00236, 0.0}};
  for (auto& c : in.cells) c.slope = 1.0;
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto field = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  auto l = build_ledger(w.scenario, w.mask, field, Variant::R, w.damage, GlobalDf::quadratic(), w.base);
  for (double s : l.scaling.s) EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Scaling, ApplyScalingMultipliesPerYear) {
  auto in = fixtures::tiny_instance();
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto field = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  auto raw = build_ledger(w.scenario, w.mask, field, Variant::RU, w.damage, std::nullopt, w.base);
  auto scaled = apply_scaling(raw, {{2.0, 3.0, 0.5}});
  for (std::size_t c = 0; c < raw.cells; ++c)
    for (std::size_t y = 0; y < 3; ++y) {
      EXPECT_EQ(scaled.usd(c, y), raw.usd(c, y) * scaled.scaling.s[y]);
      EXPECT_EQ(scaled.fraction(c, y), raw.fraction(c, y));
    }
  EXPECT_THROW(apply_scaling(raw, {{1.0}}), Error);
}

TEST(Persistence, Examples) {
  std::vector<double> ten{10, 10, 10};
  EXPECT_EQ(apply_persistence(ten, 0.5), (std::vector<double>{10, 15, 17.5}));
  EXPECT_EQ(apply_persistence(ten, 1.0), (std::vector<double>{10, 20, 30}));
  EXPECT_THROW(apply_persistence(ten, 1.01), Error);
  EXPECT_THROW(apply_persistence(ten, -0.01), Error);
}

TEST(Persistence, ZeroPhiIsIdentityAndOneIsCumulative) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1e9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(91);
    for (double& v : x) v = u(rng);
    EXPECT_EQ(apply_persistence(x, 0.0), x);
    auto cum = apply_persistence(x, 1.0);
    double sum = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      sum += x[t];
      EXPECT_EQ(cum[t], sum);
    }
  }
}

TEST(Persistence, Linear) {
  std::vector<double> a{1, 4, 2, 8}, b{3, 0, 5, 1}, ab(4);
  for (std::size_t i = 0; i < 4; ++i) ab[i] = 2.0 * a[i] + b[i];
  auto pa = apply_persistence(a, 0.3), pb = apply_persistence(b, 0.3), pab = apply_persistence(ab, 0.3);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pab[i], 2.0 * pa[i] + pb[i], 1e-12);
}

TEST(DamageParams, LoadAndValidate) {
  fixtures::TempDir dir;
  auto ok = dir.write("d.csv", "region,alpha_r,alpha_u,phi\nUS,0.002,,0.5\nCHINA,0.003,0.004,0\n");
  auto p = load_damage_params(ok);
  EXPECT_DOUBLE_EQ(p.of(Region::US).alpha_u, 0.002);
  EXPECT_DOUBLE_EQ(p.of(Region::US).phi, 0.5);
  EXPECT_DOUBLE_EQ(p.of(Region::CHINA).alpha_u, 0.004);
  EXPECT_DOUBLE_EQ(p.of(Region::EU).alpha_r, 0.00236);
  auto bad = dir.write("bad.csv", "region,alpha_r,alpha_u,phi\nUS,0.002,,1.5\n");
  try {
    load_damage_params(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PhiOutOfRange);
  }
  auto unknown = dir.write("u.csv", "region,alpha_r,alpha_u,phi\nMARS,0.002,,0\n");
  EXPECT_THROW(load_damage_params(unknown), Error);
}

TEST(Ledger, VariantsAgreeOutsideUrbanCells) {
  auto in = fixtures::tiny_instance();
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto field = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  auto r = build_ledger(w.scenario, w.mask, field, Variant::R, w.damage, w.df, w.base);
  auto ru = build_ledger(w.scenario, w.mask, field, Variant::RU, w.damage, w.df, w.base);
  auto rp = build_ledger(w.scenario, w.mask, field, Variant::RP, w.damage, w.df, w.base);
  for (std::size_t c = 0; c < r.cells; ++c)
    for (std::size_t y = 0; y < 3; ++y) {
      EXPECT_EQ(r.usd(c, y), rp.usd(c, y));
      if (w.mask.urban(c, y)) EXPECT_GT(ru.usd(c, y), r.usd(c, y));
      else EXPECT_EQ(ru.usd(c, y), r.usd(c, y));
    }
  EXPECT_EQ(r.scaling.s, ru.scaling.s);
}

TEST(Ledger, RpuMatchesOracle) {
  auto in = fixtures::tiny_instance();
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto field = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  auto l = build_ledger(w.scenario, w.mask, field, Variant::RPU, w.damage, w.df, w.base);
  for (std::size_t c = 0; c < in.cells.size(); ++c)
    for (std::size_t y = 0; y < in.years(); ++y) {
      const double expect =
          oracle::scale(in, in.anomaly, y) * oracle::fraction(in, c, y, in.anomaly[y], true) * in.cells[c].gdp[y];
      EXPECT_LE(fixtures::rel_err(l.usd(c, y), expect), 1e-12);
    }
  const auto oracle_losses = oracle::region_losses(in, in.anomaly, true, true, oracle::Subset::All);
  const auto state = l.persistence_state();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t y = 0; y < 3; ++y)
      EXPECT_LE(fixtures::rel_err(state[index_of(fixtures::kTinyRegions[r])][y], oracle_losses[r][y]), 1e-12);
}

namespace {

void expect_calibrated(const GlobalDf& df) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto in = fixtures::random_instance(rng, 30, 20, 5);
    auto w = fixtures::to_world(in, fixtures::first_regions(5));
    auto field = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
    auto l = build_ledger(w.scenario, w.mask, field, Variant::R, w.damage, df, w.base);
    const auto world = l.world_per_period();
    for (std::size_t y = 0; y < world.size(); ++y) {
      const double target = global_df_eval(df, in.anomaly[y]) * w.scenario.world_gdp(y);
      EXPECT_LE(fixtures::rel_err(world[y], target), 1e-12);
    }
  }
}

}  // namespace

TEST(Ledger, CalibrationIdentityQuadratic) { expect_calibrated(GlobalDf::quadratic()); }
TEST(Ledger, CalibrationIdentityWeitzman) { expect_calibrated(GlobalDf::weitzman()); }

TEST(RegionLosses, EffectiveAppliesPersistenceOnlyForPersistentVariants) {
  std::array<double, kRegionCount> phi{};
  phi[0] = 0.5;
  RegionLosses rp({2010, 2012}, Variant::RP, phi), r({2010, 2012}, Variant::R, phi);
  for (std::size_t y = 0; y < 3; ++y) {
    rp.at(0, y, CellClass::Urban) = 10;
    r.at(0, y, CellClass::Urban) = 10;
  }
  EXPECT_EQ(rp.effective(0, CellClass::All), (std::vector<double>{10, 15, 17.5}));
  EXPECT_EQ(r.effective(0, CellClass::All), (std::vector<double>{10, 10, 10}));
}
