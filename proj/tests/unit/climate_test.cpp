#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gridscc/climate.hpp"
#include "support/fixtures.hpp"

using namespace gridscc;

TEST(Ecs, QuantilesAtKnots) {
  EcsDistribution d;
  EXPECT_EQ(sample_ecs(d, 0.0), 2.0);
  EXPECT_EQ(sample_ecs(d, 1.0 / 3.0), 3.0);
  EXPECT_EQ(sample_ecs(d, 1.0), 5.0);
  EXPECT_THROW(sample_ecs(d, 1.5), Error);
  EXPECT_THROW(sample_ecs(d, -0.1), Error);
}

TEST(Ecs, CdfIsMonotone) {
  EcsDistribution d;
  double prev = sample_ecs(d, 0.0);
  for (int i = 1; i <= 10000; ++i) {
    const double v = sample_ecs(d, i / 10000.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Ecs, InverseCdfMatchesClosedFormCdf) {
  // F(x) = (x-2)^2 / 3 on [2,3], 1 - (5-x)^2 / 6 on [3,5]
  EcsDistribution d;
  for (double u = 0.01; u < 1.0; u += 0.01) {
    const double x = sample_ecs(d, u);
    const double f = x <= 3.0 ? (x - 2.0) * (x - 2.0) / 3.0 : 1.0 - (5.0 - x) * (5.0 - x) / 6.0;
    EXPECT_NEAR(f, u, 1e-12);
  }
}

TEST(Ecs, MillionDrawMean) {
  EcsDistribution d;
  std::mt19937_64 rng(2024);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_ecs(d, static_cast<double>(rng() >> 11) * 0x1.0p-53);
  const double mean = sum / n;
  const double se = std::sqrt(7.0 / 18.0 / n);
  EXPECT_LT(std::abs(mean - 10.0 / 3.0), 3.0 * se);
}

TEST(Climate, ScaleTrajectory) {
  GlobalTrajectory t{"ref", {2010, 2012}, {1.0, 1.5, 2.0}};
  auto s = scale_trajectory(t, 4.5);
  EXPECT_DOUBLE_EQ(s.anomaly[2], 3.0);
  auto same = scale_trajectory(t, 3.0);
  EXPECT_EQ(same.anomaly, t.anomaly);
  EXPECT_THROW(scale_trajectory(t, 0.0), Error);
  EXPECT_THROW(scale_trajectory(t, 3.0, -1.0), Error);
}

TEST(Climate, TrajectoryRestriction) {
  GlobalTrajectory t{"ref", {2000, 2005}, {0, 1, 2, 3, 4, 5}};
  auto r = t.restricted({2002, 2004});
  EXPECT_EQ(r.anomaly, (std::vector<double>{2, 3, 4}));
  EXPECT_THROW(t.restricted({1999, 2004}), Error);
  EXPECT_THROW(t.at(2006), Error);
}

TEST(Climate, LoadTrajectoryAndPattern) {
  fixtures::TempDir dir;
  auto tp = dir.write("traj.csv", "year,anomaly_degC\n2010,0.9\n2011,0.95\n");
  auto t = load_trajectory(tp);
  EXPECT_EQ(t.years.last, 2011);
  EXPECT_DOUBLE_EQ(t.at(2011), 0.95);
  auto gap = dir.write("gap.csv", "year,anomaly_degC\n2010,0.9\n2012,0.95\n");
  EXPECT_THROW(load_trajectory(gap), Error);

  auto pp = dir.write("pat.csv", "cell_id,slope\n1,1.2\n2,0.8\n");
  auto p = load_pattern(pp);
  EXPECT_DOUBLE_EQ(p.slope_of({2, 0, 0, Region::US}), 0.8);
  try {
    p.slope_of({3, 0, 0, Region::US});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPattern);
  }
  auto precip = dir.write("pr.csv", "cell_id,slope,precip_slope\n1,1.2,0.1\n");
  EXPECT_THROW(load_pattern(precip), Error);
}

TEST(Uhi, Examples) {
  UhiParams p;
  EXPECT_EQ(uhi_intensity(p, 0.0), 0.0);
  EXPECT_NEAR(uhi_intensity(p, 1e7), 1.85e-3 * std::pow(1e7, 0.45), 1e-15);
  EXPECT_NEAR(uhi_intensity(p, 1e7), 2.6, 0.05);
  // megacity magnitude: roughly 4 degC
  EXPECT_NEAR(uhi_intensity(p, 2.6e7), 4.0, 0.1);
  EXPECT_THROW(validate(UhiParams{-1.0, 0.45}), Error);
  EXPECT_THROW(validate(UhiParams{1e-3, 1.0}), Error);
}

TEST(Uhi, MonotoneInPopulation) {
  UhiParams p;
  double prev = 0.0;
  for (double pop = 1.0; pop < 1e8; pop *= 1.3) {
    const double v = uhi_intensity(p, pop);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Uhi, RatchetIsRunningMaximum) {
  std::vector<double> pop{5, 7, 6, 8, 3};
  EXPECT_EQ(uhi_population(pop, false), pop);
  EXPECT_EQ(uhi_population(pop, true), (std::vector<double>{5, 7, 7, 8, 8}));
}

TEST(ClimateField, MatchesElementWiseOracle) {
  auto in = fixtures::tiny_instance();
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto f = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  for (std::size_t c = 0; c < in.cells.size(); ++c)
    for (std::size_t y = 0; y < in.years(); ++y) {
      EXPECT_EQ(f.ghg(c, y), in.cells[c].slope * in.anomaly[y]);
      const double tu = oracle::is_urban(in, c, y) ? in.uhi_a * std::pow(in.cells[c].population[y], in.uhi_b) : 0.0;
      EXPECT_NEAR(f.uhi(c, y), tu, 1e-15);
    }
}

TEST(ClimateField, GhgIsHomogeneousInGlobalAnomaly) {
  auto in = fixtures::tiny_instance();
  auto w = fixtures::to_world(in, fixtures::kTinyRegions);
  auto doubled = w.base;
  for (double& v : doubled.anomaly) v *= 2.0;
  auto f1 = build_climate_field(w.scenario, w.mask, w.base, w.pattern, w.uhi);
  auto f2 = build_climate_field(w.scenario, w.mask, doubled, w.pattern, w.uhi);
  for (std::size_t i = 0; i < f1.t_ghg.size(); ++i) {
    EXPECT_DOUBLE_EQ(f2.t_ghg[i], 2.0 * f1.t_ghg[i]);
    EXPECT_EQ(f2.t_uhi[i], f1.t_uhi[i]);
  }
}

TEST(ClimateField, RatchetHoldsUhiWhenPopulationFalls) {
  Scenario s("s", {2010, 2012}, {{1, 0, 0, Region::US}}, {3e6, 1e6, 2e6}, {1, 1, 1});
  auto mask = classify_urban(s);
  PatternField pat{"p", {{1, 1.0}}};
  GlobalTrajectory g{"g", {2010, 2012}, {1, 1, 1}};
  UhiParams p;
  auto plain = build_climate_field(s, mask, g, pat, p, false);
  auto held = build_climate_field(s, mask, g, pat, p, true);
  EXPECT_LT(plain.uhi(0, 1), plain.uhi(0, 0));
  EXPECT_EQ(held.uhi(0, 1), held.uhi(0, 0));
  EXPECT_EQ(held.uhi(0, 2), held.uhi(0, 0));
}
