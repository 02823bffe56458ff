#pragma once

// End-to-end batch run: load inputs, evaluate every ensemble member
// (ECS draw x pattern file), and write the reports atomically.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "gridscc/climate.hpp"
#include "gridscc/config.hpp"
#include "gridscc/damage.hpp"
#include "gridscc/kernel.hpp"
#include "gridscc/pulse.hpp"
#include "gridscc/report.hpp"
#include "gridscc/scc.hpp"
#include "gridscc/scenario.hpp"

namespace gridscc {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

/// Results of one ensemble member at one discount rate.
struct MemberResult {
  std::map<Variant, SccReport> scc;
  std::optional<Decomposition> plain;       // (R, RU)
  std::optional<Decomposition> persistent;  // (RP, RPU)
  std::map<Variant, ScuhiRow> scuhi;
};

/// Reduces one kernel pass to SCC, decomposition and SCUHI figures.
inline MemberResult summarize_member(const KernelResult& k, const RunConfig& cfg, const DiscountSpec& d,
                                     const RegionValues& reference_population) {
  MemberResult m;
  for (auto v : cfg.variants) {
    const auto& base = has_uhi(v) ? k.ru_base : k.r_base;
    const auto& pulsed = has_uhi(v) ? k.ru_pulsed : k.r_pulsed;
    m.scc[v] = scc(as_variant(base, v), as_variant(pulsed, v), d, cfg.pulse);
  }
  auto decomposition = [&](bool persistent) {
    const auto rv = persistent ? Variant::RP : Variant::R;
    const auto ruv = persistent ? Variant::RPU : Variant::RU;
    return decompose(as_variant(k.r_base, rv), as_variant(k.r_pulsed, rv), as_variant(k.ru_base, ruv),
                     as_variant(k.ru_pulsed, ruv), d, cfg.pulse);
  };
  if (cfg.wants(Variant::R) || cfg.wants(Variant::RU)) m.plain = decomposition(false);
  if (cfg.wants(Variant::RP) || cfg.wants(Variant::RPU)) m.persistent = decomposition(true);

  for (auto v : {Variant::RU, Variant::RPU}) {
    if (!cfg.wants(v)) continue;
    ScuhiRow row;
    row.report = scuhi_one_percent(as_variant(k.ru_base, v), as_variant(k.ru_reduced, v), d, reference_population,
                                   cfg.scuhi.reduction);
    const auto marginal = as_variant(k.marginal_a, v);
    const auto w = discount_weights(d, marginal.years());
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      const auto series = marginal.effective(r, CellClass::Urban);
      double pv = 0.0;
      for (std::size_t y = 0; y < w.size(); ++y) pv += w[y] * series[y];
      row.marginal_a[r] = pv;
    }
    m.scuhi[v] = row;
  }
  return m;
}

/// Element-wise mean over ensemble members (the identity for a single member).
inline MemberResult mean_of(const std::vector<MemberResult>& members) {
  MemberResult out = members.front();
  const double n = static_cast<double>(members.size());
  if (members.size() == 1) return out;
  auto mean_values = [&](auto&& get) {
    RegionValues acc{};
    for (const auto& m : members) {
      const RegionValues& v = get(m);
      for (std::size_t r = 0; r < kRegionCount; ++r) acc[r] += v[r];
    }
    for (double& x : acc) x /= n;
    return acc;
  };
  for (auto& [v, rep] : out.scc) rep.region = mean_values([v = v](const MemberResult& m) -> const RegionValues& {
    return m.scc.at(v).region;
  });
  auto mean_decomposition = [&](std::optional<Decomposition> MemberResult::*field) {
    if (!(out.*field)) return;
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      DecompositionRow acc;
      for (const auto& m : members) {
        const auto& row = (m.*field)->region[r];
        acc.nu += row.nu;
        acc.u += row.u;
        acc.u_nouhi += row.u_nouhi;
      }
      (out.*field)->region[r] = {acc.nu / n, acc.u / n, acc.u_nouhi / n};
    }
  };
  mean_decomposition(&MemberResult::plain);
  mean_decomposition(&MemberResult::persistent);
  for (auto& [v, row] : out.scuhi) {
    row.report.total_npv = mean_values([v = v](const MemberResult& m) -> const RegionValues& {
      return m.scuhi.at(v).report.total_npv;
    });
    row.marginal_a = mean_values([v = v](const MemberResult& m) -> const RegionValues& {
      return m.scuhi.at(v).marginal_a;
    });
  }
  return out;
}

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;
};

struct RunOutcome {
  std::filesystem::path output_dir;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::vector<double> ecs_draws;
  std::size_t members = 0;
};

/// ECS values for the ensemble: the fixed value, or `draws` inverse-CDF samples
/// from one mt19937_64 stream seeded with `seed`.
inline std::vector<double> ecs_draws(const EcsConfig& e) {
  if (e.mode == EcsMode::Fixed) return {e.value};
  std::mt19937_64 rng(e.seed);
  std::vector<double> out;
  out.reserve(e.draws);
  for (std::size_t i = 0; i < e.draws; ++i) {
    // 53-bit uniform in [0, 1]
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    out.push_back(sample_ecs(e.distribution, u));
  }
  return out;
}

namespace detail {

inline std::string discount_suffix(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", rate * 100.0);
  return std::string("_rate") + buf + "pct";
}

/// Files are written into a staging directory and moved into place only once
/// every report has been produced; a failure removes the staging directory.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path target) : target_(std::move(target)) {
    std::error_code ec;
    std::filesystem::create_directories(target_, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + target_.string() + ": " + ec.message());
    staging_ = target_ / ".gridscc-staging";
    std::filesystem::remove_all(staging_, ec);
    std::filesystem::create_directories(staging_, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + staging_.string() + ": " + ec.message());
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
  }

  void add(const std::string& name, const std::string& text) {
    write_text(staging_ / name, text);
    names_.push_back(name);
  }

  std::vector<std::string> commit() {
    for (const auto& n : names_) {
      std::error_code ec;
      std::filesystem::rename(staging_ / n, target_ / n, ec);
      if (ec) {
        for (const auto& m : names_) std::filesystem::remove(target_ / m, ec);
        throw Error(ErrorCode::IoFailure, "cannot move " + n + " into " + target_.string());
      }
    }
    return names_;
  }

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  std::vector<std::string> names_;
};

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline RunOutcome run(RunConfig cfg, const RunOptions& opt = {}) {
  const auto started = std::chrono::steady_clock::now();
  const auto started_utc = detail::utc_now();
  if (opt.output_dir) cfg.output_dir = *opt.output_dir;
  if (opt.seed) cfg.ecs.seed = *opt.seed;
  if (opt.threads) cfg.threads = std::max(1u, *opt.threads);

  RunOutcome outcome;
  outcome.output_dir = cfg.output_dir;
  auto warn = [&](const std::string& w) {
    outcome.warnings.push_back(w);
    if (!opt.quiet) std::fprintf(stderr, "warning: %s\n", w.c_str());
  };

  // inputs
  std::optional<ScenarioMeta> meta;
  if (auto sidecar = find_scenario_meta(cfg.scenario)) meta = load_scenario_meta(*sidecar);
  ScenarioMeta resolved_meta = meta.value_or(ScenarioMeta{});
  if (resolved_meta.label.empty()) resolved_meta.label = cfg.scenario.stem().string();
  const Scenario scenario = scenario_from_table(csv::Table::read(cfg.scenario), resolved_meta);
  const double threshold = cfg.urban_threshold.value_or(resolved_meta.threshold.value_or(kDefaultUrbanThreshold));
  const UrbanMask mask = classify_urban(scenario, threshold);
  const GlobalTrajectory trajectory = load_trajectory(cfg.trajectory);
  std::vector<PatternField> patterns;
  for (const auto& p : cfg.patterns) patterns.push_back(load_pattern(p));

  const auto present = scenario.regions_present();
  for (std::size_t r = 0; r < kRegionCount; ++r)
    if (!present[r]) warn(std::string("region ") + std::string(kRegionCodes[r]) + " has no cells; its SCC is 0");
  bool any_phi = false;
  for (const auto& d : cfg.damage.region) any_phi = any_phi || d.phi > 0.0;
  if ((cfg.wants(Variant::RP) || cfg.wants(Variant::RPU)) && !any_phi)
    warn("persistent variants requested but every phi is 0; RP/RPU equal R/RU");
  if (!scenario.years().contains(cfg.pulse.year))
    warn("pulse year " + std::to_string(cfg.pulse.year) + " precedes the scenario axis; earlier damages are omitted");

  // ensemble
  outcome.ecs_draws = ecs_draws(cfg.ecs);
  std::vector<std::vector<MemberResult>> by_rate(cfg.discount_rates.size());
  std::map<Variant, std::vector<SccReport>> ensemble;  // first discount rate
  std::vector<RegionValues> reference_population;
  for (double rate : cfg.discount_rates)
    reference_population.push_back(reference_urban_population(scenario, mask, cfg.discount(rate), cfg.scuhi.reference));

  bool warned_excess = false;
  std::array<std::vector<double>, kRegionCount> region_gdp;
  if (cfg.wants(Variant::RPU)) {
    for (auto& v : region_gdp) v.assign(scenario.year_count(), 0.0);
    for (std::size_t c = 0; c < scenario.cell_count(); ++c)
      for (std::size_t y = 0; y < scenario.year_count(); ++y)
        region_gdp[index_of(scenario.cell(c).region)][y] += scenario.gdp(c, y);
  }
  for (const auto& pattern : patterns) {
    const auto slopes = pattern.slopes_for(scenario);
    for (double ecs : outcome.ecs_draws) {
      const auto scaled = scale_trajectory(trajectory, ecs, cfg.ecs.reference);
      const double response_scale = cfg.pulse_scales_with_ecs ? ecs / cfg.ecs.reference : 1.0;
      const auto pulsed = perturbed_trajectory(scaled, cfg.pulse, response_scale);

      KernelInputs in;
      in.scenario = &scenario;
      in.mask = &mask;
      in.slopes = slopes;
      in.base_anomaly = scaled.restricted(scenario.years()).anomaly;
      in.pulsed_anomaly = pulsed.restricted(scenario.years()).anomaly;
      in.uhi = cfg.uhi;
      in.damage = cfg.damage;
      in.global_df = cfg.global_df;
      in.uhi_reduction = cfg.scuhi.reduction;
      in.reduction_start_year = cfg.reduction_start();
      in.ratchet = cfg.uhi_ratchet;
      in.threads = cfg.threads;
      const auto k = run_kernel(in);

      if (!warned_excess && cfg.wants(Variant::RPU)) {
        const auto carried = as_variant(k.ru_base, Variant::RPU);
        for (std::size_t r = 0; r < kRegionCount && !warned_excess; ++r) {
          const auto series = carried.effective(r, CellClass::All);
          for (std::size_t y = 0; y < series.size() && !warned_excess; ++y) {
            if (series[y] > region_gdp[r][y]) {
              warn("persistent losses exceed GDP in " + std::string(kRegionCodes[r]) + " " +
                   std::to_string(scenario.years().year(y)) + "; reported uncapped");
              warned_excess = true;
            }
          }
        }
      }

      for (std::size_t i = 0; i < cfg.discount_rates.size(); ++i) {
        auto member = summarize_member(k, cfg, cfg.discount(cfg.discount_rates[i]), reference_population[i]);
        if (i == 0)
          for (const auto& [v, rep] : member.scc) ensemble[v].push_back(rep);
        by_rate[i].push_back(std::move(member));
      }
    }
  }
  outcome.members = by_rate.front().size();

  // reports
  detail::StagedOutput staged(cfg.output_dir);
  for (std::size_t i = 0; i < cfg.discount_rates.size(); ++i) {
    const auto mean = mean_of(by_rate[i]);
    const std::string suffix = i == 0 ? "" : detail::discount_suffix(cfg.discount_rates[i]);
    staged.add("table1" + suffix + ".csv", format_table1(mean.scc));

    std::optional<DecompositionGroup> plain, persistent;
    auto total_of = [&](Variant v) -> std::optional<SccReport> {
      if (mean.scc.count(v)) return mean.scc.at(v);
      return std::nullopt;
    };
    if (mean.plain) plain = DecompositionGroup{*mean.plain, total_of(Variant::RU)};
    if (mean.persistent) persistent = DecompositionGroup{*mean.persistent, total_of(Variant::RPU)};
    staged.add("table2" + suffix + ".csv", format_table2(plain, persistent));

    std::vector<ScuhiRow> scuhi_rows;
    for (const auto& [v, row] : mean.scuhi) scuhi_rows.push_back(row);
    staged.add("scuhi" + suffix + ".csv", format_scuhi(scuhi_rows));
  }
  std::vector<EnsembleSummary> summaries;
  for (auto v : kAllVariants)
    if (ensemble.count(v)) summaries.push_back(ensemble_percentiles(ensemble.at(v), cfg.quantiles));
  staged.add("percentiles.csv", format_percentiles(summaries));

  nlohmann::json manifest;
  manifest["tool"] = "gridscc";
  manifest["version"] = kToolVersion;
  manifest["config"] = to_json(cfg);
  manifest["scenario"] = {{"label", scenario.label()},
                          {"first_year", scenario.years().first},
                          {"last_year", scenario.years().last},
                          {"cells", scenario.cell_count()},
                          {"urban_threshold", threshold}};
  manifest["inputs"][cfg.scenario.string()] = sha256_file(cfg.scenario);
  manifest["inputs"][cfg.trajectory.string()] = sha256_file(cfg.trajectory);
  for (const auto& p : cfg.patterns) manifest["inputs"][p.string()] = sha256_file(p);
  if (cfg.damage_params_file) manifest["inputs"][cfg.damage_params_file->string()] = sha256_file(*cfg.damage_params_file);
  manifest["seed"] = cfg.ecs.seed;
  manifest["ecs_draws"] = outcome.ecs_draws;
  manifest["members"] = outcome.members;
  manifest["warnings"] = outcome.warnings;
  // everything below varies between otherwise identical runs
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["runtime"] = {{"started_utc", started_utc}, {"elapsed_seconds", elapsed}, {"threads", cfg.threads}};
  staged.add("manifest.json", manifest.dump(2) + "\n");

  outcome.files = staged.commit();
  return outcome;
}

}  // namespace gridscc
