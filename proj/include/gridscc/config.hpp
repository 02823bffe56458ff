#pragma once

// Run configuration: JSON text -> fully resolved RunConfig.
//
// Schema (every key optional unless marked):
//   scenario            path (required)        CSV cell_id,lat,lon,region,year,population,gdp
//   patterns            [path] (required)      CSV cell_id,slope; one ensemble axis
//   trajectory          path (required)        CSV year,anomaly_degC
//   damage_params       path                   CSV region,alpha_r,alpha_u,phi
//   damage              {default:{alpha_r,alpha_u,phi}, regions:{CODE:{...}}}
//   variants            ["R","RU","RP","RPU"]  default all four
//   global_df           {kind: quadratic|weitzman|external-table|none, ...}
//   discount            {rates:[0.015], base_year:<pulse year>, horizon:2100}
//   ecs                 {mode: fixed|sample, value:3.0, draws:1, seed:0,
//                        lower:2, mode_value:3, upper:5, reference:3.0}
//   pulse               {year:2010, size_gtc:1.0, amplitudes:[3], taus:[3], scale_with_ecs:false}
//   uhi                 {a:1.85e-3, b:0.45, ratchet:false}
//   urban_threshold     persons; overrides the scenario sidecar, default 250000
//   scuhi               {reduction:0.01, start_year:<pulse year>, reference_population: pulse_year|horizon|mean}
//   quantiles           [0.05, 0.5, 0.95]
//   output_dir          default "out"
//   threads             default 1
// Relative paths resolve against the directory holding the config file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscc/climate.hpp"
#include "gridscc/damage.hpp"
#include "gridscc/error.hpp"
#include "gridscc/pulse.hpp"
#include "gridscc/scc.hpp"

namespace gridscc {

enum class EcsMode { Fixed, Sample };

struct EcsConfig {
  EcsMode mode = EcsMode::Fixed;
  double value = kReferenceEcs;
  std::size_t draws = 1;
  std::uint64_t seed = 0;
  EcsDistribution distribution;
  double reference = kReferenceEcs;
};

struct ScuhiConfig {
  double reduction = 0.01;
  std::optional<int> start_year;
  ReferencePopulation reference = ReferencePopulation::PulseYear;
};

struct RunConfig {
  std::filesystem::path scenario;
  std::vector<std::filesystem::path> patterns;
  std::filesystem::path trajectory;
  std::optional<std::filesystem::path> damage_params_file;
  DamageParams damage;
  std::vector<Variant> variants{Variant::R, Variant::RP, Variant::RU, Variant::RPU};
  std::optional<GlobalDf> global_df = GlobalDf::quadratic();
  std::vector<double> discount_rates{0.015};
  std::optional<int> discount_base_year;
  int horizon = 2100;
  EcsConfig ecs;
  PulseParams pulse;
  bool pulse_scales_with_ecs = false;
  UhiParams uhi;
  bool uhi_ratchet = false;
  std::optional<double> urban_threshold;
  ScuhiConfig scuhi;
  std::vector<double> quantiles{0.05, 0.5, 0.95};
  std::filesystem::path output_dir = "out";
  unsigned threads = 1;

  bool wants(Variant v) const { return std::find(variants.begin(), variants.end(), v) != variants.end(); }
  int discount_base() const { return discount_base_year.value_or(pulse.year); }
  int reduction_start() const { return scuhi.start_year.value_or(pulse.year); }
  DiscountSpec discount(double rate) const { return {rate, discount_base(), horizon}; }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::ParseError, "unknown key '" + key + "' in " + where);
  }
}

inline void require_range(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidRange, what);
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline RegionDamage read_region_damage(const nlohmann::json& j, RegionDamage d, const std::string& where) {
  reject_unknown(j, {"alpha_r", "alpha_u", "phi"}, where);
  const bool explicit_u = j.contains("alpha_u");
  if (j.contains("alpha_r")) d.alpha_r = j.at("alpha_r").get<double>();
  d.alpha_u = explicit_u ? j.at("alpha_u").get<double>() : (j.contains("alpha_r") ? d.alpha_r : d.alpha_u);
  if (j.contains("phi")) d.phi = j.at("phi").get<double>();
  require_range(d.alpha_r >= 0.0 && d.alpha_u >= 0.0, where + ": damage coefficients must be >= 0");
  require_range(d.phi >= 0.0 && d.phi <= 1.0, where + ": phi must lie in [0, 1]");
  return d;
}

inline RunConfig parse_config_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j, {"scenario", "patterns", "trajectory", "damage_params", "damage", "variants", "global_df",
                     "discount", "ecs", "pulse", "uhi", "urban_threshold", "scuhi", "quantiles", "output_dir",
                     "threads"},
                 "config");
  RunConfig c;
  for (const char* key : {"scenario", "patterns", "trajectory"})
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing required key '") + key + "'");

  c.scenario = resolve(base_dir, j.at("scenario").get<std::string>());
  const auto& pats = j.at("patterns");
  if (pats.is_string()) {
    c.patterns.push_back(resolve(base_dir, pats.get<std::string>()));
  } else {
    for (const auto& p : pats) c.patterns.push_back(resolve(base_dir, p.get<std::string>()));
  }
  if (c.patterns.empty()) throw Error(ErrorCode::ParseError, "at least one pattern file is required");
  c.trajectory = resolve(base_dir, j.at("trajectory").get<std::string>());
  if (j.contains("damage_params")) c.damage_params_file = resolve(base_dir, j.at("damage_params").get<std::string>());

  if (j.contains("damage")) {
    const auto& dmg = j.at("damage");
    reject_unknown(dmg, {"default", "regions"}, "damage");
    if (dmg.contains("default")) {
      const auto d = read_region_damage(dmg.at("default"), RegionDamage{}, "damage.default");
      c.damage.region.fill(d);
    }
    if (dmg.contains("regions")) {
      for (const auto& [code, val] : dmg.at("regions").items()) {
        auto region = parse_region(code);
        if (!region) throw Error(ErrorCode::ParseError, "unknown region '" + code + "' in damage.regions");
        c.damage.of(*region) = read_region_damage(val, c.damage.of(*region), "damage.regions." + code);
      }
    }
  }

  if (j.contains("variants")) {
    c.variants.clear();
    for (const auto& v : j.at("variants")) {
      const auto name = v.get<std::string>();
      auto parsed = parse_variant(name);
      if (!parsed) throw Error(ErrorCode::ParseError, "unknown variant '" + name + "'");
      if (!c.wants(*parsed)) c.variants.push_back(*parsed);
    }
    if (c.variants.empty()) throw Error(ErrorCode::ParseError, "at least one variant is required");
  }

  if (j.contains("global_df")) {
    const auto& g = j.at("global_df");
    const auto kind = g.value("kind", std::string("quadratic"));
    if (kind == "none") {
      reject_unknown(g, {"kind"}, "global_df");
      c.global_df.reset();
    } else if (kind == "quadratic") {
      reject_unknown(g, {"kind", "coefficient"}, "global_df");
      c.global_df = GlobalDf::quadratic(g.value("coefficient", 0.00236));
    } else if (kind == "weitzman") {
      reject_unknown(g, {"kind", "s1", "s2", "power"}, "global_df");
      c.global_df = GlobalDf::weitzman(g.value("s1", 20.46), g.value("s2", 6.081), g.value("power", 6.754));
    } else if (kind == "external-table") {
      reject_unknown(g, {"kind", "temperature", "damage"}, "global_df");
      c.global_df = GlobalDf::table(g.at("temperature").get<std::vector<double>>(),
                                    g.at("damage").get<std::vector<double>>());
    } else {
      throw Error(ErrorCode::ParseError, "unknown global_df kind '" + kind + "'");
    }
    if (c.global_df) {
      try {
        validate(*c.global_df);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidRange, std::string("global_df: ") + e.what());
      }
    }
  }

  if (j.contains("pulse")) {
    const auto& p = j.at("pulse");
    reject_unknown(p, {"year", "size_gtc", "amplitudes", "taus", "scale_with_ecs"}, "pulse");
    c.pulse.year = p.value("year", c.pulse.year);
    c.pulse.size_gtc = p.value("size_gtc", c.pulse.size_gtc);
    if (p.contains("amplitudes")) c.pulse.amplitude = p.at("amplitudes").get<std::array<double, 3>>();
    if (p.contains("taus")) c.pulse.tau = p.at("taus").get<std::array<double, 3>>();
    c.pulse_scales_with_ecs = p.value("scale_with_ecs", false);
    require_range(c.pulse.size_gtc > 0.0, "pulse.size_gtc must be positive");
    for (double t : c.pulse.tau) require_range(t > 0.0, "pulse.taus must be positive");
  }

  if (j.contains("discount")) {
    const auto& d = j.at("discount");
    reject_unknown(d, {"rates", "rate", "base_year", "horizon"}, "discount");
    if (d.contains("rate")) c.discount_rates = {d.at("rate").get<double>()};
    if (d.contains("rates")) c.discount_rates = d.at("rates").get<std::vector<double>>();
    if (d.contains("base_year")) c.discount_base_year = d.at("base_year").get<int>();
    c.horizon = d.value("horizon", c.horizon);
  }
  if (c.discount_rates.empty()) throw Error(ErrorCode::ParseError, "discount.rates is empty");
  for (double r : c.discount_rates) require_range(r > -1.0, "discount rate must exceed -1");
  require_range(c.horizon >= c.discount_base(), "discount horizon precedes base year");

  if (j.contains("ecs")) {
    const auto& e = j.at("ecs");
    reject_unknown(e, {"mode", "value", "draws", "seed", "lower", "mode_value", "upper", "reference"}, "ecs");
    const auto mode = e.value("mode", std::string("fixed"));
    if (mode == "fixed") {
      c.ecs.mode = EcsMode::Fixed;
    } else if (mode == "sample") {
      c.ecs.mode = EcsMode::Sample;
    } else {
      throw Error(ErrorCode::ParseError, "unknown ecs mode '" + mode + "'");
    }
    c.ecs.value = e.value("value", c.ecs.value);
    if (e.contains("draws")) {
      const auto draws = e.at("draws").get<std::int64_t>();
      require_range(draws >= 1, "ecs.draws must be >= 1");
      c.ecs.draws = static_cast<std::size_t>(draws);
    }
    c.ecs.seed = e.value("seed", c.ecs.seed);
    c.ecs.distribution.lower = e.value("lower", c.ecs.distribution.lower);
    c.ecs.distribution.mode = e.value("mode_value", c.ecs.distribution.mode);
    c.ecs.distribution.upper = e.value("upper", c.ecs.distribution.upper);
    c.ecs.reference = e.value("reference", c.ecs.reference);
    require_range(c.ecs.value > 0.0 && c.ecs.reference > 0.0, "ECS values must be positive");
    const auto& dist = c.ecs.distribution;
    require_range(dist.lower > 0.0 && dist.lower < dist.mode && dist.mode < dist.upper,
                  "ECS distribution needs 0 < lower < mode < upper");
  }
  if (c.ecs.mode == EcsMode::Fixed) c.ecs.draws = 1;

  if (j.contains("uhi")) {
    const auto& u = j.at("uhi");
    reject_unknown(u, {"a", "b", "ratchet"}, "uhi");
    c.uhi.a = u.value("a", c.uhi.a);
    c.uhi.b = u.value("b", c.uhi.b);
    c.uhi_ratchet = u.value("ratchet", false);
    require_range(c.uhi.a >= 0.0, "uhi.a must be >= 0");
    require_range(c.uhi.b > 0.0 && c.uhi.b < 1.0, "uhi.b must lie in (0, 1)");
  }

  if (j.contains("urban_threshold")) {
    c.urban_threshold = j.at("urban_threshold").get<double>();
    require_range(*c.urban_threshold > 0.0, "urban_threshold must be positive");
  }

  if (j.contains("scuhi")) {
    const auto& s = j.at("scuhi");
    reject_unknown(s, {"reduction", "start_year", "reference_population"}, "scuhi");
    c.scuhi.reduction = s.value("reduction", c.scuhi.reduction);
    require_range(c.scuhi.reduction > 0.0 && c.scuhi.reduction <= 1.0, "scuhi.reduction must lie in (0, 1]");
    if (s.contains("start_year")) c.scuhi.start_year = s.at("start_year").get<int>();
    const auto ref = s.value("reference_population", std::string("pulse_year"));
    if (ref == "pulse_year") {
      c.scuhi.reference = ReferencePopulation::PulseYear;
    } else if (ref == "horizon") {
      c.scuhi.reference = ReferencePopulation::Horizon;
    } else if (ref == "mean") {
      c.scuhi.reference = ReferencePopulation::Mean;
    } else {
      throw Error(ErrorCode::ParseError, "unknown scuhi.reference_population '" + ref + "'");
    }
  }

  if (j.contains("quantiles")) {
    c.quantiles = j.at("quantiles").get<std::vector<double>>();
    for (double q : c.quantiles) require_range(q >= 0.0 && q <= 1.0, "quantiles must lie in [0, 1]");
  }
  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
  else c.output_dir = base_dir / "out";
  if (j.contains("threads")) {
    const auto t = j.at("threads").get<std::int64_t>();
    require_range(t >= 1, "threads must be >= 1");
    c.threads = static_cast<unsigned>(t);
  }
  return c;
}

}  // namespace detail

/// Existence checks on every referenced input file.
inline void check_files(const RunConfig& c) {
  auto need = [](const std::filesystem::path& p) {
    if (!std::filesystem::is_regular_file(p)) throw Error(ErrorCode::MissingFile, p.string());
  };
  need(c.scenario);
  need(c.trajectory);
  for (const auto& p : c.patterns) need(p);
  if (c.damage_params_file) need(*c.damage_params_file);
}

/// Parses and resolves `raw`; relative paths resolve against `base_dir`.
inline RunConfig validate_config(const std::string& raw, const std::filesystem::path& base_dir = ".") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  RunConfig c;
  try {
    c = detail::parse_config_json(j, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  check_files(c);
  if (c.damage_params_file) {
    try {
      c.damage = load_damage_params(*c.damage_params_file, c.damage);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PhiOutOfRange) throw Error(ErrorCode::InvalidRange, e.what());
      throw;
    }
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return validate_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

inline std::string to_string(ReferencePopulation r) {
  switch (r) {
    case ReferencePopulation::PulseYear: return "pulse_year";
    case ReferencePopulation::Horizon: return "horizon";
    case ReferencePopulation::Mean: return "mean";
  }
  return "?";
}

/// Resolved configuration echoed into the manifest.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["scenario"] = c.scenario.string();
  j["trajectory"] = c.trajectory.string();
  for (const auto& p : c.patterns) j["patterns"].push_back(p.string());
  if (c.damage_params_file) j["damage_params"] = c.damage_params_file->string();
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    const auto& d = c.damage.region[r];
    j["damage"][std::string(kRegionCodes[r])] = {{"alpha_r", d.alpha_r}, {"alpha_u", d.alpha_u}, {"phi", d.phi}};
  }
  for (auto v : c.variants) j["variants"].push_back(std::string(to_string(v)));
  if (!c.global_df) {
    j["global_df"] = {{"kind", "none"}};
  } else {
    const auto& g = *c.global_df;
    switch (g.kind) {
      case GlobalDfKind::Quadratic: j["global_df"] = {{"kind", "quadratic"}, {"coefficient", g.coefficient}}; break;
      case GlobalDfKind::Weitzman:
        j["global_df"] = {{"kind", "weitzman"}, {"s1", g.s1}, {"s2", g.s2}, {"power", g.power}};
        break;
      case GlobalDfKind::Table:
        j["global_df"] = {{"kind", "external-table"}, {"temperature", g.table_t}, {"damage", g.table_d}};
        break;
    }
  }
  j["discount"] = {{"rates", c.discount_rates}, {"base_year", c.discount_base()}, {"horizon", c.horizon}};
  j["ecs"] = {{"mode", c.ecs.mode == EcsMode::Fixed ? "fixed" : "sample"},
              {"value", c.ecs.value},
              {"draws", c.ecs.draws},
              {"seed", c.ecs.seed},
              {"lower", c.ecs.distribution.lower},
              {"mode_value", c.ecs.distribution.mode},
              {"upper", c.ecs.distribution.upper},
              {"reference", c.ecs.reference}};
  j["pulse"] = {{"year", c.pulse.year},
                {"size_gtc", c.pulse.size_gtc},
                {"amplitudes", c.pulse.amplitude},
                {"taus", c.pulse.tau},
                {"scale_with_ecs", c.pulse_scales_with_ecs}};
  j["uhi"] = {{"a", c.uhi.a}, {"b", c.uhi.b}, {"ratchet", c.uhi_ratchet}};
  if (c.urban_threshold) j["urban_threshold"] = *c.urban_threshold;
  j["scuhi"] = {{"reduction", c.scuhi.reduction},
                {"start_year", c.reduction_start()},
                {"reference_population", to_string(c.scuhi.reference)}};
  j["quantiles"] = c.quantiles;
  j["output_dir"] = c.output_dir.string();
  return j;
}

}  // namespace gridscc
