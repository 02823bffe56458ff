// gridscc: social cost of carbon on a gridded exposure layer.
//
//   gridscc run --config <file> [--out <dir>] [--seed <u64>] [--threads <n>]
//   gridscc validate --config <file>
//   gridscc pulse --year <y> [--t0 <year>] [--size <GtC>]
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 runtime error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridscc/gridscc.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int exit_code(const gridscc::Error& e) {
  switch (e.category()) {
    case gridscc::ErrorCategory::Config: return kExitConfig;
    case gridscc::ErrorCategory::Data: return kExitData;
    case gridscc::ErrorCategory::Runtime: return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridded social cost of carbon with urban heat island decomposition"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* run_cmd = app.add_subcommand("run", "Run every configured variant and write the reports");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "ECS sampling seed (overrides the config)");
  auto* threads_opt = run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Parse and resolve a configuration, echo it as JSON");
  validate_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();

  int last_year = 2110;
  gridscc::PulseParams pulse;
  auto* pulse_cmd = app.add_subcommand("pulse", "Print the temperature response to a CO2 pulse");
  pulse_cmd->add_option("--year", last_year, "Last year of the table")->required();
  pulse_cmd->add_option("--t0", pulse.year, "Pulse year")->capture_default_str();
  pulse_cmd->add_option("--size", pulse.size_gtc, "Pulse size in GtC")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      gridscc::RunOptions opt;
      if (*out_opt) opt.output_dir = out_dir;
      if (*seed_opt) opt.seed = seed;
      if (*threads_opt) opt.threads = threads;
      auto outcome = gridscc::run(gridscc::load_config(config_path), opt);
      std::cout << "wrote";
      for (const auto& f : outcome.files) std::cout << ' ' << f;
      std::cout << " to " << outcome.output_dir.string() << " (" << outcome.members << " ensemble member"
                << (outcome.members == 1 ? "" : "s") << ")\n";
      return 0;
    }
    if (*validate_cmd) {
      const auto cfg = gridscc::load_config(config_path);
      std::cout << gridscc::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (*pulse_cmd) {
      gridscc::validate(pulse);
      std::cout << "year,delta_t_degC\n";
      for (int y = pulse.year; y <= last_year; ++y) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%d,%.9e\n", y, gridscc::pulse_delta_t(pulse, y));
        std::cout << buf;
      }
      return 0;
    }
  } catch (const gridscc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
