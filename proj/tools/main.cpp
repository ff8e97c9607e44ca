#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "smi/error.hpp"

namespace {

constexpr int kDataError = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social Mobility Index pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string level;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--level", level, "Analysis level")->check(CLI::IsMember({"country", "state", "city"}));
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for synth");

  using Command = void (*)(const smi::app::PipelineConfig&, std::ostream&);
  Command command = nullptr;
  const std::pair<const char*, std::pair<const char*, Command>> subcommands[] = {
      {"ingest", {"Parse JSONL inputs into the event store", smi::app::cmd_ingest}},
      {"compute", {"Compute weekly and daily mobility series", smi::app::cmd_compute}},
      {"report", {"Reduction tables and summaries", smi::app::cmd_report}},
      {"changepoint", {"Change points and stationarity", smi::app::cmd_changepoint}},
      {"correlate", {"Correlation panels", smi::app::cmd_correlate}},
      {"synth", {"Generate a synthetic event corpus", smi::app::cmd_synth}},
  };
  for (const auto& [name, entry] : subcommands) {
    const Command fn = entry.second;
    app.add_subcommand(name, entry.first)->callback([&command, fn] { command = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    smi::app::PipelineConfig config = smi::app::load_config(config_path);
    if (!level.empty()) config.levels = {*smi::geo::parse_level(level)};
    if (threads) config.threads = *threads;
    if (seed) config.synth.seed = *seed;
    command(config, std::cerr);
  } catch (const smi::ConfigError& e) {
    std::cerr << "smi: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "smi: error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
