#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "ttscorpus/corpus/manifest.hpp"
#include "ttscorpus/corpus/stats.hpp"
#include "ttscorpus/pipeline/config.hpp"
#include "ttscorpus/pipeline/report.hpp"
#include "ttscorpus/pipeline/run.hpp"

namespace pl = ttscorpus::pipeline;

namespace {

constexpr int kConfigError = 1;

int cmd_run(const std::string& path, std::optional<int> workers,
            std::optional<std::string> providers, bool resume) {
  pl::PipelineConfig config = pl::load_config(path);
  if (workers) config.worker_count = *workers;
  if (providers) config.providers.mode = pl::provider_mode_from_string(*providers);
  config.validate();

  const auto result = pl::run(config, {.resume = resume});
  std::cout << pl::render_report_text(result.report);
  for (const auto& e : result.errors) std::cerr << "failed: " << e << "\n";
  return result.exit_code();
}

int cmd_stats(const std::string& path) {
  const auto manifest = ttscorpus::read_manifest_file(path);
  const auto recount = ttscorpus::compute_stats(manifest.segments);
  std::cout << "manifest: " << ttscorpus::to_string(manifest.kind) << "\n"
            << "config hash: " << manifest.pipeline_config_hash << "\n"
            << pl::render_stats_text(recount);
  if (recount != manifest.stats) {
    std::cerr << "warning: header stats differ from a recount of the segments\n";
    return 1;
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto config = pl::load_config(path);
  std::cout << "ok " << pl::config_hash(config) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds a TTS corpus from long-form narrated recordings"};
  app.require_subcommand(1);
  std::string level = "info";
  app.add_option("--log-level", level, "trace, debug, info, warn, error")->capture_default_str();

  std::string config_path;
  std::optional<int> workers;
  std::optional<std::string> providers;
  bool resume = false;
  auto* run = app.add_subcommand("run", "Process every recording under input_dir");
  run->add_option("--config", config_path, "Config file (JSON)")->required();
  run->add_option("--workers", workers, "Override worker_count")->check(CLI::PositiveNumber);
  run->add_option("--providers", providers, "Override providers.mode")
      ->check(CLI::IsMember({"mock", "remote"}));
  run->add_flag("--resume", resume, "Reuse checkpoints from a previous run");

  std::string manifest_path;
  auto* stats = app.add_subcommand("stats", "Print statistics of a manifest");
  stats->add_option("--manifest", manifest_path, "manifest.jsonl")->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate-config", "Check a config file and print its hash");
  validate->add_option("--config", config_path, "Config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("ttscorpus"));
  spdlog::set_level(spdlog::level::from_str(level));

  try {
    if (*run) return cmd_run(config_path, workers, providers, resume);
    if (*stats) return cmd_stats(manifest_path);
    return cmd_validate(config_path);
  } catch (const pl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
