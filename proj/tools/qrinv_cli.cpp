// Command-line front end: synth | complete | invert | pipeline.
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "qrinv/error.hpp"
#include "qrinv/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qrinv;

namespace {

void setup_logging(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>((out_dir / "log.txt").string(), true);
  auto logger = std::make_shared<spdlog::logger>("qrinv", spdlog::sinks_init_list{console, file});
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%Y-%m-%d %H:%M:%S.%e] [%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse medium reconstruction from partial boundary data"};
  app.require_subcommand(1);

  std::string config_path, preset_name, dataset, completed;
  fs::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment configuration (JSON)");
    sub->add_option("--preset", preset_name, "Built-in experiment")
        ->check(CLI::IsMember(preset_names()));
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Noise seed (overrides the configuration)");
    sub->add_flag("--paper-scale", paper_scale, "Use the mesh sizes of the original study");
  };
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  CLI::App* complete = app.add_subcommand("complete", "Transmit difference data to the interior curve");
  CLI::App* invert = app.add_subcommand("invert", "Localize and reconstruct the perturbation");
  CLI::App* pipeline = app.add_subcommand("pipeline", "synth, complete and invert in one run");
  for (auto* s : {synth, complete, invert, pipeline}) add_common(s);
  complete->add_option("--dataset", dataset, "Dataset file")->required();
  invert->add_option("--completed", completed, "Completed-trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (config_path.empty() == preset_name.empty()) throw ValidationError("give exactly one of --config or --preset");
    ExperimentConfig cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
    if (seed) cfg.noise.seed = *seed;
    if (paper_scale) apply_paper_scale(cfg);
    cfg.validate();
    setup_logging(out_dir);
    spdlog::info("config {} checksum {}", cfg.name, format_hex(cfg.checksum()));
    spdlog::info("noise seed {}", cfg.noise.seed);

    fs::path result;
    if (synth->parsed()) {
      result = cmd_synth(cfg, out_dir);
    } else if (complete->parsed()) {
      result = cmd_complete(cfg, dataset, out_dir);
    } else if (invert->parsed()) {
      result = cmd_invert(cfg, completed, out_dir);
    } else {
      result = cmd_pipeline(cfg, out_dir);
    }
    std::cout << result.string() << '\n';
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const UnknownTag& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidGeometry& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
