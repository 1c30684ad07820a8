#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "momo/config.hpp"
#include "momo/errors.hpp"
#include "momo/pipeline.hpp"
#include "momo/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// --predictor changes results, so it lands in the config echo; --out only
// redirects writes and stays out of the echo to keep reports byte-identical
// across output locations.
momo::RunConfig load_config(const std::string& config_path,
                            const std::string& predictor_override) {
  momo::RunConfig config = momo::load_run_config(config_path);
  if (!predictor_override.empty()) config.predictor = predictor_override;
  momo::validate_run_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walk-forward return-momentum forecasting and backtesting workbench"};
  app.set_version_flag("--version", momo::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string predictor_override;
  bool dump_features = false;
  bool dump_datasets = false;
  std::string run_dir;
  bool emit_svg = false;

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic universe as CSV files");
  generate->add_option("--config", config_path, "run config JSON")->required();
  generate->add_option("--out", out_override, "override output_dir");

  CLI::App* run = app.add_subcommand("run", "run the full train/predict/backtest pipeline");
  run->add_option("--config", config_path, "run config JSON")->required();
  run->add_option("--out", out_override, "override output_dir");
  run->add_option("--predictor", predictor_override, "override predictor: lstm|persistence|zero")
      ->check(CLI::IsMember({"lstm", "persistence", "zero"}));
  run->add_flag("--dump-features", dump_features, "also write per-ticker feature CSVs");
  run->add_flag("--dump-datasets", dump_datasets, "also write per-fold dataset audit JSON");

  CLI::App* report = app.add_subcommand("report", "render the summary table of a finished run");
  report->add_option("run_dir", run_dir, "run output directory")->required();
  report->add_flag("--svg", emit_svg, "emit equity and dispersion charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::optional<std::filesystem::path> out =
      out_override.empty() ? std::nullopt
                           : std::optional<std::filesystem::path>(out_override);
  try {
    if (generate->parsed()) {
      momo::cmd_generate(load_config(config_path, predictor_override), std::cerr, out);
    } else if (run->parsed()) {
      momo::cmd_run(load_config(config_path, predictor_override), std::cerr, dump_features,
                    dump_datasets, out);
    } else if (report->parsed()) {
      momo::cmd_report(run_dir, emit_svg, std::cout);
    }
  } catch (const momo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const momo::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const momo::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
