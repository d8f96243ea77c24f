// Benchmark driver: `run` executes one configuration over a range of seeds and
// writes a trace CSV plus metadata; `plot` merges trace CSVs into an SVG chart.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "halpern_vr/experiment.hpp"
#include "halpern_vr/plot.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

// CLI11 option names mapped to config keys. Order is irrelevant: command-line
// values are applied after the config file, so they always win.
const std::vector<std::pair<std::string, std::string>> kRunFlags = {
    {"--problem", "matrix-game|ouyang-xu|synthetic-coco|synthetic-monotone"},
    {"--algorithm", "vr-halpern|inexact-halpern|vr-forb|eg"},
    {"--m", "matrix game / quadratic program size"},
    {"--theta", "policeman-burglar decay"},
    {"--n", "synthetic: number of components"},
    {"--d", "synthetic: dimension"},
    {"--L", "synthetic-coco cocoercivity modulus"},
    {"--mu", "synthetic-monotone strong monotonicity"},
    {"--problem-seed", "seed for the generated instance"},
    {"--matrix", "CSV file with the game matrix"},
    {"--sampling", "uniform|importance"},
    {"--seed", "first run seed"},
    {"--seeds", "number of consecutive seeds"},
    {"--epochs", "oracle budget in epochs"},
    {"--max-iters", "iteration cap per run"},
    {"--log-stride", "log every k-th iteration"},
    {"--divergence-factor", "abort when the residual grows by this factor"},
    {"--eta", "Halpern step override"},
    {"--tau", "EG / VR-FoRB / inner step override"},
    {"--forb-p", "VR-FoRB refresh probability override"},
    {"--inner-schedule", "practical|theoretical"},
    {"--c0", "practical inner schedule constant"},
    {"--out", "output CSV path"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-reduced Halpern solvers for finite-sum monotone inclusions"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one configuration and write a trace CSV");
  std::string config_path;
  std::size_t threads = 0;
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_option("--threads", threads, "concurrent seeds (default: HALPERN_VR_THREADS or cores)");
  std::vector<std::string> values(kRunFlags.size());
  for (std::size_t i = 0; i < kRunFlags.size(); ++i) {
    run->add_option(kRunFlags[i].first, values[i], kRunFlags[i].second);
  }

  auto* plot = app.add_subcommand("plot", "merge trace CSVs into an SVG chart");
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  plot->add_option("--in", plot_inputs, "trace CSV (repeatable)")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*plot) {
    try {
      hvr::emit_plot(plot_inputs, plot_out);
    } catch (const hvr::InvalidArgument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }

  hvr::ExperimentConfig config;
  try {
    if (!config_path.empty()) hvr::apply_config_file(config, config_path);
    for (std::size_t i = 0; i < kRunFlags.size(); ++i) {
      if (run->count(kRunFlags[i].first) > 0) {
        hvr::apply_setting(config, kRunFlags[i].first.substr(2), values[i]);
      }
    }
    if (config.out.empty()) throw hvr::ConfigError("config: 'out' is required");
    hvr::validate(config);
  } catch (const hvr::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto result = hvr::run_experiment(config, threads);
    hvr::write_experiment(result, config.out);
    std::size_t records = 0;
    for (const auto& r : result.runs) records += r.trace.size();
    std::cout << "wrote " << records << " records for " << result.runs.size() << " seed(s) to "
              << config.out << '\n';
  } catch (const hvr::NumericalDivergence& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const hvr::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
