// memhtm: behavioral simulator CLI.
//
// Subcommands:
//   generate  write a synthetic benchmark dataset
//   run       train + classify one experiment, emit a JSON report
//   sweep     rerun an experiment over a device-parameter grid
//   cost      area/power estimate for a given hardware composition
//
// Errors leave exit code 1 and a one-line JSON object on stderr.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <memhtm/memhtm.hpp>

namespace {

memhtm::DevicePreset preset_by_name(const std::string& name) {
  if (name == "ideal") return memhtm::DevicePreset::ideal();
  if (name == "memristive") return memhtm::DevicePreset::memristive();
  throw std::runtime_error("unknown preset '" + name + "' (expected ideal or memristive)");
}

memhtm::SweepAxis parse_sweep_axis(const std::string& raw) {
  const auto eq = raw.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= raw.size()) {
    throw std::runtime_error("--sweep expects KEY=v1,v2,... got '" + raw + "'");
  }
  memhtm::SweepAxis axis;
  axis.key = raw.substr(0, eq);
  std::string values = raw.substr(eq + 1);
  std::size_t start = 0;
  while (start <= values.size()) {
    const auto comma = values.find(',', start);
    const std::string tok =
        values.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t pos = 0;
      axis.values.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::runtime_error("--sweep " + axis.key + ": malformed value '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return axis;
}

void log_timings(const memhtm::MetricsReport& report) {
  for (const auto& [phase, seconds] : report.phase_seconds) {
    std::cerr << "# " << phase << ": " << seconds << " s\n";
  }
}

struct RunOptions {
  std::string dataset;
  std::string config_path;
  std::string backend = "ideal";
  std::string preset;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;
};

void add_run_options(CLI::App& cmd, RunOptions& opt, bool dataset_required = true) {
  auto* ds = cmd.add_option("--dataset", opt.dataset, "Dataset directory of class subfolders");
  if (dataset_required) ds->required();
  cmd.add_option("--config", opt.config_path, "Flat key=value config file");
  cmd.add_option("--backend", opt.backend, "Compute backend")
      ->check(CLI::IsMember({"ideal", "memristive"}));
  cmd.add_option("--preset", opt.preset,
                 "Device preset name (default: matches the backend)");
  cmd.add_option("--seed", opt.seed, "Root seed for every random draw");
  cmd.add_option("--threads", opt.threads, "Worker threads for encoding")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  cmd.add_option("--out", opt.out, "Report path (stdout when omitted)");
}

memhtm::ExperimentSpec build_spec(const RunOptions& opt) {
  memhtm::ExperimentSpec spec;
  spec.dataset_dir = opt.dataset;
  spec.backend =
      opt.backend == "ideal" ? memhtm::BackendKind::ideal : memhtm::BackendKind::memristive;
  spec.preset_name = opt.preset.empty() ? opt.backend : opt.preset;
  spec.seed = opt.seed;
  spec.threads = opt.threads;
  spec.out_path = opt.out;

  memhtm::SimulationConfig base;
  base.preset = preset_by_name(spec.preset_name);
  spec.config = opt.config_path.empty()
                    ? std::move(base)
                    : memhtm::load_simulation_config(opt.config_path, std::move(base));
  spec.config.validate();
  return spec;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Behavioral simulator for cortical-style sparse coding on memristor hardware"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark dataset");
  std::string gen_out;
  memhtm::SyntheticSpec synth;
  generate->add_option("--out", gen_out, "Output directory")->required();
  generate->add_option("--classes", synth.classes, "Number of classes");
  generate->add_option("--per-class", synth.per_class, "Images per class");
  generate->add_option("--width", synth.width, "Image width");
  generate->add_option("--height", synth.height, "Image height");
  generate->add_option("--flip-prob", synth.flip_probability, "Per-pixel bit-flip probability");
  generate->add_option("--seed", synth.seed, "Generator seed");

  // run
  auto* run = app.add_subcommand("run", "Run one experiment and report metrics");
  RunOptions run_opt;
  add_run_options(*run, run_opt);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over device parameters");
  RunOptions sweep_opt;
  std::vector<std::string> sweep_raw;
  add_run_options(*sweep_cmd, sweep_opt);
  sweep_cmd->add_option("--sweep", sweep_raw, "Axis KEY=v1,v2,... (levels, sigma_r, p_switch)")
      ->required();

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "Area/power estimate for a hardware composition");
  memhtm::HardwareCounts counts{1, 1, 1};
  cost_cmd->add_option("--sp-blocks", counts.sp_blocks_1x4, "1x4 pooler block count");
  cost_cmd->add_option("--tm-cells", counts.tm_cells_1x1, "1x1 sequence-cell count");
  cost_cmd->add_option("--matcher-cells", counts.matcher_cells_1x1, "1x1 matcher-cell count");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    const int written = memhtm::generate_synthetic_dataset(gen_out, synth);
    nlohmann::json j;
    j["classes"] = synth.classes;
    j["path"] = gen_out;
    j["per_class"] = synth.per_class;
    j["written"] = written;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (run->parsed()) {
    const memhtm::ExperimentSpec spec = build_spec(run_opt);
    const memhtm::MetricsReport report = memhtm::run_experiment(spec);
    log_timings(report);
    if (spec.out_path.empty()) {
      std::cout << memhtm::report_json(report, spec).dump(2) << "\n";
    } else {
      memhtm::write_report(report, spec, spec.out_path);
      std::cerr << "# report: " << spec.out_path.string() << "\n";
    }
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const memhtm::ExperimentSpec spec = build_spec(sweep_opt);
    std::vector<memhtm::SweepAxis> axes;
    axes.reserve(sweep_raw.size());
    for (const auto& raw : sweep_raw) axes.push_back(parse_sweep_axis(raw));
    const nlohmann::json summary = memhtm::sweep(spec, axes);
    if (sweep_opt.out.empty()) {
      std::cout << summary.dump(2) << "\n";
    } else {
      std::ofstream out(sweep_opt.out, std::ios::binary);
      if (!out) throw std::runtime_error(sweep_opt.out + ": cannot write");
      out << summary.dump(2) << "\n";
      std::cerr << "# summary: " << sweep_opt.out << "\n";
    }
    return 0;
  }

  const memhtm::CostEstimate estimate =
      memhtm::estimate_cost(counts, memhtm::CostTable::analog_reference());
  nlohmann::json j;
  j["area_um2"] = estimate.area_um2;
  j["counts"] = {{"matcher_cells_1x1", counts.matcher_cells_1x1},
                 {"sp_blocks_1x4", counts.sp_blocks_1x4},
                 {"tm_cells_1x1", counts.tm_cells_1x1}};
  j["power_uw"] = estimate.power_uw;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
