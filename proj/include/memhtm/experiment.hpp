#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memhtm/config_file.hpp"
#include "memhtm/dataset.hpp"
#include "memhtm/pipeline.hpp"
#include "memhtm/rng.hpp"

namespace memhtm {

// One fully pinned run: dataset, backend, device preset, seed, geometry.
// Identical spec + identical dataset bytes give a byte-identical report.
struct ExperimentSpec {
  std::filesystem::path dataset_dir;
  BackendKind backend = BackendKind::ideal;
  std::string preset_name = "ideal";
  std::uint64_t seed = 42;
  int threads = 1;
  SimulationConfig config;
  std::filesystem::path out_path;  // empty: compute only, write nothing
};

struct MetricsReport {
  std::vector<std::string> class_names;
  int train_count = 0;
  int test_count = 0;
  int sdr_bits = 0;
  std::vector<std::vector<int>> confusion;  // [true class][predicted class]
  std::vector<double> per_class_accuracy;
  double overall_accuracy = 0.0;
  double density_mean = 0.0;
  double density_min = 0.0;
  double density_max = 0.0;
  HardwareCounts counts;
  CostEstimate cost;
  std::uint64_t program_pulses = 0;
  std::uint64_t read_slots = 0;
  // Wall-clock per phase. Deliberately kept out of the serialized report so
  // report bytes stay a pure function of spec + dataset; callers log these.
  std::vector<std::pair<std::string, double>> phase_seconds;
};

namespace detail {

template <typename F>
auto run_phase(const char* name, std::vector<std::pair<std::string, double>>& timings, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      timings.emplace_back(name, std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0).count());
    } else {
      auto result = body();
      timings.emplace_back(name, std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0).count());
      return result;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("phase " + std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

// Train templates on the train split, classify the test split, assemble the
// metrics. Encoding parallelizes over images; every image draws noise from
// its own seed-derived stream, so the result is invariant to thread count.
inline MetricsReport run_experiment(const ExperimentSpec& spec) {
  spec.config.validate();
  MetricsReport report;

  // load
  Dataset ds;
  DatasetSplit split;
  detail::run_phase("load", report.phase_seconds, [&] {
    ds = load_dataset(spec.dataset_dir);
    split = split_dataset(ds, spec.config.train_fraction, spec.config.test_fraction);
    if (split.test_indices.empty()) {
      throw std::runtime_error("split leaves no test items");
    }
    const auto& first = ds.items.front().image;
    for (const auto& item : ds.items) {
      if (item.image.width != first.width || item.image.height != first.height) {
        throw std::runtime_error(item.path + ": image shape differs from the rest");
      }
    }
  });

  report.class_names = ds.class_names;
  report.train_count = static_cast<int>(split.train_indices.size());
  report.test_count = static_cast<int>(split.test_indices.size());

  const RngStream root(spec.seed, 0);

  // encode
  std::vector<SdrVector> encoded(ds.items.size());
  detail::run_phase("encode", report.phase_seconds, [&] {
    const auto& shape = ds.items.front().image;
    SpEncoder encoder(spec.config.pipeline, shape.width, shape.height, spec.backend,
                      spec.config.preset, root);
    report.sdr_bits = encoder.bits();

    std::vector<int> work = split.train_indices;
    work.insert(work.end(), split.test_indices.begin(), split.test_indices.end());

    std::atomic<std::size_t> cursor{0};
    auto encode_range = [&] {
      for (;;) {
        const std::size_t w = cursor.fetch_add(1);
        if (w >= work.size()) break;
        const int item = work[w];
        const ImagePattern prepared = preprocess(ds.items[static_cast<std::size_t>(item)].image);
        RngStream noise =
            root.substream(stream_domain::encode_noise, static_cast<std::uint64_t>(item));
        encoded[static_cast<std::size_t>(item)] = encoder.encode(prepared, noise);
      }
    };
    const int workers =
        std::max(1, std::min<int>(spec.threads, static_cast<int>(work.size())));
    if (workers == 1) {
      encode_range();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int t = 0; t < workers; ++t) pool.emplace_back(encode_range);
      for (auto& t : pool) t.join();
    }

    double sum = 0.0;
    report.density_min = 1.0;
    report.density_max = 0.0;
    for (const int item : work) {
      const double d = encoded[static_cast<std::size_t>(item)].density();
      sum += d;
      report.density_min = std::min(report.density_min, d);
      report.density_max = std::max(report.density_max, d);
    }
    report.density_mean = sum / static_cast<double>(work.size());
    report.program_pulses += encoder.program_pulse_total();
    report.read_slots += encoder.read_slot_total();
  });

  // train
  std::vector<ClassTemplate> templates;
  detail::run_phase("train", report.phase_seconds, [&] {
    for (int c = 0; c < ds.class_count(); ++c) {
      std::vector<SdrVector> patterns;
      for (const int item : split.train_indices) {
        if (ds.items[static_cast<std::size_t>(item)].class_id == c) {
          patterns.push_back(encoded[static_cast<std::size_t>(item)]);
        }
      }
      templates.push_back(train_template(
          patterns, spec.config.htm.permanence_inc, spec.config.htm.permanence_dec,
          spec.config.htm.template_threshold, spec.backend, spec.config.preset, root, c));
      report.program_pulses += templates.back().program_pulses;
    }
  });

  // classify
  detail::run_phase("classify", report.phase_seconds, [&] {
    const int classes = ds.class_count();
    report.confusion.assign(static_cast<std::size_t>(classes),
                            std::vector<int>(static_cast<std::size_t>(classes), 0));
    int correct = 0;
    for (const int item : split.test_indices) {
      const int truth = ds.items[static_cast<std::size_t>(item)].class_id;
      const int predicted = classify(templates, encoded[static_cast<std::size_t>(item)]);
      ++report.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
      if (predicted == truth) ++correct;
    }
    report.per_class_accuracy.resize(static_cast<std::size_t>(classes), 0.0);
    for (int c = 0; c < classes; ++c) {
      int row_total = 0;
      for (int p = 0; p < classes; ++p) row_total += report.confusion[c][p];
      report.per_class_accuracy[static_cast<std::size_t>(c)] =
          row_total > 0 ? static_cast<double>(report.confusion[c][c]) / row_total : 0.0;
    }
    report.overall_accuracy = static_cast<double>(correct) / report.test_count;
  });

  report.counts.sp_blocks_1x4 = (report.sdr_bits + 3) / 4;
  report.counts.tm_cells_1x1 = static_cast<std::int64_t>(report.sdr_bits) * ds.class_count();
  report.counts.matcher_cells_1x1 = report.counts.tm_cells_1x1;
  report.cost = estimate_cost(report.counts, CostTable::analog_reference());
  return report;
}

// Canonical report document: keys sorted, two-space indent, trailing
// newline. No timing fields; see MetricsReport::phase_seconds.
inline nlohmann::json report_json(const MetricsReport& r, const ExperimentSpec& spec) {
  nlohmann::json j;
  j["accuracy"]["overall"] = r.overall_accuracy;
  j["accuracy"]["per_class"] = r.per_class_accuracy;
  j["backend"] = to_string(spec.backend);
  const DevicePreset& p = spec.config.preset;
  j["backend_parameters"] = {{"levels", p.levels},   {"p_switch", p.p_switch},
                             {"r_off", p.r_off},     {"r_on", p.r_on},
                             {"sigma_r", p.sigma_r}, {"t_set", p.t_set},
                             {"v_th", p.v_th}};
  j["backend_parameters"]["preset"] = spec.preset_name;
  j["confusion"] = r.confusion;
  j["cost"] = {{"area_um2", r.cost.area_um2},
               {"power_uw", r.cost.power_uw},
               {"matcher_cells_1x1", r.counts.matcher_cells_1x1},
               {"sp_blocks_1x4", r.counts.sp_blocks_1x4},
               {"tm_cells_1x1", r.counts.tm_cells_1x1}};
  j["dataset"] = {{"class_names", r.class_names},
                  {"classes", r.class_names.size()},
                  {"path", spec.dataset_dir.generic_string()},
                  {"test_count", r.test_count},
                  {"train_count", r.train_count}};
  j["device_activity"] = {{"program_pulses", r.program_pulses}, {"read_slots", r.read_slots}};
  const PipelineConfig& pc = spec.config.pipeline;
  j["encoder"] = {{"bits", r.sdr_bits},
                  {"block_size", pc.block_size},
                  {"iterations", pc.iterations},
                  {"region_cols", pc.region_cols},
                  {"region_rows", pc.region_rows},
                  {"weight_threshold", pc.weight_threshold}};
  j["sdr_density"] = {{"max", r.density_max}, {"mean", r.density_mean}, {"min", r.density_min}};
  j["seed"] = spec.seed;
  j["split"] = {{"test_fraction", spec.config.test_fraction},
                {"train_fraction", spec.config.train_fraction}};
  j["template"] = {{"rho_minus", spec.config.htm.permanence_dec},
                   {"rho_plus", spec.config.htm.permanence_inc},
                   {"threshold", spec.config.htm.template_threshold}};
  return j;
}

// Write the JSON report plus a confusion-matrix CSV next to it
// (<stem>.confusion.csv). Returns the exact report bytes.
inline std::string write_report(const MetricsReport& r, const ExperimentSpec& spec,
                                const std::filesystem::path& out_path) {
  const std::string body = report_json(r, spec).dump(2) + "\n";
  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error(out_path.string() + ": cannot write");
    out << body;
    if (!out) throw std::runtime_error(out_path.string() + ": write failed");
  }
  std::filesystem::path csv = out_path;
  csv.replace_extension();
  csv += ".confusion.csv";
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw std::runtime_error(csv.string() + ": cannot write");
  out << "class";
  for (const auto& name : r.class_names) out << ',' << name;
  out << '\n';
  for (std::size_t c = 0; c < r.confusion.size(); ++c) {
    out << r.class_names[c];
    for (const int n : r.confusion[c]) out << ',' << n;
    out << '\n';
  }
  if (!out) throw std::runtime_error(csv.string() + ": write failed");
  return body;
}

struct SweepAxis {
  std::string key;  // levels | sigma_r | p_switch
  std::vector<double> values;
};

// Cartesian sweep over device parameters; every grid point reruns the full
// experiment with the same seed and collects its headline numbers.
inline nlohmann::json sweep(const ExperimentSpec& base, const std::vector<SweepAxis>& axes) {
  if (axes.empty()) throw std::invalid_argument("sweep: at least one axis required");
  for (const auto& axis : axes) {
    if (axis.key != "levels" && axis.key != "sigma_r" && axis.key != "p_switch") {
      throw std::invalid_argument("sweep: unsupported key '" + axis.key +
                                  "' (expected levels, sigma_r, or p_switch)");
    }
    if (axis.values.empty()) {
      throw std::invalid_argument("sweep: axis '" + axis.key + "' has no values");
    }
  }

  nlohmann::json out;
  for (const auto& axis : axes) out["axes"][axis.key] = axis.values;
  out["backend"] = to_string(base.backend);
  out["seed"] = base.seed;
  out["points"] = nlohmann::json::array();

  std::vector<std::size_t> index(axes.size(), 0);
  for (;;) {
    ExperimentSpec spec = base;
    spec.out_path.clear();
    nlohmann::json params;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].values[index[a]];
      if (axes[a].key == "levels") {
        const int levels = static_cast<int>(v);
        if (static_cast<double>(levels) != v || levels < 0) {
          throw std::invalid_argument("sweep: levels values must be nonnegative integers");
        }
        spec.config.preset.levels = levels;
        params["levels"] = levels;
      } else if (axes[a].key == "sigma_r") {
        spec.config.preset.sigma_r = v;
        params["sigma_r"] = v;
      } else {
        spec.config.preset.p_switch = v;
        params["p_switch"] = v;
      }
    }
    spec.config.preset.validate();
    const MetricsReport r = run_experiment(spec);
    nlohmann::json point;
    point["accuracy"] = r.overall_accuracy;
    point["params"] = params;
    point["program_pulses"] = r.program_pulses;
    point["read_slots"] = r.read_slots;
    out["points"].push_back(std::move(point));

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++index[a] < axes[a].values.size()) break;
      index[a] = 0;
      if (a == 0) return out;
    }
  }
}

}  // namespace memhtm
