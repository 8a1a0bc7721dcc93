#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/config.hpp"
#include "memhtm/memristor.hpp"
#include "memhtm/pipeline.hpp"
#include "memhtm/temporal_memory.hpp"
#include "memhtm/topology.hpp"

namespace memhtm {

// Everything a single run needs, as read from one flat config file.
struct SimulationConfig {
  HtmConfig htm;
  Topology::Params topology;
  TmParams tm;  // columns filled in from the topology at the point of use
  DevicePreset preset;
  PipelineConfig pipeline;
  double train_fraction = 0.5;
  double test_fraction = -1.0;  // negative: remainder of the split

  void validate() const {
    htm.validate();
    preset.validate();
    pipeline.validate();
    if (tm.cells_per_column < 1 || tm.segments_per_cell < 1) {
      throw std::invalid_argument("config: cells_per_column and segments_per_cell must be >= 1");
    }
    if (!(tm.synapse_fraction > 0.0) || tm.synapse_fraction > 1.0) {
      throw std::invalid_argument("config: synapse_fraction must be in (0, 1]");
    }
    if (!(train_fraction > 0.0) || train_fraction > 1.0) {
      throw std::invalid_argument("config: train_fraction must be in (0, 1]");
    }
    if (test_fraction >= 0.0 && train_fraction + test_fraction > 1.0 + 1e-12) {
      throw std::invalid_argument("config: train_fraction + test_fraction must not exceed 1");
    }
  }
};

namespace detail {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

[[noreturn]] inline void config_error(const std::string& source, int line,
                                      const std::string& what) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Syntax pass: key = value lines, '#' comments, duplicate keys rejected.
inline std::vector<ConfigEntry> parse_key_values(const std::string& text,
                                                 const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (first) {
      first = false;
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
    }
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) config_error(source, line_no, "expected 'key = value'");
    ConfigEntry entry;
    entry.key = trim(stripped.substr(0, eq));
    entry.value = trim(stripped.substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) config_error(source, line_no, "empty key");
    if (entry.value.empty()) config_error(source, line_no, "empty value for '" + entry.key + "'");
    if (const auto [it, inserted] = seen.emplace(entry.key, line_no); !inserted) {
      config_error(source, line_no,
                   "duplicate key '" + entry.key + "' (first at line " +
                       std::to_string(it->second) + ")");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

inline double entry_real(const ConfigEntry& e, const std::string& source) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    config_error(source, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
}

inline long long entry_int(const ConfigEntry& e, const std::string& source) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    config_error(source, e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  }
}

}  // namespace detail

// Parse a flat UTF-8 key/value config. Keys carry the model's own symbol
// names; unknown keys, duplicates, and malformed values are errors that
// name the source and line. Values overlay the defaults in `base`.
inline SimulationConfig parse_simulation_config(const std::string& text,
                                                const std::string& source,
                                                SimulationConfig base = {}) {
  using detail::entry_int;
  using detail::entry_real;
  SimulationConfig cfg = std::move(base);
  for (const auto& e : detail::parse_key_values(text, source)) {
    // pooler and sequence-memory scalars
    if (e.key == "θ_c") {
      cfg.htm.connected_threshold = entry_real(e, source);
    } else if (e.key == "θ_s") {
      cfg.htm.stimulus_threshold = entry_real(e, source);
    } else if (e.key == "s") {
      cfg.htm.target_density = entry_real(e, source);
    } else if (e.key == "ρ_plus") {
      cfg.htm.permanence_inc = entry_real(e, source);
    } else if (e.key == "ρ_minus") {
      cfg.htm.permanence_dec = entry_real(e, source);
    } else if (e.key == "T") {
      cfg.htm.activity_window = static_cast<int>(entry_int(e, source));
    } else if (e.key == "η") {
      cfg.htm.boost_strength = entry_real(e, source);
    } else if (e.key == "θ_seg") {
      cfg.htm.segment_threshold = static_cast<int>(entry_int(e, source));
    } else if (e.key == "s1") {
      cfg.htm.tm_winner_fraction = entry_real(e, source);
    } else if (e.key == "ρ̃_minus") {
      cfg.htm.segment_decay = entry_real(e, source);
    } else if (e.key == "γ_tm") {
      cfg.htm.template_threshold = entry_real(e, source);
      // topology
    } else if (e.key == "input_width") {
      cfg.topology.input_width = static_cast<int>(entry_int(e, source));
    } else if (e.key == "input_height") {
      cfg.topology.input_height = static_cast<int>(entry_int(e, source));
    } else if (e.key == "column_count") {
      cfg.topology.column_count = static_cast<int>(entry_int(e, source));
    } else if (e.key == "hypercube_edge") {
      cfg.topology.hypercube_edge = entry_real(e, source);
    } else if (e.key == "potential_fraction") {
      cfg.topology.potential_fraction = entry_real(e, source);
    } else if (e.key == "inhibition_radius") {
      cfg.topology.inhibition_radius = entry_real(e, source);
      // sequence-memory shape
    } else if (e.key == "cells_per_column") {
      cfg.tm.cells_per_column = static_cast<int>(entry_int(e, source));
    } else if (e.key == "segments_per_cell") {
      cfg.tm.segments_per_cell = static_cast<int>(entry_int(e, source));
    } else if (e.key == "synapse_fraction") {
      cfg.tm.synapse_fraction = entry_real(e, source);
      // device preset
    } else if (e.key == "r_on") {
      cfg.preset.r_on = entry_real(e, source);
    } else if (e.key == "r_off") {
      cfg.preset.r_off = entry_real(e, source);
    } else if (e.key == "levels") {
      cfg.preset.levels = static_cast<int>(entry_int(e, source));
    } else if (e.key == "v_th") {
      cfg.preset.v_th = entry_real(e, source);
    } else if (e.key == "t_set") {
      cfg.preset.t_set = entry_real(e, source);
    } else if (e.key == "p_switch") {
      cfg.preset.p_switch = entry_real(e, source);
    } else if (e.key == "sigma_r") {
      cfg.preset.sigma_r = entry_real(e, source);
      // encoder geometry
    } else if (e.key == "block_size") {
      cfg.pipeline.block_size = static_cast<int>(entry_int(e, source));
    } else if (e.key == "iterations") {
      cfg.pipeline.iterations = static_cast<int>(entry_int(e, source));
    } else if (e.key == "region_rows") {
      cfg.pipeline.region_rows = static_cast<int>(entry_int(e, source));
    } else if (e.key == "region_cols") {
      cfg.pipeline.region_cols = static_cast<int>(entry_int(e, source));
    } else if (e.key == "weight_threshold") {
      cfg.pipeline.weight_threshold = entry_real(e, source);
      // experiment split
    } else if (e.key == "train_fraction") {
      cfg.train_fraction = entry_real(e, source);
    } else if (e.key == "test_fraction") {
      cfg.test_fraction = entry_real(e, source);
    } else {
      detail::config_error(source, e.line, "unknown key '" + e.key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline SimulationConfig load_simulation_config(const std::filesystem::path& file,
                                               SimulationConfig base = {}) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error(file.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_simulation_config(buf.str(), file.string(), std::move(base));
}

}  // namespace memhtm
