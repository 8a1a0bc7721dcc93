#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/memristor.hpp"
#include "memhtm/rng.hpp"

namespace memhtm {

// How the array is biased during reads. Selecting a single column grounds
// the unselected ones, which suppresses parasitic (sneak) paths at the cost
// of strictly sequential column reads; biasing all columns reads in one
// slot but leaves sneak paths open.
enum class AccessMode { single_column, all_columns };

// Grid of memristive devices with row voltage inputs and column current
// outputs. Reads never disturb device state: noise comes from the stream
// the caller passes in, so concurrent readers with their own streams see
// reproducible currents. The read-slot counter only tallies timing.
class CrossbarArray {
 public:
  CrossbarArray(int rows, int cols, const DevicePreset& preset,
                AccessMode mode = AccessMode::single_column, double v_read = 0.0)
      : rows_(rows),
        cols_(cols),
        mode_(mode),
        v_read_(v_read > 0.0 ? v_read : 0.5 * preset.v_th),
        slots_(std::make_unique<std::atomic<std::uint64_t>>(0)) {
    preset.validate();
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("CrossbarArray: empty shape");
    }
    if (v_read_ >= preset.v_th) {
      throw std::invalid_argument("CrossbarArray: read voltage must stay below v_th");
    }
    devices_.reserve(static_cast<std::size_t>(rows) * cols);
    for (int k = 0; k < rows * cols; ++k) devices_.emplace_back(preset);
  }

  // Program a weight matrix (row-major, values in [0, 1]) into the array.
  // Discrete devices walk to the nearest ladder level with verify-after-
  // write pulses from a per-device substream; continuous devices are set
  // exactly. Programming failures carry the device coordinates.
  static CrossbarArray map_weights(int rows, int cols, std::span<const double> weights,
                                   const DevicePreset& preset, const RngStream& base,
                                   AccessMode mode = AccessMode::single_column,
                                   double v_read = 0.0) {
    if (weights.size() != static_cast<std::size_t>(rows) * cols) {
      throw std::invalid_argument("CrossbarArray: weight matrix size mismatch");
    }
    CrossbarArray xbar(rows, cols, preset, mode, v_read);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double w = weights[static_cast<std::size_t>(r) * cols + c];
        if (!(w >= 0.0) || w > 1.0) {
          throw std::invalid_argument("CrossbarArray: weight outside [0, 1] at (" +
                                      std::to_string(r) + ", " + std::to_string(c) + ")");
        }
        MemristorDevice& dev = xbar.device(r, c);
        if (dev.continuous()) {
          dev.program_exact(w);
          continue;
        }
        const int target = static_cast<int>(std::lround(w * (preset.levels - 1)));
        RngStream rng = base.substream(stream_domain::programming,
                                       static_cast<std::uint64_t>(r) * cols + c);
        try {
          xbar.program_pulses_ += dev.program_to_level(target, rng);
        } catch (const ProgramError& e) {
          throw ProgramError(std::string(e.what()) + " at (" + std::to_string(r) + ", " +
                                 std::to_string(c) + ")",
                             r, c);
        }
      }
    }
    return xbar;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  AccessMode mode() const noexcept { return mode_; }
  double v_read() const noexcept { return v_read_; }
  std::uint64_t read_slot_count() const noexcept { return slots_->load(); }
  std::uint64_t program_pulse_count() const noexcept { return program_pulses_; }

  MemristorDevice& device(int row, int col) { return devices_[checked(row, col)]; }
  const MemristorDevice& device(int row, int col) const { return devices_[checked(row, col)]; }

  // Current out of one column under the given row voltages: the sum of the
  // per-device Ohmic currents, each with its own read-noise draw. Costs one
  // read slot.
  double read_column(int col, std::span<const double> v_in, RngStream& rng) const {
    if (col < 0 || col >= cols_) {
      throw std::out_of_range("CrossbarArray: column index out of range");
    }
    check_voltages(v_in);
    slots_->fetch_add(1, std::memory_order_relaxed);
    return column_current(col, v_in, rng);
  }

  // Matrix-vector product: every column current under one set of row
  // voltages. In single_column mode the columns are read strictly one per
  // slot; in all_columns mode the whole product takes a single slot.
  std::vector<double> matvec(std::span<const double> v_in, RngStream& rng) const {
    check_voltages(v_in);
    slots_->fetch_add(mode_ == AccessMode::single_column ? static_cast<std::uint64_t>(cols_) : 1,
                      std::memory_order_relaxed);
    std::vector<double> out(static_cast<std::size_t>(cols_), 0.0);
    for (int c = 0; c < cols_; ++c) {
      out[static_cast<std::size_t>(c)] = column_current(c, v_in, rng);
    }
    return out;
  }

  // Severity of the worst parasitic path when reading one device: the
  // three-device series detour (along the selected row, through another
  // row, back along the selected column) with the smallest total
  // resistance, expressed as the ratio of its current to the selected
  // device's current. Single-column biasing grounds the detours, so the
  // ratio is zero there. This is a bound estimate, not a nodal solve.
  double sneak_ratio(int row, int col) const {
    checked(row, col);
    if (mode_ == AccessMode::single_column) return 0.0;
    if (rows_ < 2 || cols_ < 2) {
      throw std::invalid_argument("CrossbarArray: sneak estimate needs at least 2x2");
    }
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows_; ++r) {
      if (r == row) continue;
      const double r_back = device(r, col).resistance();
      for (int c = 0; c < cols_; ++c) {
        if (c == col) continue;
        const double total =
            device(row, c).resistance() + device(r, c).resistance() + r_back;
        if (total < best) best = total;
      }
    }
    return device(row, col).resistance() / best;
  }

 private:
  std::size_t checked(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
      throw std::out_of_range("CrossbarArray: device index out of range");
    }
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  void check_voltages(std::span<const double> v_in) const {
    if (v_in.size() != static_cast<std::size_t>(rows_)) {
      throw std::invalid_argument("CrossbarArray: voltage vector length mismatch");
    }
    const double v_th = devices_.front().preset().v_th;
    for (double v : v_in) {
      if (!(std::abs(v) < v_th)) {
        throw std::invalid_argument("CrossbarArray: row voltage must stay below v_th");
      }
    }
  }

  double column_current(int col, std::span<const double> v_in, RngStream& rng) const {
    double i = 0.0;
    for (int r = 0; r < rows_; ++r) {
      i += devices_[static_cast<std::size_t>(r) * cols_ + col].read_current(
          v_in[static_cast<std::size_t>(r)], rng);
    }
    return i;
  }

  int rows_;
  int cols_;
  AccessMode mode_;
  double v_read_;
  std::vector<MemristorDevice> devices_;
  std::uint64_t program_pulses_ = 0;
  std::unique_ptr<std::atomic<std::uint64_t>> slots_;
};

}  // namespace memhtm
