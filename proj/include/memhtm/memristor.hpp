#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/rng.hpp"

namespace memhtm {

// Read-noise amplitude of the noisy built-in preset, fixed by a Monte Carlo
// sweep against three requirements at once: a 4-branch 256-level memory
// cell keeps its mean recall error within a tenth of the value range (it
// measures ~1.2%), packing 1024 levels into the same cell measures strictly
// worse (the wider digit radix amplifies read noise faster than the finer
// ladder helps), and the noisy block encoder disagrees with the exact
// backend on under 2% of output bits. The last bound binds: ~0.05 breaches
// it while the cell-side budget would tolerate far more.
inline constexpr double kCalibratedReadNoise = 0.035;

// Device parameter set. `levels` counts the programmable conductance
// states; zero selects the continuous (idealized) device that can hold any
// conductance in range exactly.
struct DevicePreset {
  double r_on = 1e3;     // ohms, lowest programmable resistance
  double r_off = 1e5;    // ohms, highest programmable resistance
  int levels = 256;      // conductance states; 0 = continuous
  double v_th = 1.0;     // volts, switching threshold
  double t_set = 1e-6;   // seconds, minimum pulse duration that can switch
  double p_switch = 1.0; // probability a valid pulse actually moves the state
  double sigma_r = 0.0;  // relative read-noise standard deviation

  double g_min() const noexcept { return 1.0 / r_off; }
  double g_max() const noexcept { return 1.0 / r_on; }

  void validate() const {
    require(r_on > 0.0 && r_off > 0.0 && r_on < r_off, "requires 0 < r_on < r_off");
    require(levels == 0 || levels >= 2, "levels must be 0 (continuous) or >= 2");
    require(v_th > 0.0, "v_th must be > 0");
    require(t_set > 0.0, "t_set must be > 0");
    require(p_switch > 0.0 && p_switch <= 1.0, "p_switch must be in (0, 1]");
    require(sigma_r >= 0.0 && std::isfinite(sigma_r), "sigma_r must be >= 0");
  }

  static DevicePreset ideal() {
    DevicePreset p;
    p.levels = 0;
    p.p_switch = 1.0;
    p.sigma_r = 0.0;
    return p;
  }

  static DevicePreset memristive() {
    DevicePreset p;
    p.levels = 256;
    p.p_switch = 0.95;
    p.sigma_r = kCalibratedReadNoise;
    return p;
  }

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("DevicePreset: ") + what);
  }
};

// Raised when a device refuses to reach its programming target within the
// pulse budget. Crossbars annotate it with the device coordinates.
struct ProgramError : std::runtime_error {
  explicit ProgramError(const std::string& what, int row_ = -1, int col_ = -1)
      : std::runtime_error(what), row(row_), col(col_) {}
  int row;
  int col;
};

// Behavioral two-terminal device. The conductance ladder is uniform between
// g_min and g_max and monotone in the state index. Programming moves one
// level per sufficient pulse, stochastically; reads are non-destructive and
// carry multiplicative Gaussian noise.
class MemristorDevice {
 public:
  explicit MemristorDevice(const DevicePreset& preset) : preset_(preset) {
    preset.validate();
  }

  const DevicePreset& preset() const noexcept { return preset_; }
  bool continuous() const noexcept { return preset_.levels == 0; }
  int level_count() const noexcept { return preset_.levels; }

  int level() const {
    if (continuous()) throw std::logic_error("MemristorDevice: continuous device has no level index");
    return level_;
  }

  // State mapped to [0, 1].
  double weight() const noexcept {
    if (continuous()) return exact_;
    return preset_.levels == 1 ? 0.0
                               : static_cast<double>(level_) / (preset_.levels - 1);
  }

  double conductance() const noexcept {
    return preset_.g_min() + weight() * (preset_.g_max() - preset_.g_min());
  }

  double resistance() const noexcept { return 1.0 / conductance(); }

  // One programming pulse. Pulses at or below the switching threshold, or
  // shorter than the set time, never disturb the state and consume no
  // randomness. A valid pulse moves the state one level toward the voltage
  // sign (positive raises conductance) with probability p_switch,
  // saturating at the ends of the ladder.
  void program_pulse(double volts, double dt_seconds, RngStream& rng) {
    if (continuous()) {
      throw std::logic_error("MemristorDevice: pulse programming needs a discrete ladder");
    }
    if (std::abs(volts) <= preset_.v_th || dt_seconds < preset_.t_set) return;
    if (rng.uniform() < preset_.p_switch) {
      if (volts > 0.0) {
        if (level_ < preset_.levels - 1) ++level_;
      } else {
        if (level_ > 0) --level_;
      }
    }
  }

  // Program-and-verify walk to a target level. Returns the number of pulses
  // issued; throws ProgramError when the budget runs out (budget 0 picks a
  // generous default scaled by the distance and switching probability).
  int program_to_level(int target, RngStream& rng, int max_pulses = 0) {
    if (continuous()) {
      throw std::logic_error("MemristorDevice: pulse programming needs a discrete ladder");
    }
    if (target < 0 || target >= preset_.levels) {
      throw std::invalid_argument("MemristorDevice: target level out of range");
    }
    if (max_pulses <= 0) {
      const double distance = std::abs(target - level_);
      max_pulses = 64 + static_cast<int>(std::ceil(20.0 * distance / preset_.p_switch));
    }
    const double write_v = 2.0 * preset_.v_th;
    int pulses = 0;
    while (level_ != target) {
      if (pulses >= max_pulses) {
        throw ProgramError("MemristorDevice: pulse budget of " + std::to_string(max_pulses) +
                           " exhausted before reaching level " + std::to_string(target));
      }
      program_pulse(target > level_ ? write_v : -write_v, preset_.t_set, rng);
      ++pulses;
    }
    return pulses;
  }

  // Continuous devices are set directly; the state is exact.
  void program_exact(double weight) {
    if (!continuous()) {
      throw std::logic_error("MemristorDevice: exact programming needs a continuous device");
    }
    if (weight < 0.0 || weight > 1.0 || !std::isfinite(weight)) {
      throw std::invalid_argument("MemristorDevice: weight outside [0, 1]");
    }
    exact_ = weight;
  }

  // Non-destructive read at a sub-threshold voltage. The returned current is
  // Ohmic with a multiplicative Gaussian disturbance of relative width
  // sigma_r; zero noise consumes no randomness.
  double read_current(double v_read, RngStream& rng) const {
    if (std::abs(v_read) >= preset_.v_th) {
      throw std::invalid_argument("MemristorDevice: read voltage must stay below v_th");
    }
    double i = v_read * conductance();
    if (preset_.sigma_r > 0.0) {
      i *= 1.0 + preset_.sigma_r * rng.gaussian();
    }
    return i;
  }

 private:
  DevicePreset preset_;
  int level_ = 0;
  double exact_ = 0.0;
};

// Analog memory cell built from a few parallel branches with pairwise
// distinct weights. A stored value is quantized to the effective level
// count, split into base-B digits (B chosen as the smallest radix whose
// power covers the levels), and each digit is programmed into one branch
// device. Recall reads every branch, estimates its digit from the noisy
// current, and recombines with the branch weights, so read noise on the
// high-weight branches dominates the recall error.
class MemoryCell {
 public:
  MemoryCell(const DevicePreset& preset, int branch_count = 4, int effective_levels = 256) {
    preset.validate();
    if (branch_count != 3 && branch_count != 4) {
      throw std::invalid_argument("MemoryCell: branch count must be 3 or 4");
    }
    if (effective_levels < 2) {
      throw std::invalid_argument("MemoryCell: effective levels must be >= 2");
    }
    if (preset.levels == 0) {
      throw std::invalid_argument("MemoryCell: cell branches need a discrete ladder");
    }
    effective_levels_ = effective_levels;
    digit_base_ = 2;
    while (pow_int(digit_base_, branch_count) < static_cast<long long>(effective_levels)) {
      ++digit_base_;
    }
    DevicePreset branch = preset;
    branch.levels = digit_base_;
    double place = 1.0;
    for (int b = 0; b < branch_count; ++b) {
      branches_.emplace_back(branch);
      place_.push_back(place);
      place *= static_cast<double>(digit_base_);
    }
  }

  int branch_count() const noexcept { return static_cast<int>(branches_.size()); }
  int effective_levels() const noexcept { return effective_levels_; }
  int digit_base() const noexcept { return digit_base_; }
  double branch_weight(int b) const { return place_.at(static_cast<std::size_t>(b)); }
  const MemristorDevice& branch(int b) const { return branches_.at(static_cast<std::size_t>(b)); }

  // Quantize to the nearest cell level and program the branch digits.
  // Returns the total pulse count.
  int store(double value, RngStream& rng) {
    if (value < 0.0 || value > 1.0 || !std::isfinite(value)) {
      throw std::invalid_argument("MemoryCell: value outside [0, 1]");
    }
    long long k = llround_value(value);
    int pulses = 0;
    for (auto& dev : branches_) {
      const int digit = static_cast<int>(k % digit_base_);
      k /= digit_base_;
      pulses += dev.program_to_level(digit, rng);
    }
    return pulses;
  }

  // Noisy analog recall in [0, 1]: per-branch digit estimates from the read
  // currents, recombined by branch weight.
  double recall(RngStream& rng) const {
    const DevicePreset& p = branches_.front().preset();
    const double v_read = 0.5 * p.v_th;
    const double dg = p.g_max() - p.g_min();
    double sum = 0.0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
      const double g_hat = branches_[b].read_current(v_read, rng) / v_read;
      const double digit = (g_hat - p.g_min()) / dg * static_cast<double>(digit_base_ - 1);
      sum += place_[b] * digit;
    }
    const double value = sum / static_cast<double>(effective_levels_ - 1);
    return std::clamp(value, 0.0, 1.0);
  }

  // Noise-free decode of the currently programmed digits.
  double stored_value() const {
    double sum = 0.0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
      sum += place_[b] * static_cast<double>(branches_[b].level());
    }
    return sum / static_cast<double>(effective_levels_ - 1);
  }

 private:
  long long llround_value(double value) const noexcept {
    return std::llround(value * static_cast<double>(effective_levels_ - 1));
  }

  static long long pow_int(int base, int exp) noexcept {
    long long v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
  }

  std::vector<MemristorDevice> branches_;
  std::vector<double> place_;
  int digit_base_ = 2;
  int effective_levels_ = 2;
};

}  // namespace memhtm
