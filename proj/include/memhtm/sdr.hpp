#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace memhtm {

// Sparse distributed representation: a flat binary vector plus the sparsity
// the producer was aiming for. The target density is carried as metadata;
// nothing here enforces it (the inhibition step does, where it applies).
class SdrVector {
 public:
  SdrVector() = default;

  explicit SdrVector(std::size_t size, double target_density = 1.0)
      : bits_(size, 0), target_density_(target_density) {}

  static SdrVector from_bits(std::vector<std::uint8_t> bits, double target_density = 1.0) {
    for (auto b : bits) {
      if (b > 1) throw std::invalid_argument("SdrVector: bits must be 0 or 1");
    }
    SdrVector s;
    s.bits_ = std::move(bits);
    s.target_density_ = target_density;
    return s;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  double target_density() const noexcept { return target_density_; }

  bool bit(std::size_t i) const { return bits_.at(i) != 0; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::size_t active_count() const noexcept {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
  }

  double density() const noexcept {
    return bits_.empty() ? 0.0 : static_cast<double>(active_count()) / static_cast<double>(bits_.size());
  }

  std::vector<int> active_indices() const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) idx.push_back(static_cast<int>(i));
    }
    return idx;
  }

  bool operator==(const SdrVector& o) const noexcept { return bits_ == o.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  double target_density_ = 1.0;
};

}  // namespace memhtm
