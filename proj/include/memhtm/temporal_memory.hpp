#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "memhtm/config.hpp"
#include "memhtm/rng.hpp"
#include "memhtm/sdr.hpp"

namespace memhtm {

// Binary state over a layer of cells: cells_per_column rows by columns.
class CellMatrix {
 public:
  CellMatrix() = default;

  CellMatrix(int cells_per_column, int columns)
      : cells_(cells_per_column), cols_(columns) {
    if (cells_per_column < 1 || columns < 1) {
      throw std::invalid_argument("CellMatrix: empty shape");
    }
    bits_.assign(static_cast<std::size_t>(cells_) * cols_, 0);
  }

  int cells_per_column() const noexcept { return cells_; }
  int columns() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool get(int cell, int column) const { return bits_[checked(cell, column)] != 0; }
  void set(int cell, int column, bool v) { bits_[checked(cell, column)] = v ? 1 : 0; }

  int column_sum(int column) const {
    int s = 0;
    for (int c = 0; c < cells_; ++c) s += bits_[checked(c, column)];
    return s;
  }

  int active_count() const noexcept {
    int s = 0;
    for (auto b : bits_) s += b;
    return s;
  }

  const std::vector<std::uint8_t>& raw() const noexcept { return bits_; }
  bool operator==(const CellMatrix& o) const noexcept {
    return cells_ == o.cells_ && cols_ == o.cols_ && bits_ == o.bits_;
  }

 private:
  std::size_t checked(int cell, int column) const {
    if (cell < 0 || cell >= cells_ || column < 0 || column >= cols_) {
      throw std::out_of_range("CellMatrix: index out of range");
    }
    return static_cast<std::size_t>(cell) * cols_ + column;
  }

  int cells_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// One lateral dendrite segment: a permanence per presynaptic cell, laid out
// like the cell matrix. Zero means no synapse; positive permanences are the
// segment's potential synapses and may strengthen, weaken, or touch zero
// and drop out of the positive mask for good.
struct DendriteSegment {
  std::vector<double> permanence;
};

// Segment storage per cell.
class SegmentSet {
 public:
  SegmentSet(int cells_per_column, int columns)
      : cells_(cells_per_column), cols_(columns) {
    if (cells_per_column < 1 || columns < 1) {
      throw std::invalid_argument("SegmentSet: empty shape");
    }
    segments_.resize(static_cast<std::size_t>(cells_) * cols_);
  }

  // Random initialization: every cell gets the same number of segments, and
  // each segment draws a potential synapse onto each presynaptic cell with
  // the given probability, permanence uniform in [0, 1). Per-cell
  // substreams keep the draw order schedule-independent.
  static SegmentSet init_random(int cells_per_column, int columns, int segments_per_cell,
                                double synapse_fraction, const RngStream& base) {
    if (segments_per_cell < 0) {
      throw std::invalid_argument("SegmentSet: segments_per_cell must be >= 0");
    }
    if (!(synapse_fraction >= 0.0) || synapse_fraction > 1.0) {
      throw std::invalid_argument("SegmentSet: synapse_fraction must be in [0, 1]");
    }
    SegmentSet set(cells_per_column, columns);
    const std::size_t presynaptic = set.segments_.size();
    for (std::size_t cell = 0; cell < set.segments_.size(); ++cell) {
      RngStream rng = base.substream(stream_domain::segments, cell);
      for (int d = 0; d < segments_per_cell; ++d) {
        DendriteSegment seg;
        seg.permanence.assign(presynaptic, 0.0);
        for (std::size_t k = 0; k < presynaptic; ++k) {
          if (rng.uniform() < synapse_fraction) {
            seg.permanence[k] = rng.uniform();
          }
        }
        set.segments_[cell].push_back(std::move(seg));
      }
    }
    return set;
  }

  int cells_per_column() const noexcept { return cells_; }
  int columns() const noexcept { return cols_; }

  int segment_count(int cell, int column) const {
    return static_cast<int>(segments_[checked(cell, column)].size());
  }

  DendriteSegment& segment(int cell, int column, int d) {
    return segments_[checked(cell, column)].at(static_cast<std::size_t>(d));
  }
  const DendriteSegment& segment(int cell, int column, int d) const {
    return segments_[checked(cell, column)].at(static_cast<std::size_t>(d));
  }

  void add_segment(int cell, int column, DendriteSegment seg) {
    if (seg.permanence.size() != static_cast<std::size_t>(cells_) * cols_) {
      throw std::invalid_argument("SegmentSet: segment size mismatch");
    }
    for (double p : seg.permanence) {
      if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("SegmentSet: permanence outside [0, 1]");
      }
    }
    segments_[checked(cell, column)].push_back(std::move(seg));
  }

  std::size_t flat_index(int cell, int column) const { return checked(cell, column); }

 private:
  std::size_t checked(int cell, int column) const {
    if (cell < 0 || cell >= cells_ || column < 0 || column >= cols_) {
      throw std::out_of_range("SegmentSet: index out of range");
    }
    return static_cast<std::size_t>(cell) * cols_ + column;
  }

  int cells_ = 0;
  int cols_ = 0;
  std::vector<std::vector<DendriteSegment>> segments_;
};

// Connected-synapse overlap of one segment with an activation pattern.
inline int segment_overlap(const DendriteSegment& seg, const CellMatrix& active,
                           double connected_threshold) {
  if (seg.permanence.size() != active.size()) {
    throw std::invalid_argument("segment_overlap: shape mismatch");
  }
  int count = 0;
  const auto& bits = active.raw();
  for (std::size_t k = 0; k < seg.permanence.size(); ++k) {
    if (bits[k] && seg.permanence[k] >= connected_threshold) ++count;
  }
  return count;
}

// A cell turns predictive when any of its segments has a connected overlap
// with the current activation strictly above the segment threshold.
inline CellMatrix predictive_state(const SegmentSet& segments, const CellMatrix& active,
                                   double connected_threshold, int segment_threshold) {
  if (segments.cells_per_column() != active.cells_per_column() ||
      segments.columns() != active.columns()) {
    throw std::invalid_argument("predictive_state: shape mismatch");
  }
  CellMatrix predictive(active.cells_per_column(), active.columns());
  for (int column = 0; column < active.columns(); ++column) {
    for (int cell = 0; cell < active.cells_per_column(); ++cell) {
      for (int d = 0; d < segments.segment_count(cell, column); ++d) {
        if (segment_overlap(segments.segment(cell, column, d), active, connected_threshold) >
            segment_threshold) {
          predictive.set(cell, column, true);
          break;
        }
      }
    }
  }
  return predictive;
}

// Winning columns handed over by the pooler.
inline std::vector<int> winners_from_sp(const SdrVector& sp_active) {
  return sp_active.active_indices();
}

// Cell activation for a step: in every winning column, previously predicted
// cells fire; a winning column with no prediction bursts all of its cells.
// Non-winning columns stay silent.
inline CellMatrix active_state(const std::vector<int>& winners, const CellMatrix& predictive_prev,
                               int cells_per_column, int columns) {
  if (predictive_prev.cells_per_column() != cells_per_column ||
      predictive_prev.columns() != columns) {
    throw std::invalid_argument("active_state: shape mismatch");
  }
  CellMatrix active(cells_per_column, columns);
  for (int column : winners) {
    if (column < 0 || column >= columns) {
      throw std::out_of_range("active_state: winner column out of range");
    }
    if (predictive_prev.column_sum(column) == 0) {
      for (int cell = 0; cell < cells_per_column; ++cell) active.set(cell, column, true);
    } else {
      for (int cell = 0; cell < cells_per_column; ++cell) {
        if (predictive_prev.get(cell, column)) active.set(cell, column, true);
      }
    }
  }
  return active;
}

// Hebbian reinforcement for cells whose prediction came true: every segment
// of a cell that was predictive last step and is active now moves its
// positive synapses toward the previous activation (up where the source
// cell was active, down where it was not), clamped to [0, 1]. Segments of
// all other cells are untouched.
inline void reinforce(SegmentSet& segments, const CellMatrix& predictive_prev,
                      const CellMatrix& active_now, const CellMatrix& active_prev,
                      double inc, double dec) {
  if (segments.cells_per_column() != active_now.cells_per_column() ||
      segments.columns() != active_now.columns()) {
    throw std::invalid_argument("reinforce: shape mismatch");
  }
  const auto& prev = active_prev.raw();
  for (int column = 0; column < segments.columns(); ++column) {
    for (int cell = 0; cell < segments.cells_per_column(); ++cell) {
      if (!(predictive_prev.get(cell, column) && active_now.get(cell, column))) continue;
      for (int d = 0; d < segments.segment_count(cell, column); ++d) {
        DendriteSegment& seg = segments.segment(cell, column, d);
        for (std::size_t k = 0; k < seg.permanence.size(); ++k) {
          if (seg.permanence[k] <= 0.0) continue;
          const double delta = prev[k] ? inc : -dec;
          seg.permanence[k] = std::clamp(seg.permanence[k] + delta, 0.0, 1.0);
        }
      }
    }
  }
}

// Slow decay for wrong predictions: a segment whose connected overlap with
// the previous activation exceeded the threshold, on a cell that stayed
// inactive this step, has its positive synapses reduced (clamped at zero).
inline void decay(SegmentSet& segments, const CellMatrix& active_now,
                  const CellMatrix& active_prev, double connected_threshold,
                  int segment_threshold, double decay_step) {
  if (segments.cells_per_column() != active_now.cells_per_column() ||
      segments.columns() != active_now.columns()) {
    throw std::invalid_argument("decay: shape mismatch");
  }
  for (int column = 0; column < segments.columns(); ++column) {
    for (int cell = 0; cell < segments.cells_per_column(); ++cell) {
      if (active_now.get(cell, column)) continue;
      for (int d = 0; d < segments.segment_count(cell, column); ++d) {
        DendriteSegment& seg = segments.segment(cell, column, d);
        if (segment_overlap(seg, active_prev, connected_threshold) <= segment_threshold) continue;
        for (double& p : seg.permanence) {
          if (p > 0.0) p = std::max(0.0, p - decay_step);
        }
      }
    }
  }
}

struct TmParams {
  int columns = 0;
  int cells_per_column = 1;
  int segments_per_cell = 1;
  double synapse_fraction = 0.5;
};

// Sequence memory over a fixed cell layer. One step consumes the pooler's
// winner set: activation resolves predictions (or bursts), correct
// predictions reinforce, wrong ones decay, and the predictive state is
// recomputed from the updated segments.
class TemporalMemory {
 public:
  TemporalMemory(const TmParams& params, const HtmConfig& config, const RngStream& base)
      : params_(params),
        config_(config),
        segments_(SegmentSet::init_random(params.cells_per_column, params.columns,
                                          params.segments_per_cell, params.synapse_fraction,
                                          base)),
        active_(params.cells_per_column, params.columns),
        predictive_(params.cells_per_column, params.columns),
        active_prev_(params.cells_per_column, params.columns),
        predictive_prev_(params.cells_per_column, params.columns) {
    config.validate();
  }

  void step(const SdrVector& sp_active, bool learn = true) {
    if (static_cast<int>(sp_active.size()) != params_.columns) {
      throw std::invalid_argument("TemporalMemory: winner vector length mismatch");
    }
    const std::vector<int> winners = winners_from_sp(sp_active);
    active_prev_ = active_;
    predictive_prev_ = predictive_;

    active_ = active_state(winners, predictive_prev_, params_.cells_per_column, params_.columns);
    last_burst_ = 0;
    for (int column : winners) {
      if (predictive_prev_.column_sum(column) == 0) ++last_burst_;
    }

    if (learn) {
      reinforce(segments_, predictive_prev_, active_, active_prev_, config_.permanence_inc,
                config_.permanence_dec);
      decay(segments_, active_, active_prev_, config_.connected_threshold,
            config_.segment_threshold, config_.segment_decay);
    }
    predictive_ = predictive_state(segments_, active_, config_.connected_threshold,
                                   config_.segment_threshold);
  }

  const TmParams& params() const noexcept { return params_; }
  const SegmentSet& segments() const noexcept { return segments_; }
  SegmentSet& segments() noexcept { return segments_; }
  const CellMatrix& active() const noexcept { return active_; }
  const CellMatrix& predictive() const noexcept { return predictive_; }
  const CellMatrix& active_prev() const noexcept { return active_prev_; }
  const CellMatrix& predictive_prev() const noexcept { return predictive_prev_; }
  int last_burst_count() const noexcept { return last_burst_; }

 private:
  TmParams params_;
  HtmConfig config_;
  SegmentSet segments_;
  CellMatrix active_;
  CellMatrix predictive_;
  CellMatrix active_prev_;
  CellMatrix predictive_prev_;
  int last_burst_ = 0;
};

}  // namespace memhtm
