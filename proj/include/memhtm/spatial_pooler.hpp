#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/config.hpp"
#include "memhtm/rng.hpp"
#include "memhtm/sdr.hpp"
#include "memhtm/topology.hpp"

namespace memhtm {

// Potential synapse pools, one ascending input-index list per column.
struct PotentialMap {
  std::vector<std::vector<int>> columns;

  int column_count() const noexcept { return static_cast<int>(columns.size()); }
};

// Sample the potential pool of every column: an input joins when it lies in
// the column's receptive box and an independent uniform draw clears the
// potential fraction. Each column draws from its own substream, so the map
// is the same no matter how columns are distributed over threads.
inline PotentialMap init_potential(const Topology& topo, const RngStream& base) {
  PotentialMap map;
  map.columns.resize(topo.column_count());
  for (int i = 0; i < topo.column_count(); ++i) {
    RngStream rng = base.substream(stream_domain::potential, static_cast<std::uint64_t>(i));
    for (int j : topo.hypercube_inputs(i)) {
      if (rng.uniform() < topo.potential_fraction()) {
        map.columns[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  return map;
}

// Dense permanence matrix over columns x inputs. Entries off the potential
// pool are pinned at zero. A synapse is connected when it is potential and
// its permanence is at or above the connected threshold; the mask is kept
// in step with every mutation.
class PermanenceMatrix {
 public:
  PermanenceMatrix(int columns, int inputs, double connected_threshold)
      : columns_(columns), inputs_(inputs), threshold_(connected_threshold) {
    if (columns < 1 || inputs < 1) {
      throw std::invalid_argument("PermanenceMatrix: empty shape");
    }
    perm_.assign(static_cast<std::size_t>(columns) * inputs, 0.0);
    potential_.assign(perm_.size(), 0);
    connected_.assign(perm_.size(), 0);
    pools_.resize(static_cast<std::size_t>(columns));
  }

  static PermanenceMatrix init_random(const PotentialMap& potential, int inputs,
                                      double connected_threshold, const RngStream& base) {
    PermanenceMatrix m(potential.column_count(), inputs, connected_threshold);
    for (int i = 0; i < m.columns_; ++i) {
      RngStream rng = base.substream(stream_domain::permanence, static_cast<std::uint64_t>(i));
      for (int j : potential.columns[static_cast<std::size_t>(i)]) {
        if (j < 0 || j >= inputs) {
          throw std::out_of_range("PermanenceMatrix: potential input out of range");
        }
        m.pools_[static_cast<std::size_t>(i)].push_back(j);
        m.potential_[m.at(i, j)] = 1;
        m.perm_[m.at(i, j)] = rng.uniform();
      }
      m.refresh_connected(i);
    }
    return m;
  }

  // Explicit construction for small hand-built fixtures. Non-potential
  // entries must be zero.
  static PermanenceMatrix from_dense(int columns, int inputs,
                                     const std::vector<double>& perms,
                                     const std::vector<std::uint8_t>& potential,
                                     double connected_threshold) {
    if (perms.size() != static_cast<std::size_t>(columns) * inputs ||
        potential.size() != perms.size()) {
      throw std::invalid_argument("PermanenceMatrix: dense size mismatch");
    }
    PermanenceMatrix m(columns, inputs, connected_threshold);
    for (int i = 0; i < columns; ++i) {
      for (int j = 0; j < inputs; ++j) {
        const std::size_t k = m.at(i, j);
        if (potential[k]) {
          m.pools_[static_cast<std::size_t>(i)].push_back(j);
          m.potential_[k] = 1;
          if (perms[k] < 0.0 || perms[k] > 1.0) {
            throw std::invalid_argument("PermanenceMatrix: permanence outside [0, 1]");
          }
          m.perm_[k] = perms[k];
        } else if (perms[k] != 0.0) {
          throw std::invalid_argument("PermanenceMatrix: nonzero permanence off the potential pool");
        }
      }
      m.refresh_connected(i);
    }
    return m;
  }

  int columns() const noexcept { return columns_; }
  int inputs() const noexcept { return inputs_; }
  double connected_threshold() const noexcept { return threshold_; }

  double permanence(int column, int input) const { return perm_[checked(column, input)]; }
  bool is_potential(int column, int input) const { return potential_[checked(column, input)] != 0; }
  bool is_connected(int column, int input) const { return connected_[checked(column, input)] != 0; }

  const std::vector<int>& potential_pool(int column) const {
    return pools_.at(static_cast<std::size_t>(column));
  }

  void set_permanence(int column, int input, double v) {
    const std::size_t k = checked(column, input);
    if (!potential_[k]) {
      throw std::invalid_argument("PermanenceMatrix: cannot set a non-potential synapse");
    }
    if (v < 0.0 || v > 1.0) {
      throw std::invalid_argument("PermanenceMatrix: permanence outside [0, 1]");
    }
    perm_[k] = v;
    connected_[k] = v >= threshold_ ? 1 : 0;
  }

  // Hebbian update restricted to the winning columns' potential synapses:
  // synapses on active inputs move up, the rest move down, clamped to [0, 1].
  void learn(const SdrVector& input, const SdrVector& active_columns, double inc, double dec) {
    if (static_cast<int>(input.size()) != inputs_) {
      throw std::invalid_argument("PermanenceMatrix: input length mismatch");
    }
    if (static_cast<int>(active_columns.size()) != columns_) {
      throw std::invalid_argument("PermanenceMatrix: active vector length mismatch");
    }
    for (int i = 0; i < columns_; ++i) {
      if (!active_columns.bit(static_cast<std::size_t>(i))) continue;
      for (int j : pools_[static_cast<std::size_t>(i)]) {
        const std::size_t k = at(i, j);
        double v = perm_[k] + (input.bit(static_cast<std::size_t>(j)) ? inc : -dec);
        perm_[k] = std::clamp(v, 0.0, 1.0);
      }
      refresh_connected(i);
    }
  }

  // Connected-synapse overlap with a binary input, one value per column.
  std::vector<double> raw_overlap(const SdrVector& input) const {
    if (static_cast<int>(input.size()) != inputs_) {
      throw std::invalid_argument("PermanenceMatrix: input length mismatch");
    }
    std::vector<double> o(static_cast<std::size_t>(columns_), 0.0);
    for (int i = 0; i < columns_; ++i) {
      double sum = 0.0;
      for (int j : pools_[static_cast<std::size_t>(i)]) {
        if (connected_[at(i, j)] && input.bit(static_cast<std::size_t>(j))) sum += 1.0;
      }
      o[static_cast<std::size_t>(i)] = sum;
    }
    return o;
  }

 private:
  std::size_t at(int column, int input) const noexcept {
    return static_cast<std::size_t>(column) * inputs_ + input;
  }

  std::size_t checked(int column, int input) const {
    if (column < 0 || column >= columns_ || input < 0 || input >= inputs_) {
      throw std::out_of_range("PermanenceMatrix: index out of range");
    }
    return at(column, input);
  }

  void refresh_connected(int column) {
    for (int j : pools_[static_cast<std::size_t>(column)]) {
      const std::size_t k = at(column, j);
      connected_[k] = perm_[k] >= threshold_ ? 1 : 0;
    }
  }

  int columns_;
  int inputs_;
  double threshold_;
  std::vector<double> perm_;
  std::vector<std::uint8_t> potential_;
  std::vector<std::uint8_t> connected_;
  std::vector<std::vector<int>> pools_;
};

// Running activity average and the boost factors derived from it.
class ActivityStats {
 public:
  ActivityStats(int columns, int window, double strength)
      : window_(window), strength_(strength) {
    if (columns < 1) throw std::invalid_argument("ActivityStats: empty shape");
    if (window < 1) throw std::invalid_argument("ActivityStats: window must be >= 1");
    if (!(strength >= 0.0)) throw std::invalid_argument("ActivityStats: strength must be >= 0");
    average_.assign(static_cast<std::size_t>(columns), 0.0);
    boost_.assign(static_cast<std::size_t>(columns), 1.0);
  }

  int columns() const noexcept { return static_cast<int>(average_.size()); }
  int window() const noexcept { return window_; }
  double strength() const noexcept { return strength_; }
  double average(int i) const { return average_.at(static_cast<std::size_t>(i)); }
  double boost(int i) const { return boost_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& boosts() const noexcept { return boost_; }

  void set_average(int i, double v) { average_.at(static_cast<std::size_t>(i)) = v; }

 private:
  friend void update_activity(ActivityStats&, const SdrVector&);
  friend void update_boost(ActivityStats&, const Topology&);

  std::vector<double> average_;
  std::vector<double> boost_;
  int window_;
  double strength_;
};

// Exponential moving average over the activity window T:
// avg <- ((T - 1) * avg + active) / T. Under a constant input this converges
// monotonically to the input value.
inline void update_activity(ActivityStats& stats, const SdrVector& active) {
  if (static_cast<int>(active.size()) != stats.columns()) {
    throw std::invalid_argument("update_activity: length mismatch");
  }
  const double t = static_cast<double>(stats.window_);
  for (std::size_t i = 0; i < stats.average_.size(); ++i) {
    const double a = active.bit(i) ? 1.0 : 0.0;
    stats.average_[i] = ((t - 1.0) * stats.average_[i] + a) / t;
  }
}

// Column neighborhood: every other column strictly inside the inhibition
// radius, measured in column-grid coordinates.
inline std::vector<int> neighborhood(const Topology& topo, int column) {
  const GridPoint p = topo.column_position(column);
  const double r2 = topo.inhibition_radius() * topo.inhibition_radius();
  std::vector<int> out;
  for (int j = 0; j < topo.column_count(); ++j) {
    if (j == column) continue;
    const GridPoint q = topo.column_position(j);
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    if (dx * dx + dy * dy < r2) out.push_back(j);
  }
  return out;
}

// Boost factors from the activity averages: each column compares itself with
// the mean average of its neighborhood (the column itself excluded) and is
// boosted or damped exponentially. Columns with no neighbors keep boost 1.
inline void update_boost(ActivityStats& stats, const Topology& topo) {
  if (topo.column_count() != stats.columns()) {
    throw std::invalid_argument("update_boost: topology size mismatch");
  }
  for (int i = 0; i < topo.column_count(); ++i) {
    const std::vector<int> n = neighborhood(topo, i);
    if (n.empty()) {
      stats.boost_[static_cast<std::size_t>(i)] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (int j : n) sum += stats.average_[static_cast<std::size_t>(j)];
    const double mean = sum / static_cast<double>(n.size());
    stats.boost_[static_cast<std::size_t>(i)] =
        std::exp(-stats.strength_ * (stats.average_[static_cast<std::size_t>(i)] - mean));
  }
}

// Boosted overlap: connected-synapse count against the input, scaled by the
// column's boost factor.
inline std::vector<double> overlap(const PermanenceMatrix& perms, const SdrVector& input,
                                   const ActivityStats& stats) {
  if (stats.columns() != perms.columns()) {
    throw std::invalid_argument("overlap: stats size mismatch");
  }
  std::vector<double> o = perms.raw_overlap(input);
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] *= stats.boosts()[i];
  }
  return o;
}

namespace detail {

// Winner cap of a neighborhood pool of m members. The small slack keeps
// products that are mathematically integral (0.02 * 100) from ceiling up.
inline int winner_cap(double density, std::size_t pool_size) {
  return static_cast<int>(std::ceil(density * static_cast<double>(pool_size) - 1e-9));
}

// Rank of column i inside a pool: members with a larger overlap count, and
// equal overlaps break toward the lower column index.
inline int pool_rank(const std::vector<double>& o, const std::vector<int>& pool, int i) {
  int rank = 0;
  for (int k : pool) {
    if (o[static_cast<std::size_t>(k)] > o[static_cast<std::size_t>(i)] ||
        (o[static_cast<std::size_t>(k)] == o[static_cast<std::size_t>(i)] && k < i)) {
      ++rank;
    }
  }
  return rank;
}

}  // namespace detail

// K-winners-take-all inhibition. A column becomes active when its overlap
// clears the stimulus threshold and it ranks inside the winner cap of every
// neighborhood pool it belongs to (each pool is a neighborhood plus its
// center). Requiring the rank in all containing pools, not only the
// column's own, is what bounds the number of winners inside any single
// neighborhood by that neighborhood's cap; ranking only against the
// column's own pool admits clusters of mutually distant local winners that
// overfill the neighborhood between them. With a global neighborhood both
// readings coincide: exactly ceil(density * n) columns win, ties resolved
// toward lower indices.
inline SdrVector inhibit(const std::vector<double>& overlaps, const Topology& topo,
                         double density, double stimulus_threshold) {
  if (static_cast<int>(overlaps.size()) != topo.column_count()) {
    throw std::invalid_argument("inhibit: overlap length mismatch");
  }
  if (!(density > 0.0) || density >= 1.0) {
    throw std::invalid_argument("inhibit: density must be in (0, 1)");
  }
  for (double o : overlaps) {
    if (!std::isfinite(o)) throw std::invalid_argument("inhibit: overlaps must be finite");
  }
  const int n = topo.column_count();
  std::vector<std::vector<int>> pool(static_cast<std::size_t>(n));
  std::vector<int> cap(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pool[static_cast<std::size_t>(i)] = neighborhood(topo, i);
    pool[static_cast<std::size_t>(i)].push_back(i);
    cap[static_cast<std::size_t>(i)] =
        detail::winner_cap(density, pool[static_cast<std::size_t>(i)].size());
  }
  SdrVector active(static_cast<std::size_t>(n), density);
  for (int i = 0; i < n; ++i) {
    if (overlaps[static_cast<std::size_t>(i)] < stimulus_threshold) continue;
    bool wins = true;
    // Pool membership is symmetric, so the pools containing i are exactly
    // the pools of i's own pool members.
    for (int j : pool[static_cast<std::size_t>(i)]) {
      if (detail::pool_rank(overlaps, pool[static_cast<std::size_t>(j)], i) >=
          cap[static_cast<std::size_t>(j)]) {
        wins = false;
        break;
      }
    }
    if (wins) active.set(static_cast<std::size_t>(i), true);
  }
  return active;
}

// One pooler: potential map, permanences, activity statistics, and the
// step order that ties them together.
class SpatialPooler {
 public:
  SpatialPooler(const Topology& topo, const HtmConfig& config, const RngStream& base)
      : topo_(topo),
        config_(config),
        potential_(init_potential(topo, base)),
        perms_(PermanenceMatrix::init_random(potential_, topo.input_count(),
                                             config.connected_threshold, base)),
        stats_(topo.column_count(), config.activity_window, config.boost_strength) {
    config.validate();
  }

  // Boosted overlap, inhibition, then learning and the activity bookkeeping.
  const SdrVector& step(const SdrVector& input, bool learn_enabled = true) {
    std::vector<double> o = overlap(perms_, input, stats_);
    active_ = inhibit(o, topo_, config_.target_density, config_.stimulus_threshold);
    if (learn_enabled) {
      perms_.learn(input, active_, config_.permanence_inc, config_.permanence_dec);
    }
    update_activity(stats_, active_);
    update_boost(stats_, topo_);
    return active_;
  }

  const Topology& topology() const noexcept { return topo_; }
  const HtmConfig& config() const noexcept { return config_; }
  const PotentialMap& potential() const noexcept { return potential_; }
  const PermanenceMatrix& permanences() const noexcept { return perms_; }
  PermanenceMatrix& permanences() noexcept { return perms_; }
  const ActivityStats& activity() const noexcept { return stats_; }
  const SdrVector& last_active() const noexcept { return active_; }

 private:
  Topology topo_;
  HtmConfig config_;
  PotentialMap potential_;
  PermanenceMatrix perms_;
  ActivityStats stats_;
  SdrVector active_;
};

}  // namespace memhtm
