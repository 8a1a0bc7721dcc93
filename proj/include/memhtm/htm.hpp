#pragma once

#include "memhtm/config.hpp"
#include "memhtm/rng.hpp"
#include "memhtm/sdr.hpp"
#include "memhtm/spatial_pooler.hpp"
#include "memhtm/temporal_memory.hpp"
#include "memhtm/topology.hpp"

namespace memhtm {

// Pooler and sequence memory chained end to end: one step feeds the input
// through spatial inhibition and then through the per-column cells.
class HtmModel {
 public:
  HtmModel(const Topology& topo, const HtmConfig& config, const TmParams& tm_params,
           const RngStream& base)
      : sp_(topo, config, base), tm_(with_columns(tm_params, topo.column_count()), config, base) {}

  HtmModel(const Topology& topo, const HtmConfig& config, const RngStream& base)
      : HtmModel(topo, config, TmParams{}, base) {}

  void step(const SdrVector& input, bool learn = true) {
    const SdrVector& active = sp_.step(input, learn);
    tm_.step(active, learn);
  }

  const SpatialPooler& pooler() const noexcept { return sp_; }
  SpatialPooler& pooler() noexcept { return sp_; }
  const TemporalMemory& sequence_memory() const noexcept { return tm_; }
  TemporalMemory& sequence_memory() noexcept { return tm_; }

  const SdrVector& last_active_columns() const noexcept { return sp_.last_active(); }
  const CellMatrix& last_active_cells() const noexcept { return tm_.active(); }
  const CellMatrix& predictive_cells() const noexcept { return tm_.predictive(); }

 private:
  static TmParams with_columns(TmParams p, int columns) {
    p.columns = columns;
    return p;
  }

  SpatialPooler sp_;
  TemporalMemory tm_;
};

}  // namespace memhtm
