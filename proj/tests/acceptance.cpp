// Release gate. Each criterion below pins one contract the simulator must
// hold before a build ships, prints exactly one [PASS]/[FAIL] line, and
// the process exits nonzero when anything fails. Tolerances are written
// out here on purpose: loosening one shows up as a diff in this file, not
// as a quiet config change.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <memhtm/memhtm.hpp>

namespace {

using namespace memhtm;
namespace fs = std::filesystem;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Uniform integer in [0, bound).
int pick(RngStream& rng, int bound) {
  const int v = static_cast<int>(rng.uniform() * static_cast<double>(bound));
  return std::min(v, bound - 1);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Column grid deliberately decoupled from the input grid: a grid aligned
// 1:1 with its input inherits the hypercube edge as inhibition radius, so
// an explicit radius needs distinct shapes.
Topology column_grid(int cols_w, int cols_h, double radius) {
  Topology::Params p;
  p.input_width = cols_w + 1;
  p.input_height = cols_h;
  p.column_width = cols_w;
  p.column_height = cols_h;
  p.hypercube_edge = 1.0;
  p.inhibition_radius = radius;
  return Topology::make(p);
}

// ---------------------------------------------------------------------------
// 1. Boost factor closed forms.

Outcome boost_identities() {
  // Two mutually visible columns: each one's neighborhood mean is exactly
  // the other's running average.
  const Topology pair = column_grid(2, 1, 100.0);
  {
    ActivityStats stats(2, 100, 0.0);
    stats.set_average(0, 0.75);
    stats.set_average(1, 0.25);
    update_boost(stats, pair);
    if (stats.boost(0) != 1.0 || stats.boost(1) != 1.0) {
      return {false, "zero strength must pin the factor to 1, got " + fmt(stats.boost(0)) +
                         " and " + fmt(stats.boost(1))};
    }
  }
  {
    ActivityStats stats(2, 100, 4.0);
    stats.set_average(0, 0.37);
    stats.set_average(1, 0.37);
    update_boost(stats, pair);
    if (stats.boost(0) != 1.0 || stats.boost(1) != 1.0) {
      return {false, "balanced activity must pin the factor to 1, got " + fmt(stats.boost(0))};
    }
  }
  {
    // No neighbors at all: the factor stays parked at 1 whatever the
    // column's own average.
    const Topology lone = column_grid(1, 1, 0.25);
    ActivityStats stats(1, 100, 5.0);
    stats.set_average(0, 0.9);
    update_boost(stats, lone);
    if (stats.boost(0) != 1.0) {
      return {false, "isolated column drifted to " + fmt(stats.boost(0))};
    }
  }
  // strength * (average - neighborhood mean) = 2 * (0.75 - 0.25) = 1, with
  // dyadic averages so the exponent is exactly -1.
  ActivityStats stats(2, 100, 2.0);
  stats.set_average(0, 0.75);
  stats.set_average(1, 0.25);
  update_boost(stats, pair);
  const double err = std::abs(stats.boost(0) - std::exp(-1.0));
  if (err > 1e-12) {
    return {false, "unit exponent off by " + fmt(err)};
  }
  return {true, "exact at zero strength and balanced activity; e^-1 within " + fmt(err)};
}

// ---------------------------------------------------------------------------
// 2. Inhibition winner caps.

Outcome winner_caps() {
  // Global pools: one neighborhood spanning the whole grid yields exactly
  // ceil(density * n) winners when every overlap is distinct. Expected
  // counts are hardcoded integers, not recomputed through the unit under
  // test.
  const struct {
    int w, h;
    int expect_low, expect_high;  // densities 0.02 and 0.25
  } grids[] = {{2, 2, 1, 1}, {4, 4, 1, 4}, {10, 10, 2, 25}};
  for (const auto& g : grids) {
    const int n = g.w * g.h;
    const Topology topo = column_grid(g.w, g.h, 1e6);
    RngStream rng(201, static_cast<std::uint64_t>(n));
    std::vector<double> overlaps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) overlaps[static_cast<std::size_t>(i)] = i + 1;
    for (int i = n - 1; i > 0; --i) {
      std::swap(overlaps[static_cast<std::size_t>(i)],
                overlaps[static_cast<std::size_t>(pick(rng, i + 1))]);
    }
    const struct {
      double density;
      int expect;
    } cases[] = {{0.02, g.expect_low}, {0.25, g.expect_high}};
    for (const auto& c : cases) {
      const SdrVector active = inhibit(overlaps, topo, c.density, 0.0);
      if (static_cast<int>(active.active_count()) != c.expect) {
        return {false, std::to_string(n) + " columns at density " + fmt(c.density) + " gave " +
                           std::to_string(active.active_count()) + " winners, expected " +
                           std::to_string(c.expect)};
      }
    }
  }

  // Local pools: across random instances, no neighborhood may ever hold
  // more winners than its own cap, and nothing below the stimulus
  // threshold may win.
  long long pools_checked = 0;
  for (int t = 0; t < 1000; ++t) {
    RngStream rng(202, static_cast<std::uint64_t>(t));
    const int w = 2 + pick(rng, 6);
    const int h = 2 + pick(rng, 6);
    const int n = w * h;
    const double radii[] = {0.5, 1.01, 1.8, 2.5, 1e6};
    const Topology topo = column_grid(w, h, radii[pick(rng, 5)]);
    const double density = 0.05 + 0.4 * rng.uniform();
    const double threshold = pick(rng, 2) == 0 ? 0.0 : 2.0;
    std::vector<double> overlaps(static_cast<std::size_t>(n));
    for (auto& o : overlaps) o = static_cast<double>(pick(rng, 7));  // ties on purpose
    const SdrVector active = inhibit(overlaps, topo, density, threshold);
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active.bit(i) && overlaps[i] < threshold) {
        return {false, "sub-threshold winner in instance " + std::to_string(t)};
      }
    }
    for (int j = 0; j < n; ++j) {
      std::vector<int> pool = neighborhood(topo, j);
      pool.push_back(j);
      const int cap = detail::winner_cap(density, pool.size());
      int inside = 0;
      for (int k : pool) inside += active.bit(static_cast<std::size_t>(k)) ? 1 : 0;
      if (inside > cap) {
        return {false, "pool around column " + std::to_string(j) + " holds " +
                           std::to_string(inside) + " winners against cap " + std::to_string(cap) +
                           " in instance " + std::to_string(t)};
      }
      ++pools_checked;
    }
  }
  return {true, "global counts 1/1, 1/4, 2/25; no breach across " + std::to_string(pools_checked) +
                    " pools in 1000 instances"};
}

// ---------------------------------------------------------------------------
// 3. Permanence bounds under sustained learning.

Outcome permanence_bounds() {
  const Topology topo = Topology::from_column_count(8, 8, 16, 3.0);
  HtmConfig cfg;
  cfg.connected_threshold = 0.35;
  cfg.target_density = 0.25;
  cfg.permanence_inc = 0.12;
  cfg.permanence_dec = 0.07;
  cfg.activity_window = 50;
  cfg.boost_strength = 1.2;
  cfg.segment_threshold = 0;
  cfg.tm_winner_fraction = 0.25;
  cfg.segment_decay = 0.02;
  TmParams tm;
  tm.cells_per_column = 2;
  tm.segments_per_cell = 2;
  tm.synapse_fraction = 0.7;
  HtmModel model(topo, cfg, tm, RngStream(301, 0));

  RngStream drive(301, 1);
  const int steps = 10000;
  for (int s = 0; s < steps; ++s) {
    SdrVector in(static_cast<std::size_t>(topo.input_count()));
    for (std::size_t i = 0; i < in.size(); ++i) in.set(i, drive.uniform() < 0.3);
    model.step(in, true);
  }

  long long checked = 0;
  long long violations = 0;
  const PermanenceMatrix& perms = model.pooler().permanences();
  for (int i = 0; i < perms.columns(); ++i) {
    for (int j = 0; j < perms.inputs(); ++j) {
      if (!perms.is_potential(i, j)) continue;
      ++checked;
      const double p = perms.permanence(i, j);
      if (!(p >= 0.0 && p <= 1.0)) ++violations;
    }
  }
  const SegmentSet& segs = model.sequence_memory().segments();
  for (int col = 0; col < segs.columns(); ++col) {
    for (int cell = 0; cell < segs.cells_per_column(); ++cell) {
      for (int d = 0; d < segs.segment_count(cell, col); ++d) {
        for (double p : segs.segment(cell, col, d).permanence) {
          ++checked;
          if (!(p >= 0.0 && p <= 1.0)) ++violations;
        }
      }
    }
  }
  if (violations > 0) {
    return {false, std::to_string(violations) + " of " + std::to_string(checked) +
                       " synapses left [0, 1]"};
  }
  return {true, "0 violations across " + std::to_string(checked) + " synapses after " +
                    std::to_string(steps) + " learning steps"};
}

// ---------------------------------------------------------------------------
// 4. Sequence state against a brute-force oracle.

Outcome sequence_oracle() {
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    RngStream rng(401, static_cast<std::uint64_t>(t));
    const int cols = 2 + pick(rng, 5);
    const int cells = 1 + pick(rng, 4);
    const int segs_per_cell = pick(rng, 4);
    const double fraction = rng.uniform();
    const double theta_c = 0.2 + 0.6 * rng.uniform();
    const int theta_seg = pick(rng, 3);
    const SegmentSet segs = SegmentSet::init_random(cells, cols, segs_per_cell, fraction,
                                                    RngStream(402, static_cast<std::uint64_t>(t)));
    CellMatrix active(cells, cols);
    for (int c = 0; c < cells; ++c) {
      for (int j = 0; j < cols; ++j) active.set(c, j, rng.uniform() < 0.4);
    }

    // Prediction: any segment with strictly more connected synapses onto
    // active cells than the threshold, recounted by hand.
    const CellMatrix got_pred = predictive_state(segs, active, theta_c, theta_seg);
    CellMatrix want_pred(cells, cols);
    for (int j = 0; j < cols; ++j) {
      for (int c = 0; c < cells; ++c) {
        bool pred = false;
        for (int d = 0; d < segs.segment_count(c, j) && !pred; ++d) {
          const DendriteSegment& seg = segs.segment(c, j, d);
          int count = 0;
          for (int c2 = 0; c2 < cells; ++c2) {
            for (int j2 = 0; j2 < cols; ++j2) {
              if (active.get(c2, j2) &&
                  seg.permanence[static_cast<std::size_t>(c2) * cols + j2] >= theta_c) {
                ++count;
              }
            }
          }
          pred = count > theta_seg;
        }
        want_pred.set(c, j, pred);
      }
    }
    if (!(got_pred == want_pred)) {
      ++mismatches;
      continue;
    }

    // Activation: predicted cells fire in winning columns, unpredicted
    // winners burst, losers stay silent.
    CellMatrix pred_prev(cells, cols);
    for (int c = 0; c < cells; ++c) {
      for (int j = 0; j < cols; ++j) pred_prev.set(c, j, rng.uniform() < 0.3);
    }
    std::vector<int> winners;
    for (int j = 0; j < cols; ++j) {
      if (rng.uniform() < 0.5) winners.push_back(j);
    }
    const CellMatrix got_act = active_state(winners, pred_prev, cells, cols);
    CellMatrix want_act(cells, cols);
    for (int j : winners) {
      bool any = false;
      for (int c = 0; c < cells; ++c) any = any || pred_prev.get(c, j);
      for (int c = 0; c < cells; ++c) want_act.set(c, j, any ? pred_prev.get(c, j) : true);
    }
    if (!(got_act == want_act)) ++mismatches;
  }
  if (mismatches > 0) {
    return {false, std::to_string(mismatches) + " of 1000 instances disagree with the oracle"};
  }
  return {true, "1000 random instances, 0 mismatches"};
}

// ---------------------------------------------------------------------------
// 5. Convergence on a repeating sequence.

Outcome sequence_convergence() {
  HtmConfig cfg;
  cfg.connected_threshold = 0.2;
  cfg.segment_threshold = 1;
  cfg.permanence_inc = 0.3;
  cfg.permanence_dec = 0.02;
  cfg.segment_decay = 0.001;
  cfg.tm_winner_fraction = 0.5;
  TmParams tp;
  tp.columns = 4;
  tp.cells_per_column = 2;
  tp.segments_per_cell = 2;
  tp.synapse_fraction = 1.0;
  TemporalMemory tm(tp, cfg, RngStream(42, 0));

  SdrVector first(4);
  first.set(0, true);
  first.set(1, true);
  SdrVector second(4);
  second.set(2, true);
  second.set(3, true);

  const int epochs = 50;
  std::vector<int> burst_a(epochs);
  std::vector<int> burst_b(epochs);
  for (int e = 0; e < epochs; ++e) {
    tm.step(first);
    burst_a[static_cast<std::size_t>(e)] = tm.last_burst_count();
    tm.step(second);
    burst_b[static_cast<std::size_t>(e)] = tm.last_burst_count();
  }
  int settled = -1;
  for (int e = 0; e < epochs; ++e) {
    if (e > 0 && (burst_a[static_cast<std::size_t>(e)] > burst_a[static_cast<std::size_t>(e - 1)] ||
                  burst_b[static_cast<std::size_t>(e)] > burst_b[static_cast<std::size_t>(e - 1)])) {
      return {false, "bursting rose again at epoch " + std::to_string(e)};
    }
    if (settled < 0 && burst_a[static_cast<std::size_t>(e)] == 0 &&
        burst_b[static_cast<std::size_t>(e)] == 0) {
      settled = e;
    }
  }
  if (burst_a[epochs - 1] != 0 || burst_b[epochs - 1] != 0) {
    return {false, "still bursting after " + std::to_string(epochs) + " epochs"};
  }
  return {true, "monotone decline, burst-free from epoch " + std::to_string(settled)};
}

// ---------------------------------------------------------------------------
// 6. Exact crossbar numerics on the noiseless backend.

Outcome crossbar_exactness() {
  const DevicePreset ideal = DevicePreset::ideal();
  const double g0 = ideal.g_min();
  const double dg = ideal.g_max() - ideal.g_min();
  const int n = 32;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    RngStream rng(601, static_cast<std::uint64_t>(t));
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (auto& x : w) x = rng.uniform();
    const CrossbarArray xbar =
        CrossbarArray::map_weights(n, n, w, ideal, RngStream(602, static_cast<std::uint64_t>(t)));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = 0.99 * (2.0 * rng.uniform() - 1.0);
    RngStream read(603, static_cast<std::uint64_t>(t));
    const std::vector<double> got = xbar.matvec(v, read);
    for (int c = 0; c < n; ++c) {
      double want = 0.0;
      for (int r = 0; r < n; ++r) {
        want += v[static_cast<std::size_t>(r)] *
                (g0 + w[static_cast<std::size_t>(r) * n + c] * dg);
      }
      const double err = std::abs(got[static_cast<std::size_t>(c)] - want) /
                         std::max(1.0, std::abs(want));
      worst = std::max(worst, err);
    }
  }
  if (worst > 1e-9) {
    return {false, "worst relative error " + fmt(worst) + " exceeds 1e-9"};
  }
  return {true, "1000 random 32x32 products, worst relative error " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 7. Recall error budget of the quantized storage cell.

Outcome storage_budget() {
  auto mean_error = [](int levels) {
    DevicePreset p = DevicePreset::memristive();
    p.levels = levels;
    MemoryCell cell(p, 4, levels);
    RngStream rng(701, static_cast<std::uint64_t>(levels));
    double total = 0.0;
    const int trials = 10000;
    for (int k = 0; k < trials; ++k) {
      const double v = rng.uniform();
      cell.store(v, rng);
      total += std::abs(cell.recall(rng) - v);
    }
    return total / trials;
  };
  const double e256 = mean_error(256);
  const double e1024 = mean_error(1024);
  if (!(e256 <= 0.10)) {
    return {false, "mean recall error " + fmt(e256) + " at 256 levels exceeds 0.10"};
  }
  if (!(e1024 > e256)) {
    return {false, "1024 levels measured no worse: " + fmt(e1024) + " vs " + fmt(e256)};
  }
  return {true, "mean recall error " + fmt(e256) + " at 256 levels, " + fmt(e1024) +
                    " at 1024 (strictly worse, as the wider radix demands)"};
}

// ---------------------------------------------------------------------------
// 8 and 11 share one synthetic image suite.

ExperimentSpec suite_spec(const fs::path& dir, BackendKind kind) {
  ExperimentSpec spec;
  spec.dataset_dir = dir;
  spec.backend = kind;
  spec.preset_name = to_string(kind);
  spec.seed = 42;
  spec.threads = 4;
  spec.config.pipeline.block_size = 2;
  spec.config.pipeline.iterations = 16;
  spec.config.pipeline.region_rows = 2;
  spec.config.pipeline.region_cols = 2;
  spec.config.pipeline.weight_threshold = 0.25;
  spec.config.train_fraction = 0.5;
  spec.config.preset =
      kind == BackendKind::memristive ? DevicePreset::memristive() : DevicePreset::ideal();
  return spec;
}

Outcome end_to_end(const fs::path& dir) {
  const MetricsReport exact = run_experiment(suite_spec(dir, BackendKind::ideal));
  const MetricsReport noisy = run_experiment(suite_spec(dir, BackendKind::memristive));
  const double gap = std::abs(noisy.overall_accuracy - exact.overall_accuracy);
  if (!(exact.overall_accuracy >= 0.90)) {
    return {false, "exact backend accuracy " + fmt(exact.overall_accuracy) + " below 0.90"};
  }
  if (!(gap <= 0.05)) {
    return {false, "backend gap " + fmt(gap) + " exceeds 0.05 (exact " +
                       fmt(exact.overall_accuracy) + ", noisy " + fmt(noisy.overall_accuracy) +
                       ")"};
  }
  return {true, "exact backend " + fmt(exact.overall_accuracy) + ", quantized noisy backend " +
                    fmt(noisy.overall_accuracy) + ", gap " + fmt(gap)};
}

// ---------------------------------------------------------------------------
// 9. Hardware cost model.

Outcome cost_model() {
  const CostTable table = CostTable::analog_reference();
  const CostEstimate sp = estimate_cost(HardwareCounts{1, 0, 0}, table);
  if (sp.area_um2 != 19.96 || sp.power_uw != 365.88) {
    return {false, "pooler block unit cost drifted: " + fmt(sp.area_um2) + " um2, " +
                       fmt(sp.power_uw) + " uW"};
  }
  const CostEstimate tm = estimate_cost(HardwareCounts{0, 1, 0}, table);
  if (tm.area_um2 != 23.85 || tm.power_uw != 442.26) {
    return {false, "sequence cell unit cost drifted: " + fmt(tm.area_um2) + " um2, " +
                       fmt(tm.power_uw) + " uW"};
  }
  const CostEstimate matcher = estimate_cost(HardwareCounts{0, 0, 1}, table);
  if (matcher.area_um2 != 1.18 || matcher.power_uw != 69.44) {
    return {false, "matcher cell unit cost drifted: " + fmt(matcher.area_um2) + " um2, " +
                       fmt(matcher.power_uw) + " uW"};
  }
  const CostEstimate mix = estimate_cost(HardwareCounts{3, 5, 7}, table);
  const double want_area = 3.0 * 19.96 + 5.0 * 23.85 + 7.0 * 1.18;
  const double want_power = 3.0 * 365.88 + 5.0 * 442.26 + 7.0 * 69.44;
  if (mix.area_um2 != want_area || mix.power_uw != want_power) {
    return {false, "composite cost is not bit-exact"};
  }
  return {true, "unit and composite costs reproduce the reference table bit-for-bit"};
}

// ---------------------------------------------------------------------------
// 10. Sneak-path ratios.

Outcome sneak_paths() {
  // Grounded per-column readout pins every ratio to zero, whatever the
  // geometry or the stored pattern.
  const struct {
    int rows, cols;
  } shapes[] = {{1, 1}, {2, 2}, {3, 7}, {64, 64}};
  long long probed = 0;
  for (const auto& s : shapes) {
    RngStream rng(1001, static_cast<std::uint64_t>(probed));
    std::vector<double> w(static_cast<std::size_t>(s.rows) * s.cols);
    for (auto& x : w) x = rng.uniform();
    const CrossbarArray grounded = CrossbarArray::map_weights(
        s.rows, s.cols, w, DevicePreset::ideal(), RngStream(1002, 0), AccessMode::single_column);
    for (int r = 0; r < s.rows; ++r) {
      for (int c = 0; c < s.cols; ++c) {
        if (grounded.sneak_ratio(r, c) != 0.0) {
          return {false, "grounded ratio nonzero at (" + std::to_string(r) + ", " +
                             std::to_string(c) + ") in a " + std::to_string(s.rows) + "x" +
                             std::to_string(s.cols) + " array"};
        }
        ++probed;
      }
    }
  }

  // Shared-row readout on a uniform 2x2: the lone three-device detour
  // carries exactly a third of the selected device's current.
  const std::vector<double> uniform(4, 0.5);
  const CrossbarArray shared = CrossbarArray::map_weights(
      2, 2, uniform, DevicePreset::ideal(), RngStream(1003, 0), AccessMode::all_columns);
  double worst = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      worst = std::max(worst, std::abs(shared.sneak_ratio(r, c) - 1.0 / 3.0));
    }
  }
  if (worst > 1e-12) {
    return {false, "uniform 2x2 ratio off by " + fmt(worst)};
  }
  return {true, std::to_string(probed) + " grounded positions at exactly zero; uniform 2x2 within " +
                    fmt(worst) + " of 1/3"};
}

// ---------------------------------------------------------------------------
// 11. Byte-level reproducibility.

Outcome reproducibility(const fs::path& dir) {
  const fs::path out_a = fs::temp_directory_path() / "memhtm_acceptance_a.json";
  const fs::path out_b = fs::temp_directory_path() / "memhtm_acceptance_b.json";
  const ExperimentSpec spec = suite_spec(dir, BackendKind::memristive);

  const MetricsReport first = run_experiment(spec);
  const std::string body_a = write_report(first, spec, out_a);
  const MetricsReport second = run_experiment(spec);
  const std::string body_b = write_report(second, spec, out_b);

  Outcome out;
  if (body_a != body_b) {
    out = {false, "two identical runs produced different reports"};
  } else if (read_file(out_a) != read_file(out_b)) {
    out = {false, "report files differ on disk"};
  } else {
    ExperimentSpec lone = spec;
    lone.threads = 1;
    const MetricsReport third = run_experiment(lone);
    const std::string body_c = report_json(third, lone).dump(2) + "\n";
    if (body_c != body_a) {
      out = {false, "thread count leaked into the report"};
    } else {
      out = {true, "byte-identical across reruns and across 1- vs 4-thread execution"};
    }
  }

  std::error_code ec;
  for (const fs::path& p : {out_a, out_b}) {
    fs::remove(p, ec);
    fs::path csv = p;
    csv.replace_extension();
    csv += ".confusion.csv";
    fs::remove(csv, ec);
  }
  return out;
}

// ---------------------------------------------------------------------------

int failures = 0;

void run_criterion(int number, const char* label, const std::function<Outcome()>& check) {
  Outcome r;
  try {
    r = check();
  } catch (const std::exception& e) {
    r = {false, std::string("unexpected exception: ") + e.what()};
  }
  std::string line = std::string(r.ok ? "[PASS]" : "[FAIL]") + " criterion " +
                     std::to_string(number) + ": " + label;
  if (!r.detail.empty()) line += "; " + r.detail;
  std::puts(line.c_str());
  std::fflush(stdout);
  if (!r.ok) ++failures;
}

}  // namespace

int main() {
  const fs::path dataset_dir = fs::temp_directory_path() / "memhtm_acceptance_data";
  std::error_code ec;
  fs::remove_all(dataset_dir, ec);
  try {
    generate_synthetic_dataset(dataset_dir, SyntheticSpec{});
  } catch (const std::exception& e) {
    std::printf("cannot stage the synthetic image suite: %s\n", e.what());
    return 1;
  }

  run_criterion(1, "boost factor hits its closed forms", boost_identities);
  run_criterion(2, "inhibition honors every winner cap", winner_caps);
  run_criterion(3, "permanences stay inside [0, 1] under load", permanence_bounds);
  run_criterion(4, "sequence state matches a brute-force oracle", sequence_oracle);
  run_criterion(5, "a repeating sequence stops bursting", sequence_convergence);
  run_criterion(6, "noiseless crossbar products are numerically exact", crossbar_exactness);
  run_criterion(7, "quantized cells meet the recall error budget", storage_budget);
  run_criterion(8, "end-to-end recognition holds its accuracy floor",
                [&] { return end_to_end(dataset_dir); });
  run_criterion(9, "hardware cost table composes bit-exactly", cost_model);
  run_criterion(10, "sneak ratios match the network closed forms", sneak_paths);
  run_criterion(11, "identical runs produce identical bytes",
                [&] { return reproducibility(dataset_dir); });

  fs::remove_all(dataset_dir, ec);
  if (failures > 0) {
    std::printf("%d of 11 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
