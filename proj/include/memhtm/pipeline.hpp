#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/crossbar.hpp"
#include "memhtm/memristor.hpp"
#include "memhtm/rng.hpp"
#include "memhtm/sdr.hpp"

namespace memhtm {

// Single-channel image with values in [0, 1], row-major.
struct ImagePattern {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels.at(static_cast<std::size_t>(y) * width + x); }
};

// As loaded from disk: possibly multichannel, values already in [0, 1],
// channels interleaved.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> samples;
};

inline void check_image(int width, int height, std::size_t actual, int channels = 1) {
  if (width < 1 || height < 1 || channels < 1 ||
      actual != static_cast<std::size_t>(width) * height * channels) {
    throw std::invalid_argument("image: inconsistent dimensions");
  }
}

// Channel-averaged grayscale view. Identity for single-channel input.
inline ImagePattern to_grayscale(const RawImage& raw) {
  check_image(raw.width, raw.height, raw.samples.size(), raw.channels);
  ImagePattern img;
  img.width = raw.width;
  img.height = raw.height;
  img.pixels.resize(static_cast<std::size_t>(raw.width) * raw.height);
  for (std::size_t p = 0; p < img.pixels.size(); ++p) {
    double sum = 0.0;
    for (int c = 0; c < raw.channels; ++c) {
      sum += raw.samples[p * raw.channels + c];
    }
    img.pixels[p] = sum / raw.channels;
  }
  return img;
}

// Min-max rescale to [0, 1]. A constant image maps to all zeros.
inline ImagePattern normalize_minmax(const ImagePattern& img) {
  check_image(img.width, img.height, img.pixels.size());
  const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  ImagePattern out = img;
  const double span = *hi - *lo;
  if (span <= 0.0) {
    std::fill(out.pixels.begin(), out.pixels.end(), 0.0);
    return out;
  }
  for (double& v : out.pixels) v = (v - *lo) / span;
  return out;
}

// 3x3 local standard deviation (sample form, n - 1 divisor), borders
// replicated. Flat areas go to zero; texture and edges light up.
inline ImagePattern std_filter_3x3(const ImagePattern& img) {
  check_image(img.width, img.height, img.pixels.size());
  ImagePattern out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(img.pixels.size());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double window[9];
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = std::clamp(x + dx, 0, img.width - 1);
          const int yy = std::clamp(y + dy, 0, img.height - 1);
          window[k++] = img.at(xx, yy);
        }
      }
      double mean = 0.0;
      for (double v : window) mean += v;
      mean /= 9.0;
      double ss = 0.0;
      for (double v : window) ss += (v - mean) * (v - mean);
      out.pixels[static_cast<std::size_t>(y) * img.width + x] = std::sqrt(ss / 8.0);
    }
  }
  return out;
}

// Full front end: grayscale, min-max normalization, then the local
// standard-deviation filter.
inline ImagePattern preprocess(const RawImage& raw) {
  return std_filter_3x3(normalize_minmax(to_grayscale(raw)));
}

inline ImagePattern preprocess(const ImagePattern& gray) {
  RawImage raw;
  raw.width = gray.width;
  raw.height = gray.height;
  raw.channels = 1;
  raw.samples = gray.pixels;
  return preprocess(raw);
}

enum class BackendKind { ideal, memristive };

inline const char* to_string(BackendKind k) noexcept {
  return k == BackendKind::ideal ? "ideal" : "memristive";
}

// Geometry and sampling parameters of the block encoder.
struct PipelineConfig {
  int block_size = 3;            // pixels per block side
  int iterations = 4;            // random weight draws averaged per block
  int region_rows = 2;           // inhibition-region grid over the blocks
  int region_cols = 2;
  double weight_threshold = 0.5; // binarization level for the weight draws

  void validate() const {
    if (block_size < 1) throw std::invalid_argument("PipelineConfig: block_size must be >= 1");
    if (iterations < 1) throw std::invalid_argument("PipelineConfig: iterations must be >= 1");
    if (region_rows < 1 || region_cols < 1) {
      throw std::invalid_argument("PipelineConfig: region grid must be at least 1x1");
    }
    if (!(weight_threshold >= 0.0) || weight_threshold > 1.0) {
      throw std::invalid_argument("PipelineConfig: weight_threshold must be in [0, 1]");
    }
  }
};

// Block encoder: the image is cut into block_size^2-pixel blocks, each block
// is averaged through a bank of fixed random binary weight vectors, and a
// block's bit turns on when its averaged value strictly exceeds the mean
// over its inhibition region. The weight bank is drawn once per encoder
// seed and reused for every image, like hardware whose random weights are
// programmed at build time.
//
// On the ideal backend the weighted block means are computed exactly. On
// the memristive backend each block owns a crossbar (one column per
// iteration) programmed with the binary weights; encoding drives the block
// pixels as read voltages and decodes the weighted sums from the column
// currents, so quantization, stochastic programming, and read noise all
// enter the loop. Encoding is const and draws noise only from the stream
// the caller passes in; callers that encode in parallel hand each image its
// own stream.
class SpEncoder {
 public:
  SpEncoder(const PipelineConfig& cfg, int image_width, int image_height, BackendKind kind,
            const DevicePreset& preset, const RngStream& base)
      : cfg_(cfg), kind_(kind), preset_(preset), width_(image_width), height_(image_height) {
    cfg.validate();
    preset.validate();
    if (image_width < 1 || image_height < 1) {
      throw std::invalid_argument("SpEncoder: empty image shape");
    }
    if (image_width % cfg.block_size != 0 || image_height % cfg.block_size != 0) {
      throw std::invalid_argument("SpEncoder: image dimensions must divide into blocks of " +
                                  std::to_string(cfg.block_size));
    }
    blocks_x_ = image_width / cfg.block_size;
    blocks_y_ = image_height / cfg.block_size;
    if (blocks_x_ % cfg.region_cols != 0 || blocks_y_ % cfg.region_rows != 0) {
      throw std::invalid_argument("SpEncoder: block grid must divide into the region grid");
    }
    const int block_area = cfg.block_size * cfg.block_size;
    weight_bits_.resize(static_cast<std::size_t>(block_count()) * cfg.iterations);
    for (int b = 0; b < block_count(); ++b) {
      for (int t = 0; t < cfg.iterations; ++t) {
        RngStream rng = base.substream(stream_domain::weight_bank,
                                       static_cast<std::uint64_t>(b) * cfg.iterations + t);
        auto& bits = weight_bits_[static_cast<std::size_t>(b) * cfg.iterations + t];
        bits.resize(static_cast<std::size_t>(block_area));
        for (int k = 0; k < block_area; ++k) {
          bits[static_cast<std::size_t>(k)] = rng.uniform() >= cfg.weight_threshold ? 1 : 0;
        }
      }
    }
    if (kind_ == BackendKind::memristive) {
      crossbars_.reserve(static_cast<std::size_t>(block_count()));
      std::vector<double> w(static_cast<std::size_t>(block_area) * cfg.iterations);
      for (int b = 0; b < block_count(); ++b) {
        for (int k = 0; k < block_area; ++k) {
          for (int t = 0; t < cfg.iterations; ++t) {
            w[static_cast<std::size_t>(k) * cfg.iterations + t] =
                weight_bit(b, t, k) ? 1.0 : 0.0;
          }
        }
        crossbars_.push_back(CrossbarArray::map_weights(
            block_area, cfg.iterations, w, preset,
            base.substream(stream_domain::programming, static_cast<std::uint64_t>(b))));
      }
    }
  }

  int block_count() const noexcept { return blocks_x_ * blocks_y_; }
  int blocks_x() const noexcept { return blocks_x_; }
  int blocks_y() const noexcept { return blocks_y_; }
  int bits() const noexcept { return block_count(); }
  const PipelineConfig& config() const noexcept { return cfg_; }
  BackendKind backend() const noexcept { return kind_; }

  bool weight_bit(int block, int iteration, int k) const {
    return weight_bits_
               .at(static_cast<std::size_t>(block) * cfg_.iterations + iteration)
               .at(static_cast<std::size_t>(k)) != 0;
  }

  std::uint64_t program_pulse_total() const noexcept {
    std::uint64_t n = 0;
    for (const auto& x : crossbars_) n += x.program_pulse_count();
    return n;
  }

  std::uint64_t read_slot_total() const noexcept {
    std::uint64_t n = 0;
    for (const auto& x : crossbars_) n += x.read_slot_count();
    return n;
  }

  // Encode one preprocessed image into a per-block binary vector.
  SdrVector encode(const ImagePattern& img, RngStream& rng) const {
    check_image(img.width, img.height, img.pixels.size());
    if (img.width != width_ || img.height != height_) {
      throw std::invalid_argument("SpEncoder: image shape differs from the encoder's");
    }
    for (double v : img.pixels) {
      if (!(v >= 0.0) || v > 1.0) {
        throw std::invalid_argument("SpEncoder: pixel values must be in [0, 1]");
      }
    }
    const int s = cfg_.block_size;
    const int block_area = s * s;
    std::vector<double> value(static_cast<std::size_t>(block_count()), 0.0);
    std::vector<double> px(static_cast<std::size_t>(block_area));
    for (int by = 0; by < blocks_y_; ++by) {
      for (int bx = 0; bx < blocks_x_; ++bx) {
        const int b = by * blocks_x_ + bx;
        for (int dy = 0; dy < s; ++dy) {
          for (int dx = 0; dx < s; ++dx) {
            px[static_cast<std::size_t>(dy) * s + dx] = img.at(bx * s + dx, by * s + dy);
          }
        }
        value[static_cast<std::size_t>(b)] = block_value(b, px, rng);
      }
    }

    const int rbx = blocks_x_ / cfg_.region_cols;  // blocks per region, x
    const int rby = blocks_y_ / cfg_.region_rows;
    SdrVector out(static_cast<std::size_t>(block_count()));
    for (int ry = 0; ry < cfg_.region_rows; ++ry) {
      for (int rx = 0; rx < cfg_.region_cols; ++rx) {
        double mean = 0.0;
        for (int by = ry * rby; by < (ry + 1) * rby; ++by) {
          for (int bx = rx * rbx; bx < (rx + 1) * rbx; ++bx) {
            mean += value[static_cast<std::size_t>(by) * blocks_x_ + bx];
          }
        }
        mean /= static_cast<double>(rbx * rby);
        for (int by = ry * rby; by < (ry + 1) * rby; ++by) {
          for (int bx = rx * rbx; bx < (rx + 1) * rbx; ++bx) {
            const std::size_t b = static_cast<std::size_t>(by) * blocks_x_ + bx;
            out.set(b, value[b] > mean);
          }
        }
      }
    }
    return out;
  }

 private:
  double block_value(int b, std::span<const double> px, RngStream& rng) const {
    const int block_area = cfg_.block_size * cfg_.block_size;
    double acc = 0.0;
    if (kind_ == BackendKind::ideal) {
      for (int t = 0; t < cfg_.iterations; ++t) {
        double dot = 0.0;
        for (int k = 0; k < block_area; ++k) {
          if (weight_bit(b, t, k)) dot += px[static_cast<std::size_t>(k)];
        }
        acc += dot / block_area;
      }
      return acc / cfg_.iterations;
    }
    const CrossbarArray& xbar = crossbars_[static_cast<std::size_t>(b)];
    const double v_read = xbar.v_read();
    std::vector<double> v(px.size());
    double pixel_sum = 0.0;
    for (std::size_t k = 0; k < px.size(); ++k) {
      v[k] = px[k] * v_read;
      pixel_sum += px[k];
    }
    const std::vector<double> currents = xbar.matvec(v, rng);
    const double dg = preset_.g_max() - preset_.g_min();
    for (int t = 0; t < cfg_.iterations; ++t) {
      const double dot =
          (currents[static_cast<std::size_t>(t)] / v_read - preset_.g_min() * pixel_sum) / dg;
      acc += dot / block_area;
    }
    return acc / cfg_.iterations;
  }

  PipelineConfig cfg_;
  BackendKind kind_;
  DevicePreset preset_;
  int width_;
  int height_;
  int blocks_x_ = 0;
  int blocks_y_ = 0;
  std::vector<std::vector<std::uint8_t>> weight_bits_;
  std::vector<CrossbarArray> crossbars_;
};

// Convenience wrapper: build a one-shot encoder and encode a single image.
inline SdrVector sp_encode(const ImagePattern& img, const PipelineConfig& cfg, BackendKind kind,
                           const DevicePreset& preset, const RngStream& base) {
  SpEncoder enc(cfg, img.width, img.height, kind, preset, base);
  RngStream noise = base.substream(stream_domain::encode_noise, 0);
  return enc.encode(img, noise);
}

// Trained class prototype: the analog accumulator as last read, and its
// binarized form used for matching.
struct ClassTemplate {
  int class_id = 0;
  std::vector<double> accumulator;
  SdrVector bits;
  std::uint64_t program_pulses = 0;  // spent writing cell-backed storage
};

// Accumulate encoded patterns of one class into a template. The first
// pattern seeds the accumulator; every further pattern nudges each element
// up where its bit is set and down where it is not, clamped to [0, 1]; the
// result is binarized strictly above the threshold (ties fall to zero).
//
// On the memristive backend the accumulator lives in one memory cell per
// element and every update is a recall-modify-store round trip, so storage
// quantization and read noise shape the trained template. A continuous
// (zero-level) preset stores exactly and is treated like the ideal path.
inline ClassTemplate train_template(std::span<const SdrVector> patterns, double inc, double dec,
                                    double threshold, BackendKind kind,
                                    const DevicePreset& preset, const RngStream& base,
                                    int class_id = 0) {
  if (patterns.empty()) {
    throw std::invalid_argument("train_template: at least one pattern required");
  }
  const std::size_t n = patterns.front().size();
  for (const auto& p : patterns) {
    if (p.size() != n) throw std::invalid_argument("train_template: pattern size mismatch");
  }
  ClassTemplate tmpl;
  tmpl.class_id = class_id;
  tmpl.accumulator.resize(n);
  tmpl.bits = SdrVector(n);

  const bool cell_backed = kind == BackendKind::memristive && preset.levels != 0;
  RngStream rng = base.substream(stream_domain::template_store,
                                 static_cast<std::uint64_t>(class_id));

  if (!cell_backed) {
    std::vector<double> acc(n);
    for (std::size_t j = 0; j < n; ++j) acc[j] = patterns.front().bit(j) ? 1.0 : 0.0;
    for (std::size_t p = 1; p < patterns.size(); ++p) {
      for (std::size_t j = 0; j < n; ++j) {
        acc[j] = std::clamp(acc[j] + (patterns[p].bit(j) ? inc : -dec), 0.0, 1.0);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      tmpl.accumulator[j] = acc[j];
      tmpl.bits.set(j, acc[j] > threshold);
    }
    return tmpl;
  }

  std::vector<MemoryCell> cells;
  cells.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    cells.emplace_back(preset, 4, preset.levels);
    tmpl.program_pulses += cells.back().store(patterns.front().bit(j) ? 1.0 : 0.0, rng);
  }
  for (std::size_t p = 1; p < patterns.size(); ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = cells[j].recall(rng);
      tmpl.program_pulses +=
          cells[j].store(std::clamp(a + (patterns[p].bit(j) ? inc : -dec), 0.0, 1.0), rng);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = cells[j].recall(rng);
    tmpl.accumulator[j] = a;
    tmpl.bits.set(j, a > threshold);
  }
  return tmpl;
}

// Hamming distance between a template and an encoded pattern.
inline int match_score(const SdrVector& tmpl_bits, const SdrVector& x) {
  if (tmpl_bits.size() != x.size()) {
    throw std::invalid_argument("match_score: size mismatch");
  }
  int score = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    score += tmpl_bits.bit(j) != x.bit(j) ? 1 : 0;
  }
  return score;
}

// Nearest template by Hamming distance; ties go to the lowest class id.
inline int classify(std::span<const ClassTemplate> templates, const SdrVector& x) {
  if (templates.empty()) {
    throw std::invalid_argument("classify: at least one template required");
  }
  int best_id = templates.front().class_id;
  int best_score = match_score(templates.front().bits, x);
  for (std::size_t c = 1; c < templates.size(); ++c) {
    const int score = match_score(templates[c].bits, x);
    const int id = templates[c].class_id;
    if (score < best_score || (score == best_score && id < best_id)) {
      best_score = score;
      best_id = id;
    }
  }
  return best_id;
}

// Per-block area and power of the reference analog circuit implementations,
// measured for a 45 nm process at a 100 MHz equivalent throughput.
struct CostTable {
  double sp_block_area_um2 = 19.96;     // one 1x4 pooler block
  double sp_block_power_uw = 365.88;
  double tm_cell_area_um2 = 23.85;      // one 1x1 sequence cell
  double tm_cell_power_uw = 442.26;
  double matcher_cell_area_um2 = 1.18;  // one 1x1 pattern-matcher cell
  double matcher_cell_power_uw = 69.44;

  static CostTable analog_reference() { return CostTable{}; }
};

struct HardwareCounts {
  std::int64_t sp_blocks_1x4 = 0;
  std::int64_t tm_cells_1x1 = 0;
  std::int64_t matcher_cells_1x1 = 0;
};

struct CostEstimate {
  double area_um2 = 0.0;
  double power_uw = 0.0;
};

// Linear composition of the per-block costs.
inline CostEstimate estimate_cost(const HardwareCounts& counts, const CostTable& table) {
  if (counts.sp_blocks_1x4 < 0 || counts.tm_cells_1x1 < 0 || counts.matcher_cells_1x1 < 0) {
    throw std::invalid_argument("estimate_cost: counts must be nonnegative");
  }
  CostEstimate e;
  e.area_um2 = static_cast<double>(counts.sp_blocks_1x4) * table.sp_block_area_um2 +
               static_cast<double>(counts.tm_cells_1x1) * table.tm_cell_area_um2 +
               static_cast<double>(counts.matcher_cells_1x1) * table.matcher_cell_area_um2;
  e.power_uw = static_cast<double>(counts.sp_blocks_1x4) * table.sp_block_power_uw +
               static_cast<double>(counts.tm_cells_1x1) * table.tm_cell_power_uw +
               static_cast<double>(counts.matcher_cells_1x1) * table.matcher_cell_power_uw;
  return e;
}

}  // namespace memhtm
