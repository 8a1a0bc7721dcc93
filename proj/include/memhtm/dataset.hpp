#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "memhtm/pipeline.hpp"
#include "memhtm/rng.hpp"

namespace memhtm {

struct DatasetItem {
  ImagePattern image;
  int class_id = 0;
  std::string path;
};

struct Dataset {
  std::vector<DatasetItem> items;
  std::vector<std::string> class_names;

  int class_count() const noexcept { return static_cast<int>(class_names.size()); }
};

namespace detail {

[[noreturn]] inline void file_error(const std::filesystem::path& file, const std::string& what) {
  throw std::runtime_error(file.string() + ": " + what);
}

[[noreturn]] inline void file_error(const std::filesystem::path& file, int line,
                                    const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

// Next header token, skipping whitespace and '#' comments that run to
// end of line.
inline std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    break;
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c != EOF) in.unget();  // the terminator is not ours to eat
  return tok;
}

inline long pnm_int(std::istream& in, const std::filesystem::path& file, const char* what) {
  const std::string tok = pnm_token(in);
  if (tok.empty()) file_error(file, std::string("unexpected end of file reading ") + what);
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    file_error(file, std::string("malformed ") + what + " '" + tok + "'");
  }
}

}  // namespace detail

// Grayscale PGM, plain (P2) or raw (P5), header comments allowed, sample
// depth 1 or 2 bytes (2-byte samples are big-endian). Values come out
// normalized by maxval.
inline ImagePattern load_pgm(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) detail::file_error(file, "cannot open");
  const std::string magic = detail::pnm_token(in);
  if (magic != "P2" && magic != "P5") {
    detail::file_error(file, "not a PGM file (magic '" + magic + "')");
  }
  const long width = detail::pnm_int(in, file, "width");
  const long height = detail::pnm_int(in, file, "height");
  const long maxval = detail::pnm_int(in, file, "maxval");
  if (width < 1 || height < 1) detail::file_error(file, "nonpositive dimensions");
  if (maxval < 1 || maxval > 65535) detail::file_error(file, "maxval out of range");

  ImagePattern img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  img.pixels.resize(n);

  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = detail::pnm_int(in, file, "sample");
      if (v < 0 || v > maxval) detail::file_error(file, "sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
  }

  // One whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) detail::file_error(file, "missing raster separator");
  const int bytes_per_sample = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(n * static_cast<std::size_t>(bytes_per_sample));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    detail::file_error(file, "truncated raster");
  }
  for (std::size_t i = 0; i < n; ++i) {
    long v;
    if (bytes_per_sample == 1) {
      v = raw[i];
    } else {
      v = (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];
    }
    if (v > maxval) detail::file_error(file, "sample exceeds maxval");
    img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return img;
}

// Numeric grid, one image row per line, comma-separated, values already in
// [0, 1]. Blank lines are skipped; every row must have the same width.
inline ImagePattern load_csv_image(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) detail::file_error(file, "cannot open");
  ImagePattern img;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        detail::file_error(file, line_no, "malformed value '" + cell + "'");
      }
      if (!(row.back() >= 0.0) || row.back() > 1.0) {
        detail::file_error(file, line_no, "value out of [0, 1]");
      }
    }
    if (row.empty()) detail::file_error(file, line_no, "empty row");
    if (img.width == 0) {
      img.width = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != img.width) {
      detail::file_error(file, line_no, "row width differs from first row");
    }
    img.pixels.insert(img.pixels.end(), row.begin(), row.end());
    ++img.height;
  }
  if (img.width == 0) detail::file_error(file, "no rows");
  return img;
}

// Load a directory tree of class subfolders. Folders become classes in
// lexicographic order; files inside each folder load in lexicographic order.
// Recognized extensions: .pgm, .csv. Every class folder must contain at
// least one recognized image.
inline Dataset load_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) detail::file_error(root, "not a directory");

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) detail::file_error(root, "no class subdirectories");

  Dataset ds;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    ds.class_names.push_back(class_dirs[c].filename().string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".pgm" || ext == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) detail::file_error(class_dirs[c], "class folder has no images");
    for (const auto& f : files) {
      DatasetItem item;
      item.image = f.extension() == ".pgm" ? load_pgm(f) : load_csv_image(f);
      item.class_id = static_cast<int>(c);
      item.path = f.string();
      ds.items.push_back(std::move(item));
    }
  }
  return ds;
}

struct DatasetSplit {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

// Deterministic per-class split: the first round(train_fraction * n) items
// of each class train, the next round(test_fraction * n) test. A negative
// test fraction takes the whole remainder.
inline DatasetSplit split_dataset(const Dataset& ds, double train_fraction,
                                  double test_fraction = -1.0) {
  if (!(train_fraction > 0.0) || train_fraction > 1.0) {
    throw std::invalid_argument("split_dataset: train_fraction must be in (0, 1]");
  }
  if (test_fraction > 1.0) {
    throw std::invalid_argument("split_dataset: test_fraction must be <= 1");
  }
  DatasetSplit split;
  for (int c = 0; c < ds.class_count(); ++c) {
    std::vector<int> indices;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      if (ds.items[i].class_id == c) indices.push_back(static_cast<int>(i));
    }
    const auto n = static_cast<double>(indices.size());
    const auto k = static_cast<std::size_t>(std::llround(train_fraction * n));
    std::size_t m = test_fraction < 0.0
                        ? indices.size() - std::min(k, indices.size())
                        : static_cast<std::size_t>(std::llround(test_fraction * n));
    if (k + m > indices.size()) {
      throw std::invalid_argument("split_dataset: class '" + ds.class_names[c] +
                                  "' has too few items for the requested split");
    }
    split.train_indices.insert(split.train_indices.end(), indices.begin(), indices.begin() + k);
    split.test_indices.insert(split.test_indices.end(), indices.begin() + k,
                              indices.begin() + k + m);
  }
  return split;
}

struct SyntheticSpec {
  int classes = 10;
  int per_class = 40;
  int width = 16;
  int height = 16;
  double flip_probability = 0.05;
  std::uint64_t seed = 42;

  void validate() const {
    if (classes < 1 || per_class < 1 || width < 1 || height < 1) {
      throw std::invalid_argument("SyntheticSpec: counts and dimensions must be >= 1");
    }
    if (!(flip_probability >= 0.0) || flip_probability > 1.0) {
      throw std::invalid_argument("SyntheticSpec: flip_probability must be in [0, 1]");
    }
  }
};

namespace detail {

inline std::string padded_name(const char* prefix, int value, int max_value, int min_digits) {
  int digits = 1;
  for (int v = max_value; v >= 10; v /= 10) ++digits;
  digits = std::max(digits, min_digits);
  std::string num = std::to_string(value);
  if (static_cast<int>(num.size()) < digits) {
    num.insert(0, static_cast<std::size_t>(digits) - num.size(), '0');
  }
  return prefix + num;
}

}  // namespace detail

// Write a synthetic benchmark dataset: one random binary base pattern per
// class, each item a bit-flipped copy, stored as raw PGM with 0/255 pixels.
// Identical spec and seed reproduce identical bytes. Returns the number of
// images written.
inline int generate_synthetic_dataset(const std::filesystem::path& dir,
                                      const SyntheticSpec& spec) {
  namespace fs = std::filesystem;
  spec.validate();
  const RngStream base(spec.seed, stream_domain::dataset);
  const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
  int written = 0;
  for (int c = 0; c < spec.classes; ++c) {
    const fs::path class_dir =
        dir / detail::padded_name("class_", c, spec.classes - 1, 2);
    fs::create_directories(class_dir);

    RngStream base_rng = base.substream(static_cast<std::uint64_t>(c), 0);
    std::vector<std::uint8_t> pattern(n);
    for (std::size_t i = 0; i < n; ++i) pattern[i] = base_rng.uniform() < 0.5 ? 1 : 0;

    for (int item = 0; item < spec.per_class; ++item) {
      RngStream noise = base.substream(static_cast<std::uint64_t>(c),
                                       static_cast<std::uint64_t>(item) + 1);
      std::string raster(n, '\0');
      for (std::size_t i = 0; i < n; ++i) {
        const bool flip = noise.uniform() < spec.flip_probability;
        const bool bit = flip ? pattern[i] == 0 : pattern[i] != 0;
        raster[i] = bit ? static_cast<char>(255) : '\0';
      }
      const fs::path file =
          class_dir / (detail::padded_name("img_", item, spec.per_class - 1, 3) + ".pgm");
      std::ofstream out(file, std::ios::binary);
      if (!out) detail::file_error(file, "cannot write");
      out << "P5\n" << spec.width << ' ' << spec.height << "\n255\n" << raster;
      if (!out) detail::file_error(file, "write failed");
      ++written;
    }
  }
  return written;
}

}  // namespace memhtm
