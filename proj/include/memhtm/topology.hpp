#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memhtm {

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
};

// Geometry shared by the pooler stages: a 2-D input grid, a 2-D grid of
// mini-columns laid over it, and the three scalars that shape connectivity.
//
//  - hypercube_edge: side length of the axis-aligned receptive box each
//    column centers on its projected input coordinate. Membership uses the
//    Chebyshev metric and the box is clipped at the input borders; it never
//    wraps around.
//  - potential_fraction: probability that an input inside the box becomes a
//    potential synapse.
//  - inhibition_radius: Euclidean radius (strict) defining each column's
//    neighborhood in column-grid coordinates.
//
// When the column grid has the same dimensions as the input grid the
// inhibition radius is defined to equal the hypercube edge; constructing a
// conflicting explicit radius is rejected, and omitting it picks the edge.
class Topology {
 public:
  struct Params {
    int input_width = 0;
    int input_height = 0;
    int column_width = 0;   // 0 with column_height 0: derive from the count
    int column_height = 0;
    int column_count = 0;   // 0: full grid (column_width * column_height)
    double hypercube_edge = 1.0;
    double potential_fraction = 1.0;
    std::optional<double> inhibition_radius;
  };

  static Topology make(Params p) {
    if (p.input_width < 1 || p.input_height < 1) {
      throw std::invalid_argument("Topology: input grid must be at least 1x1");
    }
    if (p.column_width == 0 && p.column_height == 0) {
      // No explicit column grid: mirror the input grid when the count allows
      // it, otherwise lay the columns out on the tightest near-square grid.
      if (p.column_count == 0 || p.column_count == p.input_width * p.input_height) {
        p.column_width = p.input_width;
        p.column_height = p.input_height;
      } else if (p.column_count > 0) {
        const int w =
            static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p.column_count))));
        p.column_width = w;
        p.column_height = (p.column_count + w - 1) / w;
      }
    }
    if (p.column_width < 1 || p.column_height < 1) {
      throw std::invalid_argument("Topology: column grid must be at least 1x1");
    }
    const int full = p.column_width * p.column_height;
    const int count = p.column_count == 0 ? full : p.column_count;
    if (count < 1 || count > full) {
      throw std::invalid_argument("Topology: column_count must fit the column grid");
    }
    if (!(p.hypercube_edge >= 1.0)) {
      throw std::invalid_argument("Topology: hypercube_edge must be >= 1");
    }
    if (!(p.potential_fraction > 0.0) || p.potential_fraction > 1.0) {
      throw std::invalid_argument("Topology: potential_fraction must be in (0, 1]");
    }
    const bool same_grid =
        p.column_width == p.input_width && p.column_height == p.input_height;
    double radius;
    if (p.inhibition_radius.has_value()) {
      radius = *p.inhibition_radius;
      if (!(radius >= 0.0)) {
        throw std::invalid_argument("Topology: inhibition_radius must be >= 0");
      }
      if (same_grid && radius != p.hypercube_edge) {
        throw std::invalid_argument(
            "Topology: with matching input and column grids the inhibition "
            "radius equals the hypercube edge");
      }
    } else {
      radius = p.hypercube_edge;
    }
    Topology t;
    t.input_w_ = p.input_width;
    t.input_h_ = p.input_height;
    t.col_w_ = p.column_width;
    t.col_h_ = p.column_height;
    t.columns_ = count;
    t.edge_ = p.hypercube_edge;
    t.fraction_ = p.potential_fraction;
    t.radius_ = radius;
    return t;
  }

  // Column grid derived from a bare count: the input grid shape when the
  // count matches it exactly, otherwise the tightest near-square grid.
  static Topology from_column_count(int input_width, int input_height, int column_count,
                                    double hypercube_edge, double potential_fraction = 1.0,
                                    std::optional<double> inhibition_radius = std::nullopt) {
    if (column_count < 1) {
      throw std::invalid_argument("Topology: column_count must be >= 1");
    }
    Params p;
    p.input_width = input_width;
    p.input_height = input_height;
    p.column_count = column_count;
    p.hypercube_edge = hypercube_edge;
    p.potential_fraction = potential_fraction;
    p.inhibition_radius = inhibition_radius;
    return make(p);
  }

  int input_width() const noexcept { return input_w_; }
  int input_height() const noexcept { return input_h_; }
  int input_count() const noexcept { return input_w_ * input_h_; }
  int column_width() const noexcept { return col_w_; }
  int column_height() const noexcept { return col_h_; }
  int column_count() const noexcept { return columns_; }
  double hypercube_edge() const noexcept { return edge_; }
  double potential_fraction() const noexcept { return fraction_; }
  double inhibition_radius() const noexcept { return radius_; }

  GridPoint column_position(int column) const {
    check_column(column);
    return {static_cast<double>(column % col_w_), static_cast<double>(column / col_w_)};
  }

  // Receptive-box center of a column, projected onto input coordinates.
  // Identity when the grids match; proportional placement otherwise.
  GridPoint hypercube_center(int column) const {
    check_column(column);
    const GridPoint c = column_position(column);
    return {(c.x + 0.5) * input_w_ / col_w_ - 0.5,
            (c.y + 0.5) * input_h_ / col_h_ - 0.5};
  }

  bool in_hypercube(int input, int column) const {
    check_column(column);
    if (input < 0 || input >= input_count()) {
      throw std::out_of_range("Topology: input index " + std::to_string(input) +
                              " out of range");
    }
    const GridPoint c = hypercube_center(column);
    const double h = edge_ / 2.0;
    const double jx = static_cast<double>(input % input_w_);
    const double jy = static_cast<double>(input / input_w_);
    return std::abs(jx - c.x) <= h && std::abs(jy - c.y) <= h;
  }

  // All input indices inside the (border-clipped) receptive box, ascending.
  // Never empty: the box has edge >= 1, so the grid cell nearest the center
  // always qualifies.
  std::vector<int> hypercube_inputs(int column) const {
    check_column(column);
    const GridPoint c = hypercube_center(column);
    const double h = edge_ / 2.0;
    const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - h)));
    const int x1 = std::min(input_w_ - 1, static_cast<int>(std::floor(c.x + h)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - h)));
    const int y1 = std::min(input_h_ - 1, static_cast<int>(std::floor(c.y + h)));
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(std::max(0, x1 - x0 + 1)) *
                static_cast<std::size_t>(std::max(0, y1 - y0 + 1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        out.push_back(y * input_w_ + x);
      }
    }
    return out;
  }

 private:
  void check_column(int column) const {
    if (column < 0 || column >= columns_) {
      throw std::out_of_range("Topology: column index " + std::to_string(column) +
                              " out of range");
    }
  }

  int input_w_ = 1, input_h_ = 1;
  int col_w_ = 1, col_h_ = 1;
  int columns_ = 1;
  double edge_ = 1.0;
  double fraction_ = 1.0;
  double radius_ = 1.0;
};

}  // namespace memhtm
