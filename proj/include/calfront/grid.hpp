#pragma once

// Dense raster carriers shared by every module. All grids are row-major
// Eigen arrays indexed (row, col) with the origin at the top-left pixel.

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace calfront {

using Index = Eigen::Index;

template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using BinaryGrid = Grid<bool>;
using LabelGrid = Grid<std::int32_t>;
using RealGrid = Grid<double>;
using Gray8 = Grid<std::uint8_t>;

/// Binary grid of calving-front pixels. Coordinates are in-bounds and unique
/// by construction.
using FrontMask = BinaryGrid;

/// Binary grid, true inside the (rasterized) glacier catchment.
using CatchmentMask = BinaryGrid;

struct Pixel {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Ordered pixels where consecutive entries are 8-neighbours.
using PixelChain = std::vector<Pixel>;

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when file content violates its declared format.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline BinaryGrid empty_grid(Index rows, Index cols) {
  return BinaryGrid::Constant(rows, cols, false);
}

template <typename A, typename B>
bool same_shape(const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

inline void require_same_shape(const BinaryGrid& a, const BinaryGrid& b, std::string_view what) {
  if (!same_shape(a, b)) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

/// Set pixels in row-major order.
inline std::vector<Pixel> pixels_of(const BinaryGrid& g) {
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(g.count()));
  for (Index r = 0; r < g.rows(); ++r) {
    for (Index c = 0; c < g.cols(); ++c) {
      if (g(r, c)) out.push_back({r, c});
    }
  }
  return out;
}

inline BinaryGrid grid_from_pixels(Index rows, Index cols, const std::vector<Pixel>& pixels) {
  BinaryGrid g = empty_grid(rows, cols);
  for (const Pixel& p : pixels) {
    if (p.row < 0 || p.row >= rows || p.col < 0 || p.col >= cols) {
      throw std::out_of_range("pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols) +
                              " grid");
    }
    g(p.row, p.col) = true;
  }
  return g;
}

inline bool in_bounds(Index rows, Index cols, Index r, Index c) {
  return r >= 0 && r < rows && c >= 0 && c < cols;
}

}  // namespace calfront
