#pragma once

// Patch extraction, longest-side resizing, and weighted merging of
// predictions produced tile by tile.

#include "calfront/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace calfront {

enum class PadPolicy { ZeroPad, ClampToEdge };

/// Patch geometry. With ClampToEdge the last tile of each axis is anchored to
/// the far edge; with ZeroPad tiles keep the regular stride and overhang the
/// canvas, the overhang being filled with zeros.
struct TileSpec {
  Index patch_w = 256;
  Index patch_h = 256;
  Index overlap_x = 0;
  Index overlap_y = 0;
  PadPolicy pad_policy = PadPolicy::ClampToEdge;

  void validate() const {
    if (patch_w < 1 || patch_h < 1) throw std::invalid_argument("patch size must be >= 1");
    if (overlap_x < 0 || overlap_x >= patch_w || overlap_y < 0 || overlap_y >= patch_h) {
      throw std::invalid_argument("overlap must satisfy 0 <= overlap < patch size");
    }
  }
};

template <typename Scalar>
struct Tile {
  Pixel origin;  // top-left canvas coordinate of data(0, 0)
  Grid<Scalar> data;
};

struct UniformWeight {};
struct GaussianWeight {
  double sigma_x = 0.0;  // <= 0 selects patch_w / 8
  double sigma_y = 0.0;  // <= 0 selects patch_h / 8
};
using Weighting = std::variant<UniformWeight, GaussianWeight>;

enum class Sampling { NearestNeighbor, Bilinear };

/// Tile origins along one axis of length `size`.
inline std::vector<Index> tile_origins(Index size, Index patch, Index overlap, PadPolicy policy) {
  const Index stride = patch - overlap;
  std::vector<Index> origins;
  Index o = 0;
  while (true) {
    origins.push_back(o);
    if (o + patch >= size) break;
    o += stride;
    if (policy == PadPolicy::ClampToEdge && o + patch > size) o = size - patch;
  }
  return origins;
}

template <typename Scalar>
std::vector<Tile<Scalar>> extract_patches(const Grid<Scalar>& img, const TileSpec& spec) {
  spec.validate();
  if (img.rows() == 0 || img.cols() == 0) throw std::invalid_argument("cannot tile an empty image");

  const auto rows = tile_origins(img.rows(), spec.patch_h, spec.overlap_y, spec.pad_policy);
  const auto cols = tile_origins(img.cols(), spec.patch_w, spec.overlap_x, spec.pad_policy);
  const bool clamp = spec.pad_policy == PadPolicy::ClampToEdge;

  std::vector<Tile<Scalar>> tiles;
  tiles.reserve(rows.size() * cols.size());
  for (Index r0 : rows) {
    for (Index c0 : cols) {
      Tile<Scalar> t{{r0, c0}, Grid<Scalar>::Zero(spec.patch_h, spec.patch_w)};
      for (Index r = 0; r < spec.patch_h; ++r) {
        for (Index c = 0; c < spec.patch_w; ++c) {
          Index sr = r0 + r, sc = c0 + c;
          if (sr >= img.rows() || sc >= img.cols()) {
            if (!clamp) continue;
            sr = std::min(sr, img.rows() - 1);
            sc = std::min(sc, img.cols() - 1);
          }
          t.data(r, c) = img(sr, sc);
        }
      }
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

/// Per-pixel weight of a rows x cols tile.
inline RealGrid tile_weights(Index rows, Index cols, const Weighting& weighting) {
  if (std::holds_alternative<UniformWeight>(weighting)) return RealGrid::Ones(rows, cols);
  const auto& g = std::get<GaussianWeight>(weighting);
  const double sy = g.sigma_y > 0.0 ? g.sigma_y : static_cast<double>(rows) / 8.0;
  const double sx = g.sigma_x > 0.0 ? g.sigma_x : static_cast<double>(cols) / 8.0;
  const double cy = static_cast<double>(rows - 1) / 2.0;
  const double cx = static_cast<double>(cols - 1) / 2.0;
  RealGrid w(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const double dy = (static_cast<double>(r) - cy) / sy;
    for (Index c = 0; c < cols; ++c) {
      const double dx = (static_cast<double>(c) - cx) / sx;
      w(r, c) = std::exp(-0.5 * (dy * dy + dx * dx));
    }
  }
  return w;
}

/// Weighted mean of all tiles covering each canvas pixel. The mean is
/// accumulated relative to the first covering tile's value, so pixels on
/// which every tile agrees reproduce that value bit-exactly.
template <typename Scalar>
Grid<Scalar> merge_patches(const std::vector<Tile<Scalar>>& tiles, Index canvas_rows,
                           Index canvas_cols, const Weighting& weighting = UniformWeight{}) {
  if (canvas_rows < 1 || canvas_cols < 1) throw std::invalid_argument("empty canvas");
  RealGrid weight_sum = RealGrid::Zero(canvas_rows, canvas_cols);
  RealGrid delta_sum = RealGrid::Zero(canvas_rows, canvas_cols);
  RealGrid reference = RealGrid::Zero(canvas_rows, canvas_cols);

  for (const auto& t : tiles) {
    const RealGrid w = tile_weights(t.data.rows(), t.data.cols(), weighting);
    for (Index r = 0; r < t.data.rows(); ++r) {
      const Index cr = t.origin.row + r;
      if (cr < 0 || cr >= canvas_rows) continue;
      for (Index c = 0; c < t.data.cols(); ++c) {
        const Index cc = t.origin.col + c;
        if (cc < 0 || cc >= canvas_cols) continue;
        const double v = static_cast<double>(t.data(r, c));
        if (weight_sum(cr, cc) == 0.0) reference(cr, cc) = v;
        weight_sum(cr, cc) += w(r, c);
        delta_sum(cr, cc) += w(r, c) * (v - reference(cr, cc));
      }
    }
  }

  Grid<Scalar> out(canvas_rows, canvas_cols);
  for (Index r = 0; r < canvas_rows; ++r) {
    for (Index c = 0; c < canvas_cols; ++c) {
      if (!(weight_sum(r, c) > 0.0)) {
        throw std::invalid_argument("canvas pixel uncovered at (" + std::to_string(r) + "," +
                                    std::to_string(c) + ")");
      }
      out(r, c) = static_cast<Scalar>(reference(r, c) + delta_sum(r, c) / weight_sum(r, c));
    }
  }
  return out;
}

/// Output (rows, cols) with the longer side equal to `target`.
inline std::pair<Index, Index> longest_side_shape(Index rows, Index cols, Index target) {
  if (target < 1) throw std::invalid_argument("resize target must be >= 1");
  if (rows < 1 || cols < 1) throw std::invalid_argument("cannot resize an empty image");
  const Index longest = std::max(rows, cols);
  auto scaled = [&](Index n) {
    const auto v = static_cast<Index>(std::llround(static_cast<double>(n) *
                                                   static_cast<double>(target) /
                                                   static_cast<double>(longest)));
    return std::max<Index>(1, v);
  };
  return rows >= cols ? std::pair{target, scaled(cols)} : std::pair{scaled(rows), target};
}

/// Resizes so the longer side has `target` pixels. Class masks must use
/// NearestNeighbor.
template <typename Scalar>
Grid<Scalar> resize_longest_side(const Grid<Scalar>& img, Index target, Sampling sampling) {
  const auto [out_rows, out_cols] = longest_side_shape(img.rows(), img.cols(), target);
  if (out_rows == img.rows() && out_cols == img.cols()) return img;

  const double sy = static_cast<double>(img.rows()) / static_cast<double>(out_rows);
  const double sx = static_cast<double>(img.cols()) / static_cast<double>(out_cols);
  Grid<Scalar> out(out_rows, out_cols);
  for (Index r = 0; r < out_rows; ++r) {
    const double fy = (static_cast<double>(r) + 0.5) * sy - 0.5;
    for (Index c = 0; c < out_cols; ++c) {
      const double fx = (static_cast<double>(c) + 0.5) * sx - 0.5;
      if (sampling == Sampling::NearestNeighbor) {
        const Index nr = std::clamp<Index>(static_cast<Index>(std::floor(fy + 0.5)), 0, img.rows() - 1);
        const Index nc = std::clamp<Index>(static_cast<Index>(std::floor(fx + 0.5)), 0, img.cols() - 1);
        out(r, c) = img(nr, nc);
        continue;
      }
      const double cy = std::clamp(fy, 0.0, static_cast<double>(img.rows() - 1));
      const double cx = std::clamp(fx, 0.0, static_cast<double>(img.cols() - 1));
      const Index r0 = static_cast<Index>(std::floor(cy));
      const Index c0 = static_cast<Index>(std::floor(cx));
      const Index r1 = std::min(r0 + 1, img.rows() - 1);
      const Index c1 = std::min(c0 + 1, img.cols() - 1);
      const double ty = cy - static_cast<double>(r0);
      const double tx = cx - static_cast<double>(c0);
      const double top = (1.0 - tx) * static_cast<double>(img(r0, c0)) + tx * static_cast<double>(img(r0, c1));
      const double bot = (1.0 - tx) * static_cast<double>(img(r1, c0)) + tx * static_cast<double>(img(r1, c1));
      const double v = (1.0 - ty) * top + ty * bot;
      if constexpr (std::is_integral_v<Scalar>) {
        out(r, c) = static_cast<Scalar>(std::lround(v));
      } else {
        out(r, c) = static_cast<Scalar>(v);
      }
    }
  }
  return out;
}

}  // namespace calfront
