#pragma once

// Binary raster morphology: dilation, erosion, hole filling, connected
// components, thinning, skeleton longest path and the exact Euclidean
// distance transform.

#include "calfront/grid.hpp"

namespace calfront {

/// Square(k) with odd side k, or a Euclidean Disk of integer radius.
class StructuringElement {
 public:
  static StructuringElement square(int side);
  static StructuringElement disk(int radius);

  /// Offsets (drow, dcol) covered by the element, including the centre.
  const std::vector<Pixel>& offsets() const { return offsets_; }
  int radius() const { return radius_; }
  bool is_square() const { return square_; }

 private:
  StructuringElement(std::vector<Pixel> offsets, int radius, bool square)
      : offsets_(std::move(offsets)), radius_(radius), square_(square) {}

  std::vector<Pixel> offsets_;
  int radius_;
  bool square_;
};

/// Value assumed for pixels outside the raster.
enum class Border { Background, Foreground };

BinaryGrid dilate(const BinaryGrid& g, const StructuringElement& se);
BinaryGrid erode(const BinaryGrid& g, const StructuringElement& se,
                 Border border = Border::Background);

/// Sets every false region that is not 4-connected to the raster border.
BinaryGrid fill_holes(const BinaryGrid& g);

enum class Connectivity { Four = 4, Eight = 8 };

struct Components {
  LabelGrid labels;  // 0 = background, 1..count in row-major order of first pixel
  int count = 0;

  /// Pixel count per label; index 0 is unused.
  std::vector<Index> sizes() const;
  BinaryGrid mask(int label) const { return labels == label; }
};

Components connected_components(const BinaryGrid& g, Connectivity conn);

/// Keeps the largest component; ties go to the lowest label.
BinaryGrid largest_component(const BinaryGrid& g, Connectivity conn);

/// Topology-preserving thinning to 1-px lines. Uses the Zhang-Suen deletion
/// rules, applied sequentially in row-major order within each sub-iteration
/// so that 2-px-thick structures cannot vanish.
BinaryGrid skeletonize(const BinaryGrid& g);

/// Longest shortest-path chain of a single 8-connected component, found by a
/// double breadth-first sweep. Exact when the component is a tree.
PixelChain longest_path(const BinaryGrid& component);

/// Exact Euclidean distance (in pixels) to the nearest set pixel;
/// +infinity everywhere when `g` has no set pixel.
RealGrid distance_transform(const BinaryGrid& g);

/// Squared variant of distance_transform, exact in integer arithmetic.
RealGrid squared_distance_transform(const BinaryGrid& g);

}  // namespace calfront
