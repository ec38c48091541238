#pragma once

// Front extraction pipelines and the shared post-processing steps applied to
// every prediction before scoring.

#include "calfront/geodata.hpp"
#include "calfront/morph.hpp"

#include <optional>

namespace calfront {

enum class LengthMetric { PixelCount, Geometric };

/// Connected fronts shorter than `min_length_m` are discarded. The benchmark's
/// 1.5 km minimum front length is applied as half of it, i.e. 750 m.
struct LengthPolicy {
  LengthMetric metric = LengthMetric::PixelCount;
  double min_length_m = 750.0;
};

struct DistanceMapParams {
  std::optional<double> decay_gamma;
};

/// One chain per connected front.
struct FrontSet {
  Index rows = 0;
  Index cols = 0;
  std::vector<PixelChain> chains;

  FrontMask to_mask() const;
};

/// PixelCount: pixels * resolution. Geometric: sum of 1 / sqrt(2) steps * resolution.
double front_length(const PixelChain& chain, double resolution_m, LengthMetric metric);

/// Length of an arbitrary 8-connected component; the geometric metric is
/// measured along its longest path.
double component_length(const BinaryGrid& component, double resolution_m, LengthMetric metric);

FrontMask mask_bbox(const FrontMask& front, const BoundingBox& bbox);

FrontMask filter_short_fronts(const FrontMask& front, const LengthPolicy& policy,
                              double resolution_m);

/// Ocean pixels 8-adjacent to glacier after gap filling and keeping the
/// largest 4-connected ocean region, then bbox masking and length filtering.
FrontMask zones_to_front(const ZoneMask& zones, const BoundingBox& bbox, double resolution_m,
                         const LengthPolicy& policy);

/// Skeleton longest path of every 8-connected component.
FrontSet front_chains(const FrontMask& front);

/// Thins each predicted front component to its skeleton's longest path, then
/// bbox masking and length filtering.
FrontMask refine_front_mask(const FrontMask& front, const BoundingBox& bbox, double resolution_m,
                            const LengthPolicy& policy);

/// Removes front pixels inside the catchment dilated by round(buffer_m / resolution_m) px.
FrontMask apply_catchment(const FrontMask& front, const CatchmentMask& catchment, double buffer_m,
                          double resolution_m);

BinaryGrid dilate_front_label(const FrontMask& front, int kernel);

/// Euclidean distance to the front in pixels, or exp(-d / gamma) when a decay is set.
RealGrid front_distance_map(const FrontMask& front, const DistanceMapParams& params = {});

}  // namespace calfront
