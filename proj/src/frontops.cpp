#include "calfront/frontops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace calfront {
namespace {

void require_positive_resolution(double resolution_m) {
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    throw std::invalid_argument("resolution_m must be a finite value > 0");
  }
}

// Bounding rectangle of each label, as (row0, col0, rows, cols).
struct LabelBox {
  Index r0 = 0, c0 = 0, r1 = -1, c1 = -1;
  Index rows() const { return r1 - r0 + 1; }
  Index cols() const { return c1 - c0 + 1; }
};

std::vector<LabelBox> label_boxes(const Components& cc) {
  std::vector<LabelBox> boxes(static_cast<std::size_t>(cc.count) + 1);
  for (auto& b : boxes) {
    b.r0 = cc.labels.rows();
    b.c0 = cc.labels.cols();
  }
  for (Index r = 0; r < cc.labels.rows(); ++r) {
    for (Index c = 0; c < cc.labels.cols(); ++c) {
      const int l = cc.labels(r, c);
      if (l == 0) continue;
      auto& b = boxes[static_cast<std::size_t>(l)];
      b.r0 = std::min(b.r0, r);
      b.c0 = std::min(b.c0, c);
      b.r1 = std::max(b.r1, r);
      b.c1 = std::max(b.c1, c);
    }
  }
  return boxes;
}

BinaryGrid crop_label(const Components& cc, int label, const LabelBox& b) {
  return cc.labels.block(b.r0, b.c0, b.rows(), b.cols()) == label;
}

}  // namespace

FrontMask FrontSet::to_mask() const {
  FrontMask m = empty_grid(rows, cols);
  for (const auto& chain : chains)
    for (const Pixel& p : chain) m(p.row, p.col) = true;
  return m;
}

double front_length(const PixelChain& chain, double resolution_m, LengthMetric metric) {
  if (chain.empty()) throw std::invalid_argument("front length of an empty chain");
  require_positive_resolution(resolution_m);
  if (metric == LengthMetric::PixelCount) return static_cast<double>(chain.size()) * resolution_m;
  double steps = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const bool diagonal =
        chain[i].row != chain[i - 1].row && chain[i].col != chain[i - 1].col;
    steps += diagonal ? std::numbers::sqrt2 : 1.0;
  }
  return steps * resolution_m;
}

double component_length(const BinaryGrid& component, double resolution_m, LengthMetric metric) {
  if (metric == LengthMetric::PixelCount) {
    require_positive_resolution(resolution_m);
    return static_cast<double>(component.count()) * resolution_m;
  }
  return front_length(longest_path(component), resolution_m, metric);
}

FrontMask mask_bbox(const FrontMask& front, const BoundingBox& bbox) {
  FrontMask out = empty_grid(front.rows(), front.cols());
  const Index r0 = std::max<Index>(0, bbox.y_min);
  const Index c0 = std::max<Index>(0, bbox.x_min);
  const Index r1 = std::min<Index>(front.rows() - 1, bbox.y_max);
  const Index c1 = std::min<Index>(front.cols() - 1, bbox.x_max);
  if (r1 >= r0 && c1 >= c0) {
    out.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1) = front.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1);
  }
  return out;
}

FrontMask filter_short_fronts(const FrontMask& front, const LengthPolicy& policy,
                              double resolution_m) {
  require_positive_resolution(resolution_m);
  if (!std::isfinite(policy.min_length_m) || policy.min_length_m < 0.0) {
    throw std::invalid_argument("min_length_m must be finite and >= 0");
  }
  const Components cc = connected_components(front, Connectivity::Eight);
  const auto boxes = label_boxes(cc);
  std::vector<bool> keep(static_cast<std::size_t>(cc.count) + 1, false);
  for (int l = 1; l <= cc.count; ++l) {
    const BinaryGrid comp = crop_label(cc, l, boxes[static_cast<std::size_t>(l)]);
    keep[static_cast<std::size_t>(l)] =
        component_length(comp, resolution_m, policy.metric) >= policy.min_length_m;
  }
  FrontMask out = empty_grid(front.rows(), front.cols());
  for (Index i = 0; i < out.size(); ++i) {
    out.data()[i] = keep[static_cast<std::size_t>(cc.labels.data()[i])];
  }
  return out;
}

FrontMask zones_to_front(const ZoneMask& zones, const BoundingBox& bbox, double resolution_m,
                         const LengthPolicy& policy) {
  require_positive_resolution(resolution_m);
  bbox.check_fits(zones.rows(), zones.cols());

  const BinaryGrid ocean =
      largest_component(fill_holes(zones.mask_of(ZoneClass::Ocean)), Connectivity::Four);
  // Glacier enclosed by the filled ocean no longer borders it.
  const BinaryGrid glacier = zones.mask_of(ZoneClass::Glacier) && !ocean;
  const BinaryGrid front = ocean && dilate(glacier, StructuringElement::square(3));
  return filter_short_fronts(mask_bbox(front, bbox), policy, resolution_m);
}

FrontSet front_chains(const FrontMask& front) {
  FrontSet set{front.rows(), front.cols(), {}};
  const Components cc = connected_components(front, Connectivity::Eight);
  const auto boxes = label_boxes(cc);
  for (int l = 1; l <= cc.count; ++l) {
    const LabelBox& b = boxes[static_cast<std::size_t>(l)];
    const BinaryGrid skel = skeletonize(crop_label(cc, l, b));
    PixelChain chain = longest_path(skel);
    for (Pixel& p : chain) {
      p.row += b.r0;
      p.col += b.c0;
    }
    set.chains.push_back(std::move(chain));
  }
  return set;
}

FrontMask refine_front_mask(const FrontMask& front, const BoundingBox& bbox, double resolution_m,
                            const LengthPolicy& policy) {
  require_positive_resolution(resolution_m);
  bbox.check_fits(front.rows(), front.cols());
  return filter_short_fronts(mask_bbox(front_chains(front).to_mask(), bbox), policy,
                             resolution_m);
}

FrontMask apply_catchment(const FrontMask& front, const CatchmentMask& catchment, double buffer_m,
                          double resolution_m) {
  require_same_shape(front, catchment, "apply_catchment");
  require_positive_resolution(resolution_m);
  if (!(buffer_m >= 0.0) || !std::isfinite(buffer_m)) {
    throw std::invalid_argument("buffer_m must be finite and >= 0");
  }
  const int radius = static_cast<int>(std::lround(buffer_m / resolution_m));
  return front && !dilate(catchment, StructuringElement::disk(radius));
}

BinaryGrid dilate_front_label(const FrontMask& front, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw std::invalid_argument("front label kernel must be odd and >= 1, got " +
                                std::to_string(kernel));
  }
  return dilate(front, StructuringElement::square(kernel));
}

RealGrid front_distance_map(const FrontMask& front, const DistanceMapParams& params) {
  if (!front.any()) throw std::invalid_argument("distance map of empty front");
  RealGrid d = distance_transform(front);
  if (!params.decay_gamma) return d;
  const double gamma = *params.decay_gamma;
  if (!(gamma > 0.0)) throw std::invalid_argument("decay_gamma must be > 0");
  return (-d / gamma).exp();
}

}  // namespace calfront
