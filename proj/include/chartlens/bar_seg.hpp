#pragma once

#include <vector>

#include "chartlens/markset.hpp"
#include "chartlens/refine.hpp"
#include "chartlens/vision.hpp"

namespace chartlens {

struct BarSegConfig {
  double min_area_frac = 0.0005;  // of the image area
  double min_solidity = 0.85;
  double rect_fill_min = 0.90;    // component area / bbox area
  double overlap_iou_max = 0.5;
  int expand_px = 5;

  /// Throws InputError when a ratio is outside (0, 1] or min_area_frac >= 0.5.
  void validate() const;
};

/// Per-colour rectangular components inside the contour's expanded bbox.
/// Colours are quantized to 32 levels per channel and the chart background
/// colour is excluded.
std::vector<Region> decompose_by_color(const ChartImage& img, const vision::Contour& c, const BarSegConfig& cfg);

/// Greedy overlap suppression (larger area wins when iou > overlap_iou_max),
/// survivors sorted by (x0, y0).
std::vector<Region> dedup_and_sort(std::vector<Region> regions, const BarSegConfig& cfg);

/// Bar chart mark generation: binarize, clean, contours, area filter,
/// colour decomposition, dedup, refinement. Labels are B1..Bn.
MarkSet detect_bars(const ChartImage& img, const BarSegConfig& cfg, RefinementBackend& refiner,
                    const RefineConfig& refine_cfg = {});

}  // namespace chartlens
