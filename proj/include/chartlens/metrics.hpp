#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chartlens/geometry.hpp"

namespace chartlens {

struct EvalConfig {
  double iou_threshold = 0.9;
  /// Throws InputError unless the threshold is in (0, 1].
  void validate() const;
};

struct Match {
  std::size_t detected;
  std::size_t gt;
  double iou;
};

/// Greedy one-to-one matching by descending IoU over pairs with
/// iou >= threshold. Ties break on (detected, gt) index.
std::vector<Match> match_regions(std::span<const Region> detected, std::span<const Region> gt, const EvalConfig& cfg);

/// Ratios in [0, 1].
struct Prf1 {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// P = 0 when nothing was detected; F1 = 0 when P + R = 0. Throws
/// InputError when n_gt is 0.
Prf1 prf1_from_counts(std::size_t matched, std::size_t n_detected, std::size_t n_gt);
Prf1 prf1(std::span<const Region> detected, std::span<const Region> gt, const EvalConfig& cfg);

struct LineScores {
  std::size_t covered = 0;
  std::size_t total = 0;
  long long union_area = 0;
  double detection_rate = 0;  // covered / total
  double area_frac = 0;       // union_area / image area
};

/// Whether a point counts as inside a detected region. Boxes include their
/// far edge (x0 <= x <= x1); other geometries use pixel membership.
bool covers_point(const Region& r, Point p);

LineScores line_metrics(std::span<const Region> detected, std::span<const Point> gt_points, Dims dims);

}  // namespace chartlens
