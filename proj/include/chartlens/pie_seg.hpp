#pragma once

#include <vector>

#include "chartlens/markset.hpp"
#include "chartlens/refine.hpp"
#include "chartlens/vision.hpp"

namespace chartlens {

struct PieSegConfig {
  int angle_samples = 720;
  int radius_samples = 64;
  double sobel_mag_quantile = 0.90;
  double complete_edge_min_span = 0.80;  // fraction of the checked radial rows
  double min_sector_angle_deg = 4.0;
  double inner_ignore_frac = 0.20;       // donut holes: innermost rows are not checked

  void validate() const;
};

/// Grayscale samples on a polar grid: row i is radius radii[i], column j
/// is angle angles[j]. Angles grow clockwise on screen (image y points down).
struct UnrolledPie {
  int radius_samples = 0;
  int angle_samples = 0;
  std::vector<double> radii;   // uniform over (0, r]
  std::vector<double> angles;  // uniform over [0, 2pi)
  std::vector<double> intensities;

  double at(int ri, int ai) const { return intensities[static_cast<std::size_t>(ri) * angle_samples + ai]; }
};

/// `center` is in pixel-index coordinates (pixel (x, y) sits at (x, y)).
/// Throws SegmentationError("pie too small") when radius < 8.
UnrolledPie unroll_polar(const ChartImage& img, PointF center, double radius, const PieSegConfig& cfg);

/// Sorted boundary angles in [0, 2pi). Throws SegmentationError when fewer
/// than two boundaries are found.
std::vector<double> detect_sector_edges(const UnrolledPie& u, const PieSegConfig& cfg);

/// Wedge between angles a0 < a1 (a1 may exceed 2pi) in raster coordinates,
/// arc sampled every `step_deg`, vertices clamped to the image.
Polygon wedge_polygon(PointF raster_center, double radius, double a0, double a1, Dims dims, double step_deg = 2.0);

/// Pie chart mark generation. Labels S1..Sk run clockwise starting at the
/// first boundary angle. Throws SegmentationError.
MarkSet detect_pie(const ChartImage& img, const PieSegConfig& cfg, RefinementBackend& refiner,
                   const RefineConfig& refine_cfg = {});

}  // namespace chartlens
