#include "chartlens/pie_seg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chartlens/error.hpp"

namespace chartlens {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double bilinear(const std::vector<std::uint8_t>& gray, int w, int h, double x, double y, double fallback) {
  if (x < 0 || y < 0 || x > w - 1 || y > h - 1) return fallback;
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0, fy = y - y0;
  auto g = [&](int xx, int yy) { return static_cast<double>(gray[static_cast<std::size_t>(yy) * w + xx]); };
  return (1 - fy) * ((1 - fx) * g(x0, y0) + fx * g(x1, y0)) + fy * ((1 - fx) * g(x0, y1) + fx * g(x1, y1));
}

double border_gray(const std::vector<std::uint8_t>& gray, int w, int h) {
  double sum = 0;
  long long n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (x < 2 || y < 2 || x >= w - 2 || y >= h - 2) {
        sum += gray[static_cast<std::size_t>(y) * w + x];
        ++n;
      }
  return sum / static_cast<double>(n);
}

}  // namespace

void PieSegConfig::validate() const {
  if (angle_samples < 180) throw InputError("angle_samples must be >= 180");
  if (radius_samples < 16) throw InputError("radius_samples must be >= 16");
  auto open01 = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw InputError(std::string(name) + " must be in (0, 1)");
  };
  open01(sobel_mag_quantile, "sobel_mag_quantile");
  open01(complete_edge_min_span, "complete_edge_min_span");
  if (!(min_sector_angle_deg > 0)) throw InputError("min_sector_angle must be > 0");
  if (!(inner_ignore_frac >= 0 && inner_ignore_frac < 1)) throw InputError("inner_ignore_frac must be in [0, 1)");
}

UnrolledPie unroll_polar(const ChartImage& img, PointF center, double radius, const PieSegConfig& cfg) {
  cfg.validate();
  if (radius < 8.0) throw SegmentationError("pie too small");
  const auto gray = vision::grayscale(img);
  const double background = border_gray(gray, img.width(), img.height());

  UnrolledPie u;
  u.radius_samples = cfg.radius_samples;
  u.angle_samples = cfg.angle_samples;
  for (int i = 0; i < cfg.radius_samples; ++i) u.radii.push_back(radius * (i + 1) / cfg.radius_samples);
  for (int j = 0; j < cfg.angle_samples; ++j) u.angles.push_back(kTwoPi * j / cfg.angle_samples);
  u.intensities.resize(static_cast<std::size_t>(cfg.radius_samples) * cfg.angle_samples);
  for (int i = 0; i < cfg.radius_samples; ++i) {
    for (int j = 0; j < cfg.angle_samples; ++j) {
      const double x = center.x + u.radii[i] * std::cos(u.angles[j]);
      const double y = center.y + u.radii[i] * std::sin(u.angles[j]);
      u.intensities[static_cast<std::size_t>(i) * cfg.angle_samples + j] =
          bilinear(gray, img.width(), img.height(), x, y, background);
    }
  }
  return u;
}

std::vector<double> detect_sector_edges(const UnrolledPie& u, const PieSegConfig& cfg) {
  cfg.validate();
  const int rows = u.radius_samples, cols = u.angle_samples;
  // Sobel derivative along the angle axis; angles wrap, radii replicate.
  std::vector<double> mag(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int jl = (j - 1 + cols) % cols, jr = (j + 1) % cols;
      double g = 0;
      for (int di = -1; di <= 1; ++di) {
        const int ii = std::clamp(i + di, 0, rows - 1);
        const double weight = di == 0 ? 2.0 : 1.0;
        g += weight * (u.at(ii, jr) - u.at(ii, jl));
      }
      mag[static_cast<std::size_t>(i) * cols + j] = std::abs(g);
    }
  }
  std::vector<double> sorted = mag;
  const auto q_idx = static_cast<std::size_t>(std::floor(cfg.sobel_mag_quantile * static_cast<double>(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q_idx), sorted.end());
  const double threshold = sorted[q_idx];

  const int first_row = static_cast<int>(std::floor(cfg.inner_ignore_frac * rows));
  const int checked = rows - first_row;
  std::vector<int> boundary_cols;
  for (int j = 0; j < cols; ++j) {
    int hits = 0;
    for (int i = first_row; i < rows; ++i)
      if (mag[static_cast<std::size_t>(i) * cols + j] > threshold) ++hits;
    if (hits >= cfg.complete_edge_min_span * checked) boundary_cols.push_back(j);
  }
  if (boundary_cols.empty()) throw SegmentationError("sector boundaries not found");

  // Cluster columns closer than the minimum sector angle, wrapping at 2pi.
  const double step = kTwoPi / cols;
  const double merge = cfg.min_sector_angle_deg * std::numbers::pi / 180.0;
  std::vector<std::vector<int>> clusters;
  for (int j : boundary_cols) {
    if (!clusters.empty() && (j - clusters.back().back()) * step <= merge) {
      clusters.back().push_back(j);
    } else {
      clusters.push_back({j});
    }
  }
  if (clusters.size() > 1 && (clusters.front().front() + cols - clusters.back().back()) * step <= merge) {
    for (int j : clusters.front()) clusters.back().push_back(j + cols);
    clusters.erase(clusters.begin());
  }

  std::vector<double> angles;
  for (const auto& c : clusters) {
    double sum = 0;
    for (int j : c) sum += j * step;
    angles.push_back(wrap_angle(sum / static_cast<double>(c.size())));
  }
  std::sort(angles.begin(), angles.end());
  if (angles.size() < 2) throw SegmentationError("sector boundaries not found");
  return angles;
}

Polygon wedge_polygon(PointF raster_center, double radius, double a0, double a1, Dims dims, double step_deg) {
  const double step = step_deg * std::numbers::pi / 180.0;
  auto to_px = [&](double x, double y) {
    return Point{std::clamp(round_px(x), 0, dims.width), std::clamp(round_px(y), 0, dims.height)};
  };
  Polygon poly;
  poly.vertices.push_back(to_px(raster_center.x, raster_center.y));
  const int n = std::max(1, static_cast<int>(std::ceil((a1 - a0) / step)));
  for (int k = 0; k <= n; ++k) {
    const double a = k == n ? a1 : a0 + k * step;
    const Point p = to_px(raster_center.x + radius * std::cos(a), raster_center.y + radius * std::sin(a));
    if (p != poly.vertices.back()) poly.vertices.push_back(p);
  }
  while (poly.vertices.size() > 1 && poly.vertices.back() == poly.vertices.front()) poly.vertices.pop_back();
  return poly;
}

MarkSet detect_pie(const ChartImage& img, const PieSegConfig& cfg, RefinementBackend& refiner,
                   const RefineConfig& refine_cfg) {
  cfg.validate();
  const auto bin = vision::binarize(img);
  if (bin.uniform) throw SegmentationError("pie too small");
  const auto contours = vision::extract_contours(vision::morph_clean(bin.mask));
  if (contours.empty()) throw SegmentationError("pie too small");
  const auto largest = std::max_element(contours.begin(), contours.end(),
                                        [](const auto& a, const auto& b) { return a.area < b.area; });
  const auto circle = vision::min_enclosing_circle(*largest);
  // Boundary pixels are pixel indices; the painted disc reaches half a
  // pixel further.
  const double radius = circle.radius + 0.5;

  const auto unrolled = unroll_polar(img, circle.center, radius, cfg);
  const auto edges = detect_sector_edges(unrolled, cfg);

  std::vector<std::string> warnings;
  const double fill = static_cast<double>(largest->area) / (std::numbers::pi * radius * radius);
  const bool low_confidence = fill < 0.7;
  if (low_confidence) warnings.emplace_back("largest contour is not disc-shaped; pie detection is low confidence");

  const PointF raster_center{circle.center.x + 0.5, circle.center.y + 0.5};
  std::vector<Mark> marks;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double a0 = edges[i];
    const double a1 = i + 1 < edges.size() ? edges[i + 1] : edges[0] + kTwoPi;
    const std::string label = "S" + std::to_string(marks.size() + 1);
    Region heuristic{ChartKind::Pie, wedge_polygon(raster_center, radius, a0, a1, img.dims()), label};
    const auto& poly = std::get<Polygon>(heuristic.geometry);
    if (!is_simple_polygon(poly) || region_area(heuristic) == 0) {
      warnings.push_back("sector between " + std::to_string(a0) + " and " + std::to_string(a1) +
                         " rad is degenerate and was dropped");
      continue;
    }
    auto refined = refine_region(img, heuristic, refine_cfg, refiner);
    if (refined.warning) warnings.push_back(label + ": " + *refined.warning);
    const double mid = (a0 + a1) / 2.0;
    Mark m;
    m.anchor = {raster_center.x + 0.6 * radius * std::cos(mid), raster_center.y + 0.6 * radius * std::sin(mid)};
    m.region = std::move(refined.region);
    m.refined = refined.refined;
    marks.push_back(std::move(m));
  }
  MarkSet out(img.id(), ChartKind::Pie, img.dims(), std::move(marks), std::move(warnings));
  out.set_low_confidence(low_confidence);
  return out;
}

}  // namespace chartlens
