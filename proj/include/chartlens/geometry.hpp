#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chartlens/image.hpp"

namespace chartlens {

enum class ChartKind { Bar, Pie, Line };

std::string_view to_string(ChartKind kind) noexcept;
/// Accepts "bar", "pie", "line" (case-insensitive); throws InputError otherwise.
ChartKind parse_chart_kind(std::string_view text);

/// Rounds half away from zero; used for every sub-pixel to pixel conversion.
int round_px(double v) noexcept;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct PointF {
  double x = 0;
  double y = 0;
  friend bool operator==(const PointF&, const PointF&) = default;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  long long area() const noexcept { return static_cast<long long>(width()) * height(); }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
  bool contains_pixel(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  Box intersect(const Box& o) const noexcept;
  Box unite(const Box& o) const noexcept;
  Box expanded(int px) const noexcept { return {x0 - px, y0 - px, x1 + px, y1 + px}; }
  Box clamped(Dims d) const noexcept;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Closed polygon; the last vertex connects back to the first. A pixel
/// belongs to the polygon when its centre (x+0.5, y+0.5) is inside by the
/// even-odd crossing rule.
struct Polygon {
  std::vector<Point> vertices;
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

/// Run-length encoded bitmap. Rows are concatenated; runs alternate
/// starting with "off" and sum to width*height.
class RleMask {
 public:
  RleMask() = default;
  RleMask(int width, int height, std::vector<std::uint32_t> runs);

  static RleMask encode(const BitMask& mask);
  /// Parses the space separated counts string used on the wire.
  static RleMask parse(std::string_view counts, int width, int height);

  BitMask decode() const;
  std::string counts_string() const;
  long long count() const noexcept;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Dims dims() const noexcept { return {width_, height_}; }
  const std::vector<std::uint32_t>& runs() const noexcept { return runs_; }

  friend bool operator==(const RleMask&, const RleMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint32_t> runs_;
};

using Geometry = std::variant<Box, Polygon, RleMask>;

struct Region {
  ChartKind kind = ChartKind::Bar;
  Geometry geometry;
  std::optional<std::string> label;

  friend bool operator==(const Region&, const Region&) = default;
};

/// Even-odd crossing test for an arbitrary point.
bool point_in_polygon(const Polygon& poly, double x, double y) noexcept;
bool is_simple_polygon(const Polygon& poly);

/// Tight half-open pixel bounding box of the rasterized geometry.
Box bounding_box(const Region& r);

/// Rasterizes the region into `window` coordinates (mask pixel (0,0) is
/// window corner (x0, y0)). Pixels outside the window are dropped.
BitMask rasterize(const Region& r, const Box& window);
BitMask rasterize(const Region& r, Dims dims);

/// Exact pixel count of the rasterized geometry.
long long region_area(const Region& r);

/// Pixel IoU. Throws IncompatibleChartsError if both regions are masks of
/// different dimensions.
double iou(const Region& a, const Region& b);
/// Same as above, additionally checking mask regions against `dims`.
double iou(const Region& a, const Region& b, Dims dims);

/// Throws InputError when the region violates its invariants on a chart
/// of the given size.
void validate(const Region& r, Dims dims);

/// Centroid of the rasterized pixels (pixel centres).
PointF pixel_centroid(const Region& r);

}  // namespace chartlens
