#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chartlens/geometry.hpp"
#include "chartlens/image.hpp"

namespace chartlens {

/// Mutable RGB drawing surface. Everything is drawn without antialiasing so
/// painted pixels are exactly predictable.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background);
  explicit Canvas(const ChartImage& img);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  void set(int x, int y, Rgb c) noexcept;
  Rgb get(int x, int y) const noexcept;

  void fill_rect(const Box& box, Rgb c);
  /// Paints every set pixel of `mask`, whose origin is `window`'s corner.
  void fill_mask(const BitMask& mask, const Box& window, Rgb c);
  void blend_mask(const BitMask& mask, const Box& window, Rgb c, double alpha);
  void fill_region(const Region& r, Rgb c);
  /// Draws the inner `thickness`-pixel border of the region's raster.
  void outline_region(const Region& r, Rgb c, int thickness);

  /// Bresenham line stamped with a thickness x thickness square brush.
  void draw_line(Point a, Point b, Rgb c, int thickness = 1);

  /// 5x7 bitmap text; (x, y) is the top-left corner.
  void draw_text(int x, int y, std::string_view text, Rgb c, int scale = 1);
  static int text_width(std::string_view text, int scale = 1) noexcept;
  static int text_height(int scale = 1) noexcept;

  ChartImage to_image(std::string id = {}) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

/// Returns the 7 row bitmaps (low 5 bits, MSB = leftmost column) for a
/// character; unknown characters map to '?'.
const std::uint8_t* glyph_rows(char c) noexcept;

}  // namespace chartlens
