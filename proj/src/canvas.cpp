#include "chartlens/canvas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace chartlens {

namespace {

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;

BitMask erode3x3(const BitMask& m) {
  BitMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy)
        for (int dx = -1; dx <= 1 && keep; ++dx)
          if (!m.contains(x + dx, y + dy) || !m.get(x + dx, y + dy)) keep = false;
      out.set(x, y, keep);
    }
  return out;
}

}  // namespace

Canvas::Canvas(int width, int height, Rgb background)
    : width_(width), height_(height), rgb_(static_cast<std::size_t>(width) * height * 3) {
  for (std::size_t i = 0; i < rgb_.size(); i += 3) {
    rgb_[i] = background.r;
    rgb_[i + 1] = background.g;
    rgb_[i + 2] = background.b;
  }
}

Canvas::Canvas(const ChartImage& img)
    : width_(img.width()), height_(img.height()), rgb_(img.pixels().begin(), img.pixels().end()) {}

void Canvas::set(int x, int y, Rgb c) noexcept {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  rgb_[i] = c.r;
  rgb_[i + 1] = c.g;
  rgb_[i + 2] = c.b;
}

Rgb Canvas::get(int x, int y) const noexcept {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Canvas::fill_rect(const Box& box, Rgb c) {
  const Box b = box.clamped({width_, height_});
  for (int y = b.y0; y < b.y1; ++y)
    for (int x = b.x0; x < b.x1; ++x) set(x, y, c);
}

void Canvas::fill_mask(const BitMask& mask, const Box& window, Rgb c) {
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.get(x, y)) set(x + window.x0, y + window.y0, c);
}

void Canvas::blend_mask(const BitMask& mask, const Box& window, Rgb c, double alpha) {
  auto mix = [alpha](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround((1.0 - alpha) * a + alpha * b));
  };
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      const int px = x + window.x0, py = y + window.y0;
      if (!mask.get(x, y) || px < 0 || py < 0 || px >= width_ || py >= height_) continue;
      const Rgb old = get(px, py);
      set(px, py, {mix(old.r, c.r), mix(old.g, c.g), mix(old.b, c.b)});
    }
}

void Canvas::fill_region(const Region& r, Rgb c) {
  const Box window = Box{0, 0, width_, height_};
  fill_mask(rasterize(r, window), window, c);
}

void Canvas::outline_region(const Region& r, Rgb c, int thickness) {
  const Box window = bounding_box(r).expanded(1).clamped({width_, height_});
  if (window.empty()) return;
  const BitMask m = rasterize(r, window);
  BitMask inner = m;
  for (int i = 0; i < thickness; ++i) inner = erode3x3(inner);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.get(x, y) && !inner.get(x, y)) set(x + window.x0, y + window.y0, c);
}

void Canvas::draw_line(Point a, Point b, Rgb c, int thickness) {
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  auto stamp = [&](int x, int y) {
    for (int dy = lo; dy <= hi; ++dy)
      for (int dx = lo; dx <= hi; ++dx) set(x + dx, y + dy, c);
  };
  int x0 = a.x, y0 = a.y;
  const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
  const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    stamp(x0, y0);
    if (x0 == b.x && y0 == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::draw_text(int x, int y, std::string_view text, Rgb c, int scale) {
  int pen = x;
  for (char ch : text) {
    const std::uint8_t* rows = glyph_rows(ch);
    for (int gy = 0; gy < kGlyphH; ++gy)
      for (int gx = 0; gx < kGlyphW; ++gx)
        if (rows[gy] & (1u << (kGlyphW - 1 - gx)))
          fill_rect({pen + gx * scale, y + gy * scale, pen + (gx + 1) * scale, y + (gy + 1) * scale}, c);
    pen += (kGlyphW + 1) * scale;
  }
}

int Canvas::text_width(std::string_view text, int scale) noexcept {
  if (text.empty()) return 0;
  return static_cast<int>(text.size()) * (kGlyphW + 1) * scale - scale;
}

int Canvas::text_height(int scale) noexcept { return kGlyphH * scale; }

ChartImage Canvas::to_image(std::string id) const { return ChartImage(width_, height_, rgb_, std::move(id)); }

}  // namespace chartlens
