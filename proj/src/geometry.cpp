#include "chartlens/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "chartlens/error.hpp"

namespace chartlens {

std::string_view to_string(ChartKind kind) noexcept {
  switch (kind) {
    case ChartKind::Bar: return "bar";
    case ChartKind::Pie: return "pie";
    case ChartKind::Line: return "line";
  }
  return "bar";
}

ChartKind parse_chart_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bar") return ChartKind::Bar;
  if (lower == "pie") return ChartKind::Pie;
  if (lower == "line") return ChartKind::Line;
  throw InputError("unknown chart kind '" + std::string(text) + "'");
}

int round_px(double v) noexcept { return static_cast<int>(std::lround(v)); }

Box Box::intersect(const Box& o) const noexcept {
  return {std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
}

Box Box::unite(const Box& o) const noexcept {
  if (empty()) return o;
  if (o.empty()) return *this;
  return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

Box Box::clamped(Dims d) const noexcept {
  return {std::clamp(x0, 0, d.width), std::clamp(y0, 0, d.height), std::clamp(x1, 0, d.width),
          std::clamp(y1, 0, d.height)};
}

// ---- RLE ----

RleMask::RleMask(int width, int height, std::vector<std::uint32_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
  if (width <= 0 || height <= 0) throw InputError("mask dimensions must be positive");
  const auto total = std::accumulate(runs_.begin(), runs_.end(), 0ULL);
  if (total != static_cast<unsigned long long>(width) * height) {
    throw InputError("mask run lengths sum to " + std::to_string(total) + ", expected " +
                     std::to_string(static_cast<long long>(width) * height));
  }
}

RleMask RleMask::encode(const BitMask& mask) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t len = 0;
  for (auto b : mask.bits()) {
    if (b != current) {
      runs.push_back(len);
      current = b;
      len = 0;
    }
    ++len;
  }
  runs.push_back(len);
  return RleMask(mask.width(), mask.height(), std::move(runs));
}

RleMask RleMask::parse(std::string_view counts, int width, int height) {
  std::vector<std::uint32_t> runs;
  std::size_t pos = 0;
  while (pos < counts.size()) {
    while (pos < counts.size() && counts[pos] == ' ') ++pos;
    if (pos >= counts.size()) break;
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(counts.data() + pos, counts.data() + counts.size(), v);
    if (ec != std::errc{}) throw InputError("malformed mask_rle counts");
    pos = static_cast<std::size_t>(ptr - counts.data());
    if (pos < counts.size() && counts[pos] != ' ') throw InputError("malformed mask_rle counts");
    runs.push_back(v);
  }
  return RleMask(width, height, std::move(runs));
}

BitMask RleMask::decode() const {
  BitMask out(width_, height_);
  auto bits = out.bits();
  std::size_t pos = 0;
  bool on = false;
  for (auto run : runs_) {
    if (on) std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(pos), run, std::uint8_t{1});
    pos += run;
    on = !on;
  }
  return out;
}

std::string RleMask::counts_string() const {
  std::string out;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(runs_[i]);
  }
  return out;
}

long long RleMask::count() const noexcept {
  long long n = 0;
  for (std::size_t i = 1; i < runs_.size(); i += 2) n += runs_[i];
  return n;
}

// ---- polygons ----

bool point_in_polygon(const Polygon& poly, double x, double y) noexcept {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const double xi = v[i].x, yi = v[i].y, xj = v[j].x, yj = v[j].y;
    if (((yi > y) != (yj > y)) && (x < (xj - xi) * (y - yi) / (yj - yi) + xi)) inside = !inside;
  }
  return inside;
}

namespace {

long long cross(Point o, Point a, Point b) {
  return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point p, Point q, Point r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y &&
         q.y <= std::max(p.y, r.y);
}

int sign(long long v) { return (v > 0) - (v < 0); }

bool segments_intersect(Point p1, Point p2, Point p3, Point p4) {
  const int d1 = sign(cross(p3, p4, p1));
  const int d2 = sign(cross(p3, p4, p2));
  const int d3 = sign(cross(p1, p2, p3));
  const int d4 = sign(cross(p1, p2, p4));
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
  if (d1 == 0 && on_segment(p3, p1, p4)) return true;
  if (d2 == 0 && on_segment(p3, p2, p4)) return true;
  if (d3 == 0 && on_segment(p1, p3, p2)) return true;
  if (d4 == 0 && on_segment(p1, p4, p2)) return true;
  return false;
}

}  // namespace

bool is_simple_polygon(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a1 = v[i], a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point b1 = v[j], b2 = v[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbouring edges may only share their common vertex; a fold back
        // along the same line is an overlap.
        const Point shared = (j == i + 1) ? a2 : a1;
        const Point other_a = (j == i + 1) ? a1 : a2;
        const Point other_b = (j == i + 1) ? b2 : b1;
        if (cross(shared, other_a, other_b) == 0) {
          const long long dot = static_cast<long long>(other_a.x - shared.x) * (other_b.x - shared.x) +
                                static_cast<long long>(other_a.y - shared.y) * (other_b.y - shared.y);
          if (dot > 0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

namespace {

/// Conservative pixel bounds that always contain the raster.
Box loose_bounds(const Region& r) {
  return std::visit(
      [](const auto& g) -> Box {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Box>) {
          return g;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          if (g.vertices.empty()) return {};
          Box b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
          for (const auto& p : g.vertices) {
            b.x0 = std::min(b.x0, p.x);
            b.y0 = std::min(b.y0, p.y);
            b.x1 = std::max(b.x1, p.x);
            b.y1 = std::max(b.y1, p.y);
          }
          return b;
        } else {
          // Tight bounds straight from the runs.
          Box b{g.width(), g.height(), 0, 0};
          std::size_t pos = 0;
          bool on = false;
          for (auto run : g.runs()) {
            if (on && run > 0) {
              const auto first = pos, last = pos + run - 1;
              const int fy = static_cast<int>(first / g.width()), ly = static_cast<int>(last / g.width());
              b.y0 = std::min(b.y0, fy);
              b.y1 = std::max(b.y1, ly + 1);
              if (fy != ly) {
                b.x0 = 0;
                b.x1 = g.width();
              } else {
                b.x0 = std::min(b.x0, static_cast<int>(first % g.width()));
                b.x1 = std::max(b.x1, static_cast<int>(last % g.width()) + 1);
              }
            }
            pos += run;
            on = !on;
          }
          return b.empty() ? Box{} : b;
        }
      },
      r.geometry);
}

void rasterize_polygon(const Polygon& poly, const Box& window, BitMask& out) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return;
  std::vector<double> xs;
  for (int y = window.y0; y < window.y1; ++y) {
    const double py = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      const double xi = v[i].x, yi = v[i].y, xj = v[j].x, yj = v[j].y;
      if ((yi > py) != (yj > py)) xs.push_back((xj - xi) * (py - yi) / (yj - yi) + xi);
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    // A pixel centre is inside when an odd number of crossings lie strictly
    // to its right.
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Crossings strictly greater than px: inside for px in [xs[k], xs[k+1]).
      const int first = std::max(window.x0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int last = std::min(window.x1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
      for (int x = first; x < last; ++x) out.set(x - window.x0, y - window.y0);
    }
  }
}

}  // namespace

BitMask rasterize(const Region& r, const Box& window) {
  BitMask out(std::max(window.width(), 0), std::max(window.height(), 0));
  if (window.empty()) return out;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Box>) {
          const Box c = g.intersect(window);
          for (int y = c.y0; y < c.y1; ++y)
            for (int x = c.x0; x < c.x1; ++x) out.set(x - window.x0, y - window.y0);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          rasterize_polygon(g, window, out);
        } else {
          std::size_t pos = 0;
          bool on = false;
          const auto w = static_cast<std::size_t>(g.width());
          for (auto run : g.runs()) {
            if (on) {
              for (std::size_t p = pos; p < pos + run;) {
                const int y = static_cast<int>(p / w);
                const int x = static_cast<int>(p % w);
                const std::size_t row_end = std::min<std::size_t>(pos + run, (static_cast<std::size_t>(y) + 1) * w);
                if (y >= window.y0 && y < window.y1) {
                  const int xe = x + static_cast<int>(row_end - p);
                  for (int xx = std::max(x, window.x0); xx < std::min(xe, window.x1); ++xx)
                    out.set(xx - window.x0, y - window.y0);
                }
                p = row_end;
              }
            }
            pos += run;
            on = !on;
          }
        }
      },
      r.geometry);
  return out;
}

BitMask rasterize(const Region& r, Dims dims) { return rasterize(r, Box{0, 0, dims.width, dims.height}); }

Box bounding_box(const Region& r) {
  if (const auto* b = std::get_if<Box>(&r.geometry)) return *b;
  if (std::holds_alternative<RleMask>(r.geometry)) return loose_bounds(r);
  const Box loose = loose_bounds(r);
  const BitMask m = rasterize(r, loose);
  Box tight{m.width(), m.height(), 0, 0};
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.get(x, y)) {
        tight.x0 = std::min(tight.x0, x);
        tight.y0 = std::min(tight.y0, y);
        tight.x1 = std::max(tight.x1, x + 1);
        tight.y1 = std::max(tight.y1, y + 1);
      }
  if (tight.empty()) return {};
  return {tight.x0 + loose.x0, tight.y0 + loose.y0, tight.x1 + loose.x0, tight.y1 + loose.y0};
}

long long region_area(const Region& r) {
  if (const auto* b = std::get_if<Box>(&r.geometry)) return b->empty() ? 0 : b->area();
  if (const auto* m = std::get_if<RleMask>(&r.geometry)) return m->count();
  return rasterize(r, loose_bounds(r)).count();
}

namespace {

const RleMask* mask_of(const Region& r) { return std::get_if<RleMask>(&r.geometry); }

}  // namespace

double iou(const Region& a, const Region& b) {
  const auto* ma = mask_of(a);
  const auto* mb = mask_of(b);
  if (ma && mb && ma->dims() != mb->dims()) {
    throw IncompatibleChartsError("iou: masks come from charts of different sizes");
  }
  const auto* ba = std::get_if<Box>(&a.geometry);
  const auto* bb = std::get_if<Box>(&b.geometry);
  if (ba && bb) {
    const Box i = ba->intersect(*bb);
    const long long inter = i.empty() ? 0 : i.area();
    const long long uni = ba->area() + bb->area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
  }
  const Box window = loose_bounds(a).unite(loose_bounds(b));
  if (window.empty()) return 0.0;
  const BitMask ra = rasterize(a, window);
  const BitMask rb = rasterize(b, window);
  long long inter = 0, uni = 0;
  const auto bits_a = ra.bits();
  const auto bits_b = rb.bits();
  for (std::size_t i = 0; i < bits_a.size(); ++i) {
    inter += bits_a[i] & bits_b[i];
    uni += bits_a[i] | bits_b[i];
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double iou(const Region& a, const Region& b, Dims dims) {
  for (const Region* r : {&a, &b}) {
    if (const auto* m = mask_of(*r); m && m->dims() != dims) {
      throw IncompatibleChartsError("iou: mask dimensions do not match the chart");
    }
  }
  return iou(a, b);
}

void validate(const Region& r, Dims dims) {
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (!(g.x0 < g.x1 && g.y0 < g.y1)) throw InputError("box must satisfy x0<x1 and y0<y1");
          if (g.x0 < 0 || g.y0 < 0 || g.x1 > dims.width || g.y1 > dims.height)
            throw InputError("box lies outside the chart");
        } else if constexpr (std::is_same_v<T, Polygon>) {
          if (g.vertices.size() < 3) throw InputError("polygon needs at least 3 vertices");
          for (const auto& p : g.vertices) {
            if (p.x < 0 || p.y < 0 || p.x > dims.width || p.y > dims.height)
              throw InputError("polygon vertex lies outside the chart");
          }
          if (!is_simple_polygon(g)) throw InputError("polygon is self-intersecting");
        } else {
          if (g.dims() != dims) throw InputError("mask dimensions do not match the chart");
        }
      },
      r.geometry);
}

PointF pixel_centroid(const Region& r) {
  const Box window = loose_bounds(r);
  const BitMask m = rasterize(r, window);
  double sx = 0, sy = 0;
  long long n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.get(x, y)) {
        sx += x + 0.5;
        sy += y + 0.5;
        ++n;
      }
  if (n == 0) return {window.x0 + window.width() / 2.0, window.y0 + window.height() / 2.0};
  return {window.x0 + sx / n, window.y0 + sy / n};
}

}  // namespace chartlens
