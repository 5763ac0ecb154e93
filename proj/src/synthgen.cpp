#include "chartlens/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "chartlens/attribute.hpp"
#include "chartlens/canvas.hpp"
#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"
#include "chartlens/json_io.hpp"
#include "chartlens/metrics.hpp"

namespace chartlens {

std::string_view to_string(BarLayout v) noexcept {
  switch (v) {
    case BarLayout::Simple: return "simple";
    case BarLayout::Grouped: return "grouped";
    case BarLayout::Stacked: return "stacked";
  }
  return "simple";
}

std::string_view to_string(Theme v) noexcept { return v == Theme::Dark ? "dark" : "light"; }

Theme parse_theme(std::string_view text) {
  const std::string t = to_upper(text);
  if (t == "LIGHT") return Theme::Light;
  if (t == "DARK") return Theme::Dark;
  throw InputError("unknown theme '" + std::string(text) + "'");
}

int channel_distance(Rgb a, Rgb b) noexcept {
  return std::max({std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)});
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raw mt19937_64 output is fully specified, so everything derived from it
// here is reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  int uniform_int(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53); }
  bool coin() { return (next() >> 63) != 0; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(next() % i)]);
  }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Colors {
  Rgb bg, axis, grid, text;
};

Colors theme_colors(Theme t) {
  if (t == Theme::Dark) return {{28, 30, 36}, {190, 190, 190}, {62, 64, 70}, {190, 190, 190}};
  return {{255, 255, 255}, {70, 70, 70}, {225, 225, 225}, {70, 70, 70}};
}

const std::vector<Rgb>& fill_pool() {
  static const std::vector<Rgb> pool = {
      {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},  {148, 103, 189},
      {140, 86, 75},  {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
  };
  return pool;
}

const std::vector<Rgb>& line_pool() {
  static const std::vector<Rgb> pool = {
      {220, 40, 40}, {40, 90, 220}, {30, 160, 60}, {240, 140, 20}, {150, 50, 200},
  };
  return pool;
}

// Plot rectangle inside the canvas margins.
Box plot_area(const ChartSpec& s) { return {70, 40, s.width - 30, s.height - 60}; }

std::string format_value(double v) {
  std::ostringstream os;
  if (std::abs(v - std::round(v)) < 1e-9) {
    os << static_cast<long long>(std::llround(v));
  } else {
    os.precision(1);
    os << std::fixed << v;
  }
  return os.str();
}

double nice_step(double max_value) {
  const double raw = max_value / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10 * mag;
}

struct ValueAxis {
  double max = 1;
  double step = 1;
};

ValueAxis make_axis(double max_value) {
  ValueAxis a;
  a.step = nice_step(std::max(max_value, 1e-9));
  a.max = std::ceil(max_value / a.step) * a.step;
  if (a.max <= 0) a.max = a.step;
  return a;
}

// Draws the frame shared by bar and line charts: grid, axes, ticks, labels.
// `vertical` means values grow upwards along y.
void draw_frame(Canvas& c, const ChartSpec& s, const Colors& col, const ValueAxis& axis, bool vertical,
                const std::vector<int>& category_centres) {
  const Box p = plot_area(s);
  const int fs = s.style.font_scale;
  const int th = Canvas::text_height(fs);
  c.draw_text(p.x0, 12, "SYNTHETIC CHART", col.text, fs);
  for (double v = axis.step; v <= axis.max + 1e-9; v += axis.step) {
    const std::string label = format_value(v);
    if (vertical) {
      const int y = p.y1 - round_px(v / axis.max * p.height());
      if (s.style.grid) c.fill_rect({p.x0, y, p.x1, y + 1}, col.grid);
      if (s.style.ticks) c.fill_rect({p.x0 - 6, y, p.x0 - 2, y + 1}, col.axis);
      c.draw_text(p.x0 - 10 - Canvas::text_width(label, fs), y - th / 2, label, col.text, fs);
    } else {
      const int x = p.x0 + round_px(v / axis.max * p.width());
      if (s.style.grid) c.fill_rect({x, p.y0, x + 1, p.y1}, col.grid);
      if (s.style.ticks) c.fill_rect({x, p.y1 + 2, x + 1, p.y1 + 6}, col.axis);
      c.draw_text(x - Canvas::text_width(label, fs) / 2, p.y1 + 10, label, col.text, fs);
    }
  }
  // Axes sit just outside the plot so bars can touch them without overlap.
  c.fill_rect({p.x0 - 2, p.y0, p.x0, p.y1 + 2}, col.axis);
  c.fill_rect({p.x0 - 2, p.y1, p.x1, p.y1 + 2}, col.axis);
  for (std::size_t i = 0; i < category_centres.size() && i < s.categories.size(); ++i) {
    const std::string& name = s.categories[i];
    if (vertical) {
      c.draw_text(category_centres[i] - Canvas::text_width(name, fs) / 2, p.y1 + 10, name, col.text, fs);
    } else {
      c.draw_text(p.x0 - 10 - Canvas::text_width(name, fs), category_centres[i] - th / 2, name, col.text, fs);
    }
  }
}

}  // namespace

void ChartSpec::validate() const {
  if (width < 200 || height < 150) throw InputError("canvas must be at least 200x150");
  if (series.empty()) throw InputError("chart needs at least one series");
  for (const auto& s : series) {
    if (s.values.size() != categories.size())
      throw InputError("series '" + s.name + "' has " + std::to_string(s.values.size()) + " values for " +
                       std::to_string(categories.size()) + " categories");
    for (double v : s.values)
      if (!std::isfinite(v)) throw InputError("series '" + s.name + "' has a non-finite value");
  }
  const std::size_t colors_needed = kind == ChartKind::Pie ? categories.size() : series.size();
  if (palette.size() < colors_needed) throw InputError("palette has too few colours");
  for (std::size_t i = 0; i < palette.size(); ++i)
    for (std::size_t j = i + 1; j < palette.size(); ++j)
      if (channel_distance(palette[i], palette[j]) < 48) throw InputError("palette colours are too similar");
  if (style.font_scale < 1 || style.font_scale > 3) throw InputError("font_scale must be 1..3");
  switch (kind) {
    case ChartKind::Bar:
      if (categories.empty()) throw InputError("bar chart needs at least one category");
      for (const auto& s : series)
        for (double v : s.values)
          if (v < 0) throw InputError("bar values must be >= 0");
      if (layout == BarLayout::Simple && series.size() != 1) throw InputError("simple bar chart has one series");
      break;
    case ChartKind::Pie:
      if (series.size() != 1) throw InputError("pie chart has exactly one series");
      if (categories.size() < 2) throw InputError("pie chart needs at least 2 sectors");
      for (double v : series[0].values)
        if (!(v > 0)) throw InputError("pie values must be > 0");
      break;
    case ChartKind::Line:
      if (categories.size() < 2) throw InputError("line chart needs at least 2 x values");
      break;
  }
}

GeneratedChart gen_bar_chart(const ChartSpec& spec) {
  spec.validate();
  if (spec.kind != ChartKind::Bar) throw InputError("not a bar chart spec");
  const Colors col = theme_colors(spec.theme);
  const Box p = plot_area(spec);
  const bool vertical = spec.orientation == Orientation::Vertical;
  const int n = static_cast<int>(spec.categories.size());
  const int k = static_cast<int>(spec.series.size());

  double max_value = 0;
  for (int i = 0; i < n; ++i) {
    double stack = 0;
    for (const auto& s : spec.series) {
      if (spec.layout == BarLayout::Stacked) {
        stack += s.values[i];
      } else {
        stack = std::max(stack, s.values[i]);
      }
    }
    max_value = std::max(max_value, stack);
  }
  const ValueAxis axis = make_axis(max_value);
  const int cat_extent = vertical ? p.width() : p.height();
  const int val_extent = vertical ? p.height() : p.width();
  const double slot = static_cast<double>(cat_extent) / n;
  const double group = 0.7 * slot;
  const int per_group = spec.layout == BarLayout::Grouped ? k : 1;
  if (group / per_group < 4.0) throw InputError("too many bars for canvas");

  auto len = [&](double v) { return round_px(v / axis.max * val_extent); };

  struct Bar {
    Box box;
    int category;
    int series;
  };
  std::vector<Bar> bars;
  std::vector<std::string> notes;
  std::vector<int> centres;
  const int cat_origin = vertical ? p.x0 : p.y0;
  for (int i = 0; i < n; ++i) {
    const double g0 = cat_origin + i * slot + (slot - group) / 2.0;
    centres.push_back(round_px(cat_origin + (i + 0.5) * slot));
    int stacked = 0;
    for (int s = 0; s < k; ++s) {
      const double v = spec.series[s].values[i];
      const int a = spec.layout == BarLayout::Grouped ? round_px(g0 + group * s / k) : round_px(g0);
      const int b = spec.layout == BarLayout::Grouped ? round_px(g0 + group * (s + 1) / k) : round_px(g0 + group);
      int lo = stacked, hi = stacked + len(v);
      if (spec.layout == BarLayout::Stacked) {
        double cum = 0;
        for (int t = 0; t <= s; ++t) cum += spec.series[t].values[i];
        hi = len(cum);
        lo = stacked;
        stacked = hi;
      } else {
        lo = 0;
        hi = len(v);
      }
      if (hi <= lo) {
        notes.push_back("category " + spec.categories[i] + " series " + spec.series[s].name +
                        " has no visible bar; gt region omitted");
        continue;
      }
      Box box = vertical ? Box{a, p.y1 - hi, b, p.y1 - lo} : Box{p.x0 + lo, a, p.x0 + hi, b};
      bars.push_back({box, i, s});
    }
  }

  Canvas canvas(spec.width, spec.height, col.bg);
  draw_frame(canvas, spec, col, axis, vertical, centres);
  for (const auto& bar : bars) canvas.fill_rect(bar.box, spec.palette[bar.series]);

  std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    return std::tie(a.box.x0, a.box.y0) < std::tie(b.box.x0, b.box.y0);
  });
  std::vector<Mark> marks;
  std::vector<std::pair<int, int>> items;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    Mark m;
    m.region = Region{ChartKind::Bar, bars[i].box, "B" + std::to_string(i + 1)};
    m.anchor = pixel_centroid(m.region);
    marks.push_back(std::move(m));
    items.emplace_back(bars[i].category, bars[i].series);
  }
  const std::string id = "synth-bar-" + std::to_string(spec.seed);
  GeneratedChart out{canvas.to_image(id), MarkSet(id, ChartKind::Bar, {spec.width, spec.height}, std::move(marks)),
                     std::move(items), {}, {}, std::move(notes)};
  return out;
}

namespace {

struct PieGeometry {
  PointF centre;  // raster coordinates
  double radius;
};

PieGeometry pie_geometry(const ChartSpec& s) {
  const double r = std::floor(0.34 * std::min(s.width, s.height));
  return {{std::floor(s.width / 2.0) + 0.5, std::floor(s.height / 2.0) + 10.5}, r};
}

}  // namespace

GeneratedChart gen_pie_chart(const ChartSpec& spec) {
  spec.validate();
  if (spec.kind != ChartKind::Pie) throw InputError("not a pie chart spec");
  const Colors col = theme_colors(spec.theme);
  const auto& values = spec.series[0].values;
  double total = 0;
  for (double v : values) total += v;
  const int n = static_cast<int>(values.size());
  std::vector<double> edges{spec.pie_start_deg * kPi / 180.0};
  for (int i = 0; i < n; ++i) {
    const double sweep = values[i] / total * kTwoPi;
    if (sweep < 2.0 * kPi / 180.0)
      throw InputError("sector " + spec.categories[i] + " is below the 2 degree minimum");
    edges.push_back(edges.back() + sweep);
  }
  edges.back() = edges.front() + kTwoPi;

  const auto geo = pie_geometry(spec);
  const Dims dims{spec.width, spec.height};
  Canvas canvas(spec.width, spec.height, col.bg);
  const int fs = spec.style.font_scale;
  canvas.draw_text(20, 12, "SYNTHETIC PIE", col.text, fs);

  struct Wedge {
    double a0;
    Region region;
    int category;
  };
  std::vector<Wedge> wedges;
  for (int i = 0; i < n; ++i) {
    Region r{ChartKind::Pie, wedge_polygon(geo.centre, geo.radius, edges[i], edges[i + 1], dims, 1.0), std::nullopt};
    canvas.fill_region(r, spec.palette[i]);
    double a0 = std::fmod(edges[i], kTwoPi);
    if (a0 < 0) a0 += kTwoPi;
    wedges.push_back({a0, std::move(r), i});
  }
  if (spec.style.pie_borders) {
    for (int i = 0; i < n; ++i) {
      const Point a{static_cast<int>(std::floor(geo.centre.x)), static_cast<int>(std::floor(geo.centre.y))};
      const Point b{static_cast<int>(std::floor(geo.centre.x + geo.radius * std::cos(edges[i]))),
                    static_cast<int>(std::floor(geo.centre.y + geo.radius * std::sin(edges[i])))};
      canvas.draw_line(a, b, col.bg, 1);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double mid = (edges[i] + edges[i + 1]) / 2.0;
    const std::string label = spec.categories[i] + " " + format_value(std::round(values[i] / total * 1000.0) / 10.0) + "%";
    const double lx = geo.centre.x + 1.12 * geo.radius * std::cos(mid);
    const double ly = geo.centre.y + 1.12 * geo.radius * std::sin(mid);
    const int w = Canvas::text_width(label, fs), h = Canvas::text_height(fs);
    int x = std::cos(mid) >= 0 ? round_px(lx) : round_px(lx) - w;
    int y = std::sin(mid) >= 0 ? round_px(ly) : round_px(ly) - h;
    x = std::clamp(x, 0, std::max(0, spec.width - w));
    y = std::clamp(y, 0, std::max(0, spec.height - h));
    canvas.draw_text(x, y, label, col.text, fs);
  }

  std::stable_sort(wedges.begin(), wedges.end(), [](const Wedge& a, const Wedge& b) { return a.a0 < b.a0; });
  std::vector<Mark> marks;
  std::vector<std::pair<int, int>> items;
  std::vector<double> boundaries;
  for (std::size_t i = 0; i < wedges.size(); ++i) {
    Mark m;
    m.region = wedges[i].region;
    m.region.label = "S" + std::to_string(i + 1);
    const int c = wedges[i].category;
    const double mid = (edges[c] + edges[c + 1]) / 2.0;
    m.anchor = {geo.centre.x + 0.6 * geo.radius * std::cos(mid), geo.centre.y + 0.6 * geo.radius * std::sin(mid)};
    marks.push_back(std::move(m));
    items.emplace_back(c, 0);
    boundaries.push_back(wedges[i].a0);
  }
  const std::string id = "synth-pie-" + std::to_string(spec.seed);
  return GeneratedChart{canvas.to_image(id), MarkSet(id, ChartKind::Pie, dims, std::move(marks)), std::move(items), {},
                        std::move(boundaries), {}};
}

GeneratedChart gen_line_chart(const ChartSpec& spec) {
  spec.validate();
  if (spec.kind != ChartKind::Line) throw InputError("not a line chart spec");
  const Colors col = theme_colors(spec.theme);
  const Box p = plot_area(spec);
  const int n = static_cast<int>(spec.categories.size());
  double max_value = 0;
  for (const auto& s : spec.series)
    for (double v : s.values) max_value = std::max(max_value, v);
  const ValueAxis axis = make_axis(max_value);
  const double slot = static_cast<double>(p.width()) / n;

  std::vector<int> xs;
  for (int i = 0; i < n; ++i) xs.push_back(p.x0 + round_px((i + 0.5) * slot));

  std::vector<LineTrace> traces;
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    LineTrace t;
    t.series_id = static_cast<int>(s) + 1;
    for (int i = 0; i < n; ++i) {
      const double v = std::max(0.0, spec.series[s].values[i]);
      t.points.push_back({xs[i], std::min(p.y1 - 1, p.y1 - round_px(v / axis.max * p.height()))});
    }
    traces.push_back(std::move(t));
  }

  Canvas canvas(spec.width, spec.height, col.bg);
  draw_frame(canvas, spec, col, axis, true, xs);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    const auto& pts = traces[s].points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) canvas.draw_line(pts[i], pts[i + 1], spec.palette[s], 3);
  }
  const std::string id = "synth-line-" + std::to_string(spec.seed);
  return GeneratedChart{canvas.to_image(id), MarkSet(id, ChartKind::Line, {spec.width, spec.height}, {}), {},
                        std::move(traces), {}, {}};
}

GeneratedChart generate_chart(const ChartSpec& spec) {
  switch (spec.kind) {
    case ChartKind::Bar: return gen_bar_chart(spec);
    case ChartKind::Pie: return gen_pie_chart(spec);
    case ChartKind::Line: return gen_line_chart(spec);
  }
  throw InputError("unknown chart kind");
}

namespace {

const std::vector<std::string>& category_names() {
  static const std::vector<std::string> names = {"NORTH", "SOUTH", "EAST",  "WEST",  "ALPHA", "BETA",
                                                 "GAMMA", "DELTA", "OSLO",  "LIMA",  "ROME",  "KIEV",
                                                 "APPLE", "PEAR",  "PLUM",  "FIG",   "CORN",  "RICE"};
  return names;
}

std::vector<std::string> pick_names(Rng& rng, int n) {
  auto names = category_names();
  rng.shuffle(names);
  names.resize(static_cast<std::size_t>(n));
  return names;
}

// Colours with enough contrast to the background and to each other.
std::vector<Rgb> pick_palette(Rng& rng, const std::vector<Rgb>& pool, Theme theme, int n) {
  const Rgb bg = theme_colors(theme).bg;
  std::vector<Rgb> candidates;
  for (const auto& c : pool)
    if (std::abs(luminance(c) - luminance(bg)) >= 60.0) candidates.push_back(c);
  rng.shuffle(candidates);
  std::vector<Rgb> out;
  for (const auto& c : candidates) {
    if (static_cast<int>(out.size()) == n) break;
    if (std::all_of(out.begin(), out.end(), [&](Rgb o) { return channel_distance(o, c) >= 48; })) out.push_back(c);
  }
  if (static_cast<int>(out.size()) < n) throw InputError("palette pool cannot supply " + std::to_string(n) + " colours");
  return out;
}

// Pie sector borders are found on grayscale, so neighbouring sectors need
// distinct gray levels.
bool neighbours_separable(const std::vector<Rgb>& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(luminance(p[i]) - luminance(p[(i + 1) % p.size()])) < 12.0) return false;
  return true;
}

std::vector<double> random_shares(Rng& rng, int n, double min_deg) {
  // Each sector gets the minimum plus a random part of the remainder.
  const double free = 360.0 - n * min_deg;
  if (free < 0) throw InputError("sectors cannot all reach the minimum angle");
  std::vector<double> w(static_cast<std::size_t>(n));
  double sum = 0;
  for (auto& x : w) sum += (x = rng.uniform(0.05, 1.0));
  std::vector<double> out;
  for (double x : w) out.push_back(std::round((min_deg + free * x / sum) * 10.0) / 10.0);
  return out;
}

}  // namespace

ChartSpec random_spec(ChartKind kind, std::uint64_t seed, const RandomSpecOptions& opts) {
  Rng rng(mix(seed ^ (static_cast<std::uint64_t>(kind) << 56)));
  ChartSpec s;
  s.kind = kind;
  s.seed = seed;
  s.width = opts.width;
  s.height = opts.height;
  s.theme = opts.theme ? *opts.theme : (rng.coin() ? Theme::Dark : Theme::Light);
  s.style.grid = rng.coin();
  s.style.ticks = rng.coin();
  s.style.font_scale = rng.uniform_int(1, 2);

  switch (kind) {
    case ChartKind::Bar: {
      s.layout = static_cast<BarLayout>(rng.uniform_int(0, 2));
      s.orientation = rng.coin() ? Orientation::Horizontal : Orientation::Vertical;
      const int max_bars = std::max(1, opts.max_bars);
      int k = 1, n = 1;
      if (s.layout == BarLayout::Simple) {
        n = rng.uniform_int(std::min(3, max_bars), max_bars);
      } else {
        k = rng.uniform_int(2, 3);
        n = rng.uniform_int(2, std::max(2, s.layout == BarLayout::Grouped ? max_bars / k : std::min(6, max_bars / k)));
      }
      s.categories = pick_names(rng, n);
      s.palette = pick_palette(rng, fill_pool(), s.theme, k);
      for (int i = 0; i < k; ++i) {
        Series ser{"SERIES " + std::string(1, static_cast<char>('A' + i)), {}};
        for (int c = 0; c < n; ++c)
          ser.values.push_back(s.layout == BarLayout::Stacked ? rng.uniform_int(10, 100) : rng.uniform_int(5, 100));
        s.series.push_back(std::move(ser));
      }
      break;
    }
    case ChartKind::Pie: {
      const int n = opts.sectors ? *opts.sectors : rng.uniform_int(opts.min_sectors, opts.max_sectors);
      if (n < 2) throw InputError("pie chart needs at least 2 sectors");
      if (n > static_cast<int>(category_names().size())) throw InputError("too many sectors");
      s.categories = pick_names(rng, n);
      s.palette = pick_palette(rng, fill_pool(), s.theme, n);
      for (int attempt = 0; attempt < 500 && !neighbours_separable(s.palette); ++attempt) rng.shuffle(s.palette);
      s.series.push_back({"SHARE", random_shares(rng, n, opts.min_sector_deg)});
      s.pie_start_deg = rng.uniform_int(0, 359);
      s.style.pie_borders = rng.coin();
      break;
    }
    case ChartKind::Line: {
      const int k = rng.uniform_int(opts.min_line_series, opts.max_line_series);
      const int n = rng.uniform_int(5, 12);
      const int first_year = rng.uniform_int(1990, 2010);
      for (int i = 0; i < n; ++i) s.categories.push_back(std::to_string(first_year + i));
      // Line colours need distinct hues, not just distinct channels.
      auto pool = line_pool();
      rng.shuffle(pool);
      pool.resize(static_cast<std::size_t>(k));
      s.palette = pool;
      for (int i = 0; i < k; ++i) {
        Series ser{"SERIES " + std::string(1, static_cast<char>('A' + i)), {}};
        double v = rng.uniform(20, 80);
        for (int c = 0; c < n; ++c) {
          ser.values.push_back(std::round(v));
          v = std::clamp(v + rng.uniform(-18, 18), 5.0, 95.0);
        }
        s.series.push_back(std::move(ser));
      }
      break;
    }
  }
  s.validate();
  return s;
}

namespace {

std::string scripted_reply(const std::string& evidence, const std::string& attribution) {
  return "Step 1: I read the marked chart.\nStep 2: " + evidence +
         "\nStep 3: The answer agrees with the chart.\nVALIDATION: CONSISTENT\nATTRIBUTION: [" + attribution + "]";
}

std::string best_label(const MarkSet& marks, const Region& target) {
  double best = 0;
  std::string label;
  for (const auto& m : marks.marks()) {
    const double v = iou(m.region, target);
    if (v > best) {
      best = v;
      label = m.label();
    }
  }
  return label;
}

}  // namespace

GeneratedRecord make_record(const ChartSpec& spec, const GeneratedChart& chart, const std::string& id,
                            const std::filesystem::path& chart_path) {
  Rng rng(mix(spec.seed ^ fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(id.data()), id.size()))));
  GeneratedRecord out;
  DatasetRecord& r = out.record;
  r.id = id;
  r.chart_path = chart_path;
  r.kind = spec.kind;
  IdentityRefiner identity;

  if (spec.kind == ChartKind::Bar || spec.kind == ChartKind::Pie) {
    if (chart.gt.empty()) throw InputError("chart " + id + " has no ground-truth regions");
    std::size_t target = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(chart.gt.size()) - 1));
    const auto [cat, ser] = chart.gt_items[target];
    const double value = spec.series[ser].values[cat];
    if (spec.kind == ChartKind::Bar) {
      if (spec.layout == BarLayout::Simple && rng.coin()) {
        target = 0;
        for (std::size_t i = 1; i < chart.gt.size(); ++i) {
          const auto [c, s] = chart.gt_items[i];
          const auto [bc, bs] = chart.gt_items[target];
          if (spec.series[s].values[c] > spec.series[bs].values[bc]) target = i;
        }
        r.question = "Which category has the highest value?";
        r.answer = spec.categories[chart.gt_items[target].first] + " has the highest value.";
      } else {
        r.question = "What is the value of " + spec.categories[cat] +
                     (spec.series.size() > 1 ? " for " + spec.series[ser].name : std::string()) + "?";
        r.answer = "The value is " + format_value(value) + ".";
      }
    } else {
      double total = 0;
      for (double v : spec.series[0].values) total += v;
      r.question = "What share of the total is " + spec.categories[cat] + "?";
      r.answer = spec.categories[cat] + " is " + format_value(std::round(value / total * 1000.0) / 10.0) + "%.";
    }
    Region gt = chart.gt[target].region;
    gt.label.reset();
    r.gt_regions.push_back(gt);

    std::string label;
    try {
      const MarkSet detected = spec.kind == ChartKind::Bar ? detect_bars(chart.image, {}, identity)
                                                           : detect_pie(chart.image, {}, identity);
      label = best_label(detected, gt);
    } catch (const SegmentationError&) {
    }
    out.mock_response = scripted_reply("The relevant element is marked " + (label.empty() ? "nowhere" : label) + ".", label);
    return out;
  }

  // Line: a span of one series between two x positions.
  const int s = rng.uniform_int(0, static_cast<int>(spec.series.size()) - 1);
  const int n = static_cast<int>(spec.categories.size());
  const int a = rng.uniform_int(0, n - 3);
  const int b = rng.uniform_int(a + 2, n - 1);
  const auto& vals = spec.series[s].values;
  r.question = "How does " + spec.series[s].name + " change from " + spec.categories[a] + " to " + spec.categories[b] + "?";
  r.answer = std::string(vals[b] >= vals[a] ? "It rises" : "It falls") + " from " + format_value(vals[a]) + " to " +
             format_value(vals[b]) + ".";
  for (int i = a; i <= b; ++i) r.gt_points.push_back(chart.traces[s].points[i]);

  const LineMarkConfig line_cfg;
  std::string pair;
  try {
    ColorTraceExtractor extractor(line_cfg);
    const MarkSet marks = detect_lines(chart.image, line_cfg, extractor);
    std::size_t best_cover = 0;
    long long best_area = 0;
    for (std::size_t i = 0; i < marks.size(); ++i)
      for (std::size_t j = i; j < marks.size(); ++j) {
        if (marks[i].series != marks[j].series) continue;
        const Box box = anchor_pair_box(marks[i].anchor, marks[j].anchor, line_cfg.dilate_px, chart.image.dims());
        const Region reg{ChartKind::Line, box, std::nullopt};
        const auto cover = static_cast<std::size_t>(
            std::count_if(r.gt_points.begin(), r.gt_points.end(), [&](Point p) { return covers_point(reg, p); }));
        if (cover > best_cover || (cover == best_cover && cover > 0 && box.area() < best_area)) {
          best_cover = cover;
          best_area = box.area();
          pair = "(" + marks[i].label() + "," + marks[j].label() + ")";
        }
      }
  } catch (const std::exception&) {
  }
  out.mock_response = scripted_reply("The span of the line is between the marked points " + pair + ".", pair);
  return out;
}

std::vector<DatasetRecord> generate_dataset(const std::filesystem::path& out_dir, const GenerateOptions& opts) {
  if (opts.count < 0) throw InputError("count must be >= 0");
  if (opts.kinds.empty()) throw InputError("at least one chart kind is required");
  std::vector<DatasetRecord> records;
  std::string jsonl;
  Json mock = Json::object();
  for (int i = 0; i < opts.count; ++i) {
    const ChartKind kind = opts.kinds[static_cast<std::size_t>(i) % opts.kinds.size()];
    const std::uint64_t seed = mix(opts.seed * 1000003ULL + static_cast<std::uint64_t>(i));
    const ChartSpec spec = random_spec(kind, seed, opts.spec);
    const GeneratedChart chart = generate_chart(spec);
    char id[64];
    std::snprintf(id, sizeof id, "%s-%04d", std::string(to_string(kind)).c_str(), i);
    const auto rel = std::filesystem::path("charts") / (std::string(id) + ".png");
    save_png(chart.image.with_id(id), out_dir / rel);
    GeneratedRecord rec = make_record(spec, chart, id, out_dir / rel);
    jsonl += record_to_json(rec.record, out_dir).dump() + "\n";
    mock[id] = rec.mock_response;
    records.push_back(std::move(rec.record));
  }
  write_file_atomic(out_dir / "dataset.jsonl", jsonl);
  write_file_atomic(out_dir / "mock_mllm.json", mock.dump(2) + "\n");
  return records;
}

}  // namespace chartlens
