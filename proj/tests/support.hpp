#pragma once

// Shared test helpers: independent oracles, an in-process HTTP stub and
// small chart fixtures.

#include <httplib.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <unistd.h>

#include "chartlens/geometry.hpp"
#include "chartlens/synthgen.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace chartlens;

inline fs::path fixtures_dir() { return fs::path(CHARTLENS_FIXTURES_DIR); }

inline fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chartlens_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---- oracles -------------------------------------------------------------

/// Pixel-centre membership by exact integer arithmetic (coordinates
/// doubled), crossings counted strictly to the right.
inline bool polygon_has_pixel(const Polygon& poly, int x, int y) {
  const long long px = 2LL * x + 1, py = 2LL * y + 1;
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const long long xi = 2LL * v[i].x, yi = 2LL * v[i].y, xj = 2LL * v[j].x, yj = 2LL * v[j].y;
    if ((yi > py) == (yj > py)) continue;
    // px < xi + (xj - xi) * (py - yi) / (yj - yi)
    const long long lhs = (px - xi) * (yj - yi);
    const long long rhs = (xj - xi) * (py - yi);
    const bool right = (yj - yi) > 0 ? lhs < rhs : lhs > rhs;
    if (right) inside = !inside;
  }
  return inside;
}

inline bool region_has_pixel(const Region& r, int x, int y) {
  if (const auto* b = std::get_if<Box>(&r.geometry)) return x >= b->x0 && x < b->x1 && y >= b->y0 && y < b->y1;
  if (const auto* p = std::get_if<Polygon>(&r.geometry)) return p->vertices.size() >= 3 && polygon_has_pixel(*p, x, y);
  const auto& m = std::get<RleMask>(r.geometry);
  if (x < 0 || y < 0 || x >= m.width() || y >= m.height()) return false;
  // Walk the runs directly instead of decoding.
  const long long target = static_cast<long long>(y) * m.width() + x;
  long long pos = 0;
  bool on = false;
  for (auto run : m.runs()) {
    if (target < pos + static_cast<long long>(run)) return on;
    pos += run;
    on = !on;
  }
  return false;
}

inline long long brute_area(const Region& r, Dims dims) {
  long long n = 0;
  for (int y = 0; y < dims.height; ++y)
    for (int x = 0; x < dims.width; ++x) n += region_has_pixel(r, x, y);
  return n;
}

inline double brute_iou(const Region& a, const Region& b, Dims dims) {
  long long inter = 0, uni = 0;
  for (int y = 0; y < dims.height; ++y)
    for (int x = 0; x < dims.width; ++x) {
      const bool ia = region_has_pixel(a, x, y), ib = region_has_pixel(b, x, y);
      inter += ia && ib;
      uni += ia || ib;
    }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct OracleMatch {
  std::size_t detected;
  std::size_t gt;
  double iou;
};

/// Repeatedly takes the best remaining pair (ties to the smallest
/// (detected, gt) index) until no pair reaches the threshold.
inline std::vector<OracleMatch> brute_match(const std::vector<Region>& det, const std::vector<Region>& gt, Dims dims,
                                            double threshold) {
  std::vector<std::vector<double>> m(det.size(), std::vector<double>(gt.size()));
  for (std::size_t d = 0; d < det.size(); ++d)
    for (std::size_t g = 0; g < gt.size(); ++g) m[d][g] = brute_iou(det[d], gt[g], dims);
  std::vector<bool> ud(det.size()), ug(gt.size());
  std::vector<OracleMatch> out;
  for (;;) {
    OracleMatch best{0, 0, -1};
    for (std::size_t d = 0; d < det.size(); ++d)
      for (std::size_t g = 0; g < gt.size(); ++g)
        if (!ud[d] && !ug[g] && m[d][g] >= threshold && m[d][g] > best.iou) best = {d, g, m[d][g]};
    if (best.iou < 0) return out;
    ud[best.detected] = ug[best.gt] = true;
    out.push_back(best);
  }
}

/// Precision, recall and F1 straight from their definitions.
inline std::array<double, 3> brute_prf1(std::size_t matched, std::size_t n_det, std::size_t n_gt) {
  const double p = n_det ? static_cast<double>(matched) / static_cast<double>(n_det) : 0.0;
  const double r = static_cast<double>(matched) / static_cast<double>(n_gt);
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

/// Points covered (boxes closed on all sides) and union pixel count.
inline std::pair<std::size_t, long long> brute_line(const std::vector<Region>& det, const std::vector<Point>& pts,
                                                    Dims dims) {
  std::size_t covered = 0;
  for (const auto& p : pts) {
    bool hit = false;
    for (const auto& r : det) {
      if (const auto* b = std::get_if<Box>(&r.geometry))
        hit = hit || (b->x1 > b->x0 && b->y1 > b->y0 && p.x >= b->x0 && p.x <= b->x1 && p.y >= b->y0 && p.y <= b->y1);
      else
        hit = hit || region_has_pixel(r, p.x, p.y);
    }
    covered += hit;
  }
  long long area = 0;
  for (int y = 0; y < dims.height; ++y)
    for (int x = 0; x < dims.width; ++x) {
      bool any = false;
      for (const auto& r : det) any = any || region_has_pixel(r, x, y);
      area += any;
    }
  return {covered, area};
}

/// Random boxes snapped to a coarse grid so equal IoUs and exact threshold
/// hits actually occur.
inline std::vector<Region> random_grid_boxes(std::mt19937_64& rng, Dims dims, std::size_t n, int cell) {
  std::vector<Region> out;
  const int gx = dims.width / cell, gy = dims.height / cell;
  for (std::size_t i = 0; i < n; ++i) {
    int x0 = static_cast<int>(rng() % gx), x1 = static_cast<int>(rng() % gx);
    int y0 = static_cast<int>(rng() % gy), y1 = static_cast<int>(rng() % gy);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    out.push_back({ChartKind::Bar, Box{x0 * cell, y0 * cell, (x1 + 1) * cell, (y1 + 1) * cell}, std::nullopt});
  }
  return out;
}

// ---- HTTP stub -------------------------------------------------------------

/// httplib server on an ephemeral localhost port, stopped on destruction.
class StubServer {
 public:
  StubServer() = default;
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;
  ~StubServer() { stop(); }

  httplib::Server& server() { return server_; }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

// ---- chart fixtures --------------------------------------------------------

/// Light-theme simple vertical bar chart with the given values.
inline ChartSpec bar_spec(std::vector<double> values, std::uint64_t seed = 11) {
  ChartSpec s;
  s.kind = ChartKind::Bar;
  s.layout = BarLayout::Simple;
  s.seed = seed;
  const char* names[] = {"ALPHA", "BETA", "GAMMA", "DELTA", "EAST", "WEST", "NORTH", "SOUTH", "OSLO", "LIMA", "ROME", "KIEV"};
  for (std::size_t i = 0; i < values.size(); ++i) s.categories.push_back(names[i % 12]);
  s.series.push_back({"SERIES A", std::move(values)});
  s.palette = {{31, 119, 180}};
  return s;
}

inline ChartSpec three_bar_spec() { return bar_spec({40, 75, 55}, 3); }

inline ChartSpec pie_spec(std::vector<double> values, double start_deg = 0) {
  ChartSpec s;
  s.kind = ChartKind::Pie;
  s.seed = 5;
  s.pie_start_deg = start_deg;
  // every prefix keeps cyclic neighbours >= 15 gray levels apart
  const std::vector<Rgb> pool = {{148, 103, 189}, {214, 39, 40}, {188, 189, 34},  {31, 119, 180},
                                 {255, 127, 14},  {140, 86, 75}, {23, 190, 207}, {227, 119, 194}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.categories.push_back("C" + std::to_string(i + 1));
    s.palette.push_back(pool[i]);
  }
  s.series.push_back({"SHARE", std::move(values)});
  return s;
}

inline ChartSpec line_spec(std::vector<std::vector<double>> series, Theme theme = Theme::Light) {
  ChartSpec s;
  s.kind = ChartKind::Line;
  s.seed = 9;
  s.theme = theme;
  const std::vector<Rgb> pool = {{220, 40, 40}, {40, 90, 220}};
  for (std::size_t i = 0; i < series[0].size(); ++i) s.categories.push_back(std::to_string(2000 + i));
  for (std::size_t k = 0; k < series.size(); ++k) {
    s.series.push_back({"SERIES " + std::string(1, static_cast<char>('A' + k)), series[k]});
    s.palette.push_back(pool[k]);
  }
  return s;
}

}  // namespace testsupport
