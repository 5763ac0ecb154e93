#include "chartlens/line_marks.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "chartlens/error.hpp"

namespace chartlens {

double LineTrace::y_at(double x) const {
  if (points.empty()) return 0;
  if (x <= points.front().x) return points.front().y;
  if (x >= points.back().x) return points.back().y;
  const auto it = std::lower_bound(points.begin(), points.end(), x,
                                   [](const Point& p, double v) { return p.x < v; });
  const Point& b = *it;
  if (b.x == x) return b.y;
  const Point& a = *(it - 1);
  const double t = (x - a.x) / static_cast<double>(b.x - a.x);
  return a.y + t * (b.y - a.y);
}

void LineMarkConfig::validate() const {
  if (segments_per_line < 2) throw InputError("segments_per_line must be >= 2");
  if (!(min_saturation >= 0 && min_saturation <= 1)) throw InputError("min_saturation must be in [0, 1]");
  if (min_cluster_pixels < 1) throw InputError("min_cluster_pixels must be >= 1");
  if (dilate_px < 0) throw InputError("dilate_px must be >= 0");
  if (extractor == LineExtractorKind::RemoteNeural && !remote_url)
    throw InputError("line extractor url is required for the remote extractor");
}

namespace {

constexpr int kHueBins = 72;

// Hue bin of a saturated pixel, or -1.
int hue_bin(Rgb c, double min_sat) {
  const int mx = std::max({c.r, c.g, c.b});
  const int mn = std::min({c.r, c.g, c.b});
  if (mx < 40 || mx == 0) return -1;
  const double sat = static_cast<double>(mx - mn) / mx;
  if (sat < min_sat || mx == mn) return -1;
  const double d = mx - mn;
  double h;
  if (mx == c.r) {
    h = std::fmod((c.g - c.b) / d, 6.0);
  } else if (mx == c.g) {
    h = (c.b - c.r) / d + 2.0;
  } else {
    h = (c.r - c.g) / d + 4.0;
  }
  h *= 60.0;
  if (h < 0) h += 360.0;
  return std::min(kHueBins - 1, static_cast<int>(h / (360.0 / kHueBins)));
}

double mean_y(const LineTrace& t) {
  double s = 0;
  for (const auto& p : t.points) s += p.y;
  return s / static_cast<double>(t.points.size());
}

}  // namespace

std::vector<LineTrace> normalize_traces(std::vector<LineTrace> traces, Dims dims) {
  std::vector<LineTrace> out;
  for (auto& t : traces) {
    std::vector<Point> pts;
    for (const auto& p : t.points)
      if (p.x >= 0 && p.y >= 0 && p.x < dims.width && p.y < dims.height) pts.push_back(p);
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x == b.x; }),
              pts.end());
    if (pts.size() >= 2) out.push_back(LineTrace{std::move(pts), 0});
  }
  std::stable_sort(out.begin(), out.end(), [](const LineTrace& a, const LineTrace& b) { return mean_y(a) < mean_y(b); });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].series_id = static_cast<int>(i) + 1;
  return out;
}

std::vector<LineTrace> ColorTraceExtractor::extract(const ChartImage& img) {
  std::vector<int> bins(static_cast<std::size_t>(img.width()) * img.height(), -1);
  std::vector<long long> hist(kHueBins, 0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int b = hue_bin(img.at(x, y), cfg_.min_saturation);
      bins[static_cast<std::size_t>(y) * img.width() + x] = b;
      if (b >= 0) ++hist[b];
    }

  // Clusters are circular runs of non-empty hue bins.
  std::vector<int> cluster_of(kHueBins, -1);
  const auto empty_bin = std::find(hist.begin(), hist.end(), 0);
  if (empty_bin == hist.end()) {
    std::fill(cluster_of.begin(), cluster_of.end(), 0);
  } else {
    const int start = static_cast<int>(empty_bin - hist.begin());
    int current = -1, next_id = 0;
    for (int k = 1; k <= kHueBins; ++k) {
      const int b = (start + k) % kHueBins;
      if (hist[b] == 0) {
        current = -1;
      } else {
        if (current < 0) current = next_id++;
        cluster_of[b] = current;
      }
    }
  }

  std::map<int, std::map<int, std::vector<int>>> columns;  // cluster -> x -> ys
  std::map<int, long long> sizes;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int b = bins[static_cast<std::size_t>(y) * img.width() + x];
      if (b < 0) continue;
      columns[cluster_of[b]][x].push_back(y);
      ++sizes[cluster_of[b]];
    }

  std::vector<LineTrace> traces;
  for (auto& [cluster, cols] : columns) {
    if (sizes[cluster] < cfg_.min_cluster_pixels) continue;
    LineTrace t;
    for (auto& [x, ys] : cols) {
      std::sort(ys.begin(), ys.end());
      t.points.push_back({x, ys[(ys.size() - 1) / 2]});
    }
    traces.push_back(std::move(t));
  }
  return normalize_traces(std::move(traces), img.dims());
}

RemoteLineExtractor::RemoteLineExtractor(RemoteLineExtractorOptions opts)
    : opts_(std::move(opts)), endpoint_(http::parse_url(opts_.base_url)), limiter_(opts_.max_in_flight) {}

std::vector<LineTrace> RemoteLineExtractor::extract(const ChartImage& img) {
  nlohmann::json req;
  req["image_png_b64"] = base64_encode(encode_png(img));
  http::Response res;
  {
    auto permit = limiter_.acquire();
    res = http::post_with_retry(endpoint_, "/extract-lines", req.dump(), {}, opts_.timeout, opts_.retries);
  }
  if (res.status == 0) throw ServiceError("extractor unavailable: " + res.error);
  if (res.status != 200)
    throw ServiceError("extractor unavailable: HTTP " + std::to_string(res.status) + ": " + res.body);
  std::vector<LineTrace> traces;
  try {
    const auto body = nlohmann::json::parse(res.body);
    for (const auto& line : body.at("lines")) {
      LineTrace t;
      for (const auto& p : line) t.points.push_back({round_px(p.at(0).get<double>()), round_px(p.at(1).get<double>())});
      traces.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(std::string("extractor unavailable: malformed response: ") + e.what());
  }
  return normalize_traces(std::move(traces), img.dims());
}

std::unique_ptr<LineExtractor> make_line_extractor(const LineMarkConfig& cfg) {
  cfg.validate();
  if (cfg.extractor == LineExtractorKind::RemoteNeural)
    return std::make_unique<RemoteLineExtractor>(RemoteLineExtractorOptions{*cfg.remote_url});
  return std::make_unique<ColorTraceExtractor>(cfg);
}

std::vector<LineTrace> extract_lines(const ChartImage& img, const LineMarkConfig& cfg) {
  return make_line_extractor(cfg)->extract(img);
}

namespace {

double edge(const LineTrace& t, int k, int segments) {
  const double lo = t.points.front().x, hi = t.points.back().x;
  return lo + (hi - lo) * k / segments;
}

}  // namespace

int segment_index(const LineTrace& t, int x, int segments) {
  const double lo = t.points.front().x, hi = t.points.back().x;
  const int k = static_cast<int>(std::floor((x - lo) * segments / (hi - lo)));
  return std::clamp(k, 0, segments - 1);
}

std::vector<Region> segment_line(const LineTrace& t, const LineMarkConfig& cfg, Dims dims) {
  cfg.validate();
  if (t.points.size() < 2) throw InputError("line trace needs at least 2 points");
  const int K = cfg.segments_per_line;
  std::vector<double> y_min(K), y_max(K);
  for (int k = 0; k < K; ++k) {
    const double ya = t.y_at(edge(t, k, K)), yb = t.y_at(edge(t, k + 1, K));
    y_min[k] = std::min(ya, yb);
    y_max[k] = std::max(ya, yb);
  }
  for (const auto& p : t.points) {
    const int k = segment_index(t, p.x, K);
    y_min[k] = std::min<double>(y_min[k], p.y);
    y_max[k] = std::max<double>(y_max[k], p.y);
  }
  std::vector<Region> out;
  for (int k = 0; k < K; ++k) {
    Box b{static_cast<int>(std::floor(edge(t, k, K))), static_cast<int>(std::floor(y_min[k])),
          static_cast<int>(std::ceil(edge(t, k + 1, K))), static_cast<int>(std::floor(y_max[k])) + 1};
    if (b.x1 <= b.x0) b.x1 = b.x0 + 1;
    b = b.expanded(cfg.dilate_px).clamped(dims);
    out.push_back(Region{ChartKind::Line, b, "L" + std::to_string(t.series_id) + "-" + std::to_string(k + 1)});
  }
  return out;
}

MarkSet line_markset(const std::string& chart_id, Dims dims, const std::vector<LineTrace>& traces,
                     const LineMarkConfig& cfg) {
  std::vector<Mark> marks;
  for (const auto& t : traces) {
    auto regions = segment_line(t, cfg, dims);
    for (std::size_t k = 0; k < regions.size(); ++k) {
      const double x = edge(t, static_cast<int>(k) + 1, cfg.segments_per_line);
      Mark m;
      m.anchor = {x + 0.5, t.y_at(x) + 0.5};
      m.region = std::move(regions[k]);
      m.refined = false;
      m.series = t.series_id;
      m.segment = static_cast<int>(k) + 1;
      marks.push_back(std::move(m));
    }
  }
  std::vector<std::string> warnings;
  if (traces.empty()) warnings.emplace_back("no lines found");
  return MarkSet(chart_id, ChartKind::Line, dims, std::move(marks), std::move(warnings));
}

MarkSet detect_lines(const ChartImage& img, const LineMarkConfig& cfg, LineExtractor& extractor) {
  cfg.validate();
  return line_markset(img.id(), img.dims(), extractor.extract(img), cfg);
}

}  // namespace chartlens
