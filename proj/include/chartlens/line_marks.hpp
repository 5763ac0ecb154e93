#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chartlens/http_util.hpp"
#include "chartlens/markset.hpp"

namespace chartlens {

/// One data series as pixel points with strictly increasing x.
struct LineTrace {
  std::vector<Point> points;
  int series_id = 1;

  /// Linear interpolation between neighbouring points, clamped at the ends.
  double y_at(double x) const;
};

enum class LineExtractorKind { ColorTrace, RemoteNeural };

struct LineMarkConfig {
  int segments_per_line = 10;
  LineExtractorKind extractor = LineExtractorKind::ColorTrace;
  std::optional<std::string> remote_url;
  double min_saturation = 0.4;
  int min_cluster_pixels = 200;
  int dilate_px = 3;

  void validate() const;
};

class LineExtractor {
 public:
  virtual ~LineExtractor() = default;
  /// Traces sorted by mean y; series ids are 1..n in that order.
  virtual std::vector<LineTrace> extract(const ChartImage& img) = 0;
};

/// Per-hue clustering of saturated pixels, per-column median y.
class ColorTraceExtractor final : public LineExtractor {
 public:
  explicit ColorTraceExtractor(const LineMarkConfig& cfg) : cfg_(cfg) {}
  std::vector<LineTrace> extract(const ChartImage& img) override;

 private:
  LineMarkConfig cfg_;
};

struct RemoteLineExtractorOptions {
  std::string base_url;
  int max_in_flight = 4;
  int retries = 1;
  std::chrono::milliseconds timeout{60000};
};

/// Client for POST {base_url}/extract-lines. Throws
/// ServiceError("extractor unavailable: ...").
class RemoteLineExtractor final : public LineExtractor {
 public:
  explicit RemoteLineExtractor(RemoteLineExtractorOptions opts);
  std::vector<LineTrace> extract(const ChartImage& img) override;

 private:
  RemoteLineExtractorOptions opts_;
  http::Endpoint endpoint_;
  http::InFlightLimiter limiter_;
};

/// Throws InputError when RemoteNeural is selected without a URL.
std::unique_ptr<LineExtractor> make_line_extractor(const LineMarkConfig& cfg);

std::vector<LineTrace> extract_lines(const ChartImage& img, const LineMarkConfig& cfg);

/// Sorts points by x, keeps the first point per column, drops
/// out-of-bounds points, orders traces by mean y and renumbers series.
/// Traces left with fewer than 2 points are dropped.
std::vector<LineTrace> normalize_traces(std::vector<LineTrace> traces, Dims dims);

/// Segment k (0-based) covers x in [e_k, e_{k+1}) with
/// e_k = min_x + (max_x - min_x) * k / K; the last one is closed.
int segment_index(const LineTrace& t, int x, int segments);

/// One box per equal x-interval: the interval's x-range and the y-range of
/// the trace inside it (interval ends interpolated), dilated and clamped.
/// Labels are "L{series}-{k}" with k from 1.
std::vector<Region> segment_line(const LineTrace& t, const LineMarkConfig& cfg, Dims dims);

/// Marks for all traces; each anchor is the trace position at the right
/// end of its segment.
MarkSet line_markset(const std::string& chart_id, Dims dims, const std::vector<LineTrace>& traces,
                     const LineMarkConfig& cfg);

MarkSet detect_lines(const ChartImage& img, const LineMarkConfig& cfg, LineExtractor& extractor);

}  // namespace chartlens
