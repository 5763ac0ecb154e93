#pragma once

#include <string>
#include <vector>

#include "chartlens/bar_seg.hpp"
#include "chartlens/json_io.hpp"
#include "chartlens/line_marks.hpp"
#include "chartlens/mllm.hpp"
#include "chartlens/pie_seg.hpp"
#include "chartlens/refine.hpp"
#include "chartlens/som.hpp"

namespace chartlens {

struct PipelineConfig {
  BarSegConfig bar;
  PieSegConfig pie;
  LineMarkConfig line;
  RefineConfig refine;
  FewShotSet few_shot = default_few_shot();
};

struct Backends {
  RefinementBackend& refiner;
  LineExtractor& line_extractor;
  MllmClient& mllm;
};

/// Mark generation for any chart kind.
MarkSet segment_chart(const ChartImage& img, ChartKind kind, const PipelineConfig& cfg, RefinementBackend& refiner,
                      LineExtractor& line_extractor);

/// Box with the two anchors as opposite corners, dilated by `dilate_px`.
Box anchor_pair_box(PointF a, PointF b, int dilate_px, Dims dims);

struct AttributionResult {
  std::string chart_id;
  ChartKind kind = ChartKind::Bar;
  Verdict validated = Verdict::Unverifiable;
  LabelSelection selection;
  std::string raw_response;
  std::vector<Region> selected;  // resolved, one per label or pair
  std::vector<std::string> warnings;
  MarkSet marks;
};

/// segment -> render -> prompt -> query -> parse -> resolve. Failures are
/// rethrown as StageError tagged "segment" or "query".
AttributionResult attribute(const ChartImage& img, const QaPair& qa, ChartKind kind, const PipelineConfig& cfg,
                            Backends backends, const std::string& record_id);

Json attribution_to_json(const AttributionResult& r);

/// Fills the selected regions at 40% opacity.
ChartImage render_highlight(const ChartImage& img, const std::vector<Region>& regions);

struct AttributionSet {
  std::vector<Region> regions;
  std::vector<std::string> warnings;
};

/// Parses a JSON list of normalized [x0, y0, x1, y1] boxes from the first
/// '[' to the last ']' of the text; malformed entries are dropped.
AttributionSet parse_normalized_boxes(std::string_view text, Dims dims, ChartKind kind);

/// Asks the model for normalized boxes on the unmarked chart.
AttributionSet zero_shot_bbox_baseline(const ChartImage& img, const QaPair& qa, ChartKind kind, MllmClient& mllm,
                                       const std::string& record_id);

}  // namespace chartlens
