#include "chartlens/attribute.hpp"

#include <algorithm>
#include <cmath>

#include "chartlens/error.hpp"

namespace chartlens {

MarkSet segment_chart(const ChartImage& img, ChartKind kind, const PipelineConfig& cfg, RefinementBackend& refiner,
                      LineExtractor& line_extractor) {
  switch (kind) {
    case ChartKind::Bar: return detect_bars(img, cfg.bar, refiner, cfg.refine);
    case ChartKind::Pie: return detect_pie(img, cfg.pie, refiner, cfg.refine);
    case ChartKind::Line: return detect_lines(img, cfg.line, line_extractor);
  }
  throw InputError("unknown chart kind");
}

Box anchor_pair_box(PointF a, PointF b, int dilate_px, Dims dims) {
  const int x0 = static_cast<int>(std::floor(std::min(a.x, b.x)));
  const int y0 = static_cast<int>(std::floor(std::min(a.y, b.y)));
  const int x1 = static_cast<int>(std::floor(std::max(a.x, b.x))) + 1;
  const int y1 = static_cast<int>(std::floor(std::max(a.y, b.y))) + 1;
  return Box{x0, y0, x1, y1}.expanded(dilate_px).clamped(dims);
}

AttributionResult attribute(const ChartImage& img, const QaPair& qa, ChartKind kind, const PipelineConfig& cfg,
                            Backends backends, const std::string& record_id) {
  AttributionResult out;
  out.chart_id = img.id();
  out.kind = kind;
  try {
    out.marks = segment_chart(img, kind, cfg, backends.refiner, backends.line_extractor);
  } catch (const SegmentationError& e) {
    throw StageError("segment", StageError::Cause::Segmentation, e.what());
  } catch (const ServiceError& e) {
    throw StageError("segment", StageError::Cause::Service, e.what());
  }
  out.warnings = out.marks.warnings();

  const ChartImage marked = render_marks(img, out.marks);
  const PromptBundle prompt = build_prompt(marked, out.marks, qa, kind, cfg.few_shot);
  try {
    out.raw_response = backends.mllm.complete({record_id, prompt.system_text, prompt.user_text, &prompt.marked_image});
  } catch (const ServiceError& e) {
    throw StageError("query", StageError::Cause::Service, e.what());
  }

  auto parsed = parse_attribution_response(out.raw_response, out.marks, kind);
  out.validated = parsed.verdict;
  out.selection = std::move(parsed.selection);
  out.warnings.insert(out.warnings.end(), parsed.warnings.begin(), parsed.warnings.end());

  if (kind == ChartKind::Line) {
    for (const auto& p : out.selection.pairs) {
      const auto& a = out.marks[*out.marks.index_of(p.first)];
      const auto& b = out.marks[*out.marks.index_of(p.second)];
      const Box box = anchor_pair_box(a.anchor, b.anchor, cfg.line.dilate_px, img.dims());
      out.selected.push_back(Region{ChartKind::Line, box, p.first + ".." + p.second});
    }
  } else {
    for (const auto& label : out.selection.labels) out.selected.push_back(out.marks[*out.marks.index_of(label)].region);
  }
  return out;
}

Json attribution_to_json(const AttributionResult& r) {
  Json j;
  j["chart_id"] = r.chart_id;
  j["kind"] = std::string(to_string(r.kind));
  j["validated"] = std::string(to_string(r.validated));
  if (r.kind == ChartKind::Line) {
    Json pairs = Json::array();
    for (const auto& p : r.selection.pairs) pairs.push_back({p.first, p.second});
    j["pairs"] = std::move(pairs);
  } else {
    j["labels"] = r.selection.labels;
  }
  Json regions = Json::array();
  for (const auto& region : r.selected) regions.push_back(region_to_json(region));
  j["regions"] = std::move(regions);
  j["raw_response"] = r.raw_response;
  j["warnings"] = r.warnings;
  return j;
}

ChartImage render_highlight(const ChartImage& img, const std::vector<Region>& regions) {
  Canvas canvas(img);
  const auto& palette = mark_palette();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Box window = bounding_box(regions[i]).clamped(img.dims());
    if (window.empty()) continue;
    canvas.blend_mask(rasterize(regions[i], window), window, palette[i % palette.size()], 0.4);
  }
  return canvas.to_image(img.id());
}

AttributionSet parse_normalized_boxes(std::string_view text, Dims dims, ChartKind kind) {
  AttributionSet out;
  const auto open = text.find('[');
  const auto close = text.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    out.warnings.emplace_back("response contains no JSON list");
    return out;
  }
  Json list;
  try {
    list = Json::parse(text.substr(open, close - open + 1));
  } catch (const Json::exception& e) {
    out.warnings.push_back(std::string("response is not valid JSON: ") + e.what());
    return out;
  }
  // A single flat box is accepted as a list of one.
  if (list.size() == 4 && std::all_of(list.begin(), list.end(), [](const Json& v) { return v.is_number(); }))
    list = Json::array({list});
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.size() != 4 ||
        !std::all_of(entry.begin(), entry.end(), [](const Json& v) { return v.is_number(); })) {
      out.warnings.emplace_back("malformed box entry dropped: " + entry.dump());
      continue;
    }
    const double x0 = entry[0].get<double>(), y0 = entry[1].get<double>();
    const double x1 = entry[2].get<double>(), y1 = entry[3].get<double>();
    const bool in_range = std::min({x0, y0, x1, y1}) >= 0.0 && std::max({x0, y0, x1, y1}) <= 1.0;
    if (!in_range || x0 >= x1 || y0 >= y1) {
      out.warnings.emplace_back("invalid box entry dropped: " + entry.dump());
      continue;
    }
    const Box b{round_px(x0 * dims.width), round_px(y0 * dims.height), round_px(x1 * dims.width),
                round_px(y1 * dims.height)};
    if (b.empty()) {
      out.warnings.emplace_back("box smaller than a pixel dropped: " + entry.dump());
      continue;
    }
    out.regions.push_back(Region{kind, b, std::nullopt});
  }
  return out;
}

AttributionSet zero_shot_bbox_baseline(const ChartImage& img, const QaPair& qa, ChartKind kind, MllmClient& mllm,
                                       const std::string& record_id) {
  const std::string system_text =
      "You are a careful chart analyst. You locate the chart elements that support an answer.";
  const std::string user_text =
      "Given the " + std::string(to_string(kind)) + " chart, the question and the answer below, return the chart "
      "regions that support the answer as a JSON list of bounding boxes [x0, y0, x1, y1]. Coordinates are "
      "normalized to [0, 1] with the origin at the top-left corner of the image. Reply with the JSON list only.\n"
      "Question: " + qa.question + "\nAnswer: " + qa.answer + "\n";
  std::string text;
  try {
    text = mllm.complete({record_id, system_text, user_text, &img});
  } catch (const ServiceError& e) {
    throw StageError("query", StageError::Cause::Service, e.what());
  }
  return parse_normalized_boxes(text, img.dims(), kind);
}

}  // namespace chartlens
