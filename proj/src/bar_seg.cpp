#include "chartlens/bar_seg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "chartlens/error.hpp"

namespace chartlens {

void BarSegConfig::validate() const {
  auto ratio = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw InputError(std::string(name) + " must be in (0, 1]");
  };
  ratio(min_area_frac, "min_area_frac");
  ratio(min_solidity, "min_solidity");
  ratio(rect_fill_min, "rect_fill_min");
  ratio(overlap_iou_max, "overlap_iou_max");
  if (min_area_frac >= 0.5) throw InputError("min_area_frac must be < 0.5");
  if (expand_px < 0) throw InputError("expand_px must be >= 0");
}

namespace {

int quantize(Rgb c) { return ((c.r >> 3) << 10) | ((c.g >> 3) << 5) | (c.b >> 3); }

int background_key(const ChartImage& img) {
  std::unordered_map<int, int> counts;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (x < 2 || y < 2 || x >= img.width() - 2 || y >= img.height() - 2) ++counts[quantize(img.at(x, y))];
  return std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
           return a.second < b.second || (a.second == b.second && a.first > b.first);
         })->first;
}

std::vector<Region> decompose(const ChartImage& img, const vision::Contour& c, const BarSegConfig& cfg,
                              int bg_key) {
  const Box window = c.bbox.expanded(cfg.expand_px).clamped(img.dims());
  const double min_area = cfg.min_area_frac * static_cast<double>(img.dims().area());

  std::map<int, long long> counts;
  for (int y = window.y0; y < window.y1; ++y)
    for (int x = window.x0; x < window.x1; ++x) {
      const int key = quantize(img.at(x, y));
      if (key != bg_key) ++counts[key];
    }

  std::vector<Region> out;
  for (const auto& [key, n] : counts) {
    if (static_cast<double>(n) < min_area) continue;
    BitMask mask(window.width(), window.height());
    for (int y = window.y0; y < window.y1; ++y)
      for (int x = window.x0; x < window.x1; ++x)
        if (quantize(img.at(x, y)) == key) mask.set(x - window.x0, y - window.y0);
    mask = vision::morph_open(mask);
    for (const auto& sub : vision::extract_contours(mask)) {
      if (static_cast<double>(sub.area) < min_area) continue;
      if (sub.solidity < cfg.min_solidity) continue;
      const double fill = static_cast<double>(sub.area) / static_cast<double>(sub.bbox.area());
      if (fill < cfg.rect_fill_min) continue;
      const Box b{sub.bbox.x0 + window.x0, sub.bbox.y0 + window.y0, sub.bbox.x1 + window.x0,
                  sub.bbox.y1 + window.y0};
      // A component cut by the analysis window (but not by the image edge)
      // belongs to a neighbouring element and is only partially visible.
      const bool cut = (b.x0 == window.x0 && window.x0 > 0) || (b.y0 == window.y0 && window.y0 > 0) ||
                       (b.x1 == window.x1 && window.x1 < img.width()) ||
                       (b.y1 == window.y1 && window.y1 < img.height());
      if (cut) continue;
      out.push_back(Region{ChartKind::Bar, b, std::nullopt});
    }
  }
  return out;
}

}  // namespace

std::vector<Region> decompose_by_color(const ChartImage& img, const vision::Contour& c, const BarSegConfig& cfg) {
  return decompose(img, c, cfg, background_key(img));
}

std::vector<Region> dedup_and_sort(std::vector<Region> regions, const BarSegConfig& cfg) {
  std::vector<std::pair<long long, std::size_t>> order;
  for (std::size_t i = 0; i < regions.size(); ++i) order.emplace_back(region_area(regions[i]), i);
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    const Box ba = bounding_box(regions[a.second]), bb = bounding_box(regions[b.second]);
    return std::tie(ba.x0, ba.y0, ba.x1, ba.y1) < std::tie(bb.x0, bb.y0, bb.x1, bb.y1);
  });
  std::vector<Region> kept;
  for (const auto& [area, idx] : order) {
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Region& k) {
      return iou(k, regions[idx]) > cfg.overlap_iou_max;
    });
    if (!overlaps) kept.push_back(regions[idx]);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Region& a, const Region& b) {
    const Box ba = bounding_box(a), bb = bounding_box(b);
    return std::tie(ba.x0, ba.y0) < std::tie(bb.x0, bb.y0);
  });
  return kept;
}

MarkSet detect_bars(const ChartImage& img, const BarSegConfig& cfg, RefinementBackend& refiner,
                    const RefineConfig& refine_cfg) {
  cfg.validate();
  std::vector<std::string> warnings;
  const auto bin = vision::binarize(img);
  if (bin.uniform) {
    warnings.emplace_back("uniform image: no foreground");
    warnings.emplace_back("no bars found");
    return MarkSet(img.id(), ChartKind::Bar, img.dims(), {}, std::move(warnings));
  }
  const auto cleaned = vision::morph_clean(bin.mask);
  const double min_area = cfg.min_area_frac * static_cast<double>(img.dims().area());
  const int bg = background_key(img);

  std::vector<Region> candidates;
  for (const auto& c : vision::extract_contours(cleaned)) {
    if (static_cast<double>(c.area) < min_area) continue;
    auto parts = decompose(img, c, cfg, bg);
    candidates.insert(candidates.end(), std::make_move_iterator(parts.begin()), std::make_move_iterator(parts.end()));
  }
  const auto regions = dedup_and_sort(std::move(candidates), cfg);

  std::vector<Mark> marks;
  marks.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    Region heuristic = regions[i];
    heuristic.label = "B" + std::to_string(i + 1);
    auto refined = refine_region(img, heuristic, refine_cfg, refiner);
    if (refined.warning) warnings.push_back(*heuristic.label + ": " + *refined.warning);
    Mark m;
    m.anchor = pixel_centroid(refined.region);
    m.region = std::move(refined.region);
    m.refined = refined.refined;
    marks.push_back(std::move(m));
  }
  if (marks.empty()) warnings.emplace_back("no bars found");
  return MarkSet(img.id(), ChartKind::Bar, img.dims(), std::move(marks), std::move(warnings));
}

}  // namespace chartlens
