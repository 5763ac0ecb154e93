#include "chartlens/metrics.hpp"

#include <algorithm>

#include "chartlens/error.hpp"

namespace chartlens {

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw InputError("iou_threshold must be in (0, 1]");
}

std::vector<Match> match_regions(std::span<const Region> detected, std::span<const Region> gt, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<Match> candidates;
  for (std::size_t d = 0; d < detected.size(); ++d)
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const double v = iou(detected[d], gt[g]);
      if (v >= cfg.iou_threshold) candidates.push_back({d, g, v});
    }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) { return a.iou > b.iou; });
  std::vector<bool> used_d(detected.size()), used_g(gt.size());
  std::vector<Match> out;
  for (const auto& m : candidates) {
    if (used_d[m.detected] || used_g[m.gt]) continue;
    used_d[m.detected] = used_g[m.gt] = true;
    out.push_back(m);
  }
  return out;
}

Prf1 prf1_from_counts(std::size_t matched, std::size_t n_detected, std::size_t n_gt) {
  if (n_gt == 0) throw InputError("record has no ground-truth regions");
  Prf1 s;
  s.precision = n_detected == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(n_detected);
  s.recall = static_cast<double>(matched) / static_cast<double>(n_gt);
  const double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

Prf1 prf1(std::span<const Region> detected, std::span<const Region> gt, const EvalConfig& cfg) {
  return prf1_from_counts(match_regions(detected, gt, cfg).size(), detected.size(), gt.size());
}

bool covers_point(const Region& r, Point p) {
  if (const auto* b = std::get_if<Box>(&r.geometry))
    return !b->empty() && p.x >= b->x0 && p.x <= b->x1 && p.y >= b->y0 && p.y <= b->y1;
  const Box window{p.x, p.y, p.x + 1, p.y + 1};
  return rasterize(r, window).get(0, 0);
}

LineScores line_metrics(std::span<const Region> detected, std::span<const Point> gt_points, Dims dims) {
  LineScores s;
  s.total = gt_points.size();
  for (const auto& p : gt_points)
    if (std::any_of(detected.begin(), detected.end(), [&](const Region& r) { return covers_point(r, p); })) ++s.covered;

  BitMask all(dims.width, dims.height);
  for (const auto& r : detected) {
    const Box window = bounding_box(r).clamped(dims);
    if (window.empty()) continue;
    const BitMask m = rasterize(r, window);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m.get(x, y)) all.set(x + window.x0, y + window.y0);
  }
  s.union_area = all.count();
  s.detection_rate = s.total == 0 ? 0.0 : static_cast<double>(s.covered) / static_cast<double>(s.total);
  s.area_frac = dims.area() == 0 ? 0.0 : static_cast<double>(s.union_area) / static_cast<double>(dims.area());
  return s;
}

}  // namespace chartlens
