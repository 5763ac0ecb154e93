#include "chartlens/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "chartlens/error.hpp"

namespace chartlens {

AttributionSet oracle_system(const DatasetRecord& r, const ChartImage&) {
  AttributionSet out;
  if (r.kind == ChartKind::Line) {
    for (const auto& p : r.gt_points) out.regions.push_back(Region{ChartKind::Line, Box{p.x, p.y, p.x + 1, p.y + 1}, std::nullopt});
  } else {
    out.regions = r.gt_regions;
  }
  return out;
}

RecordResult score_record(const DatasetRecord& r, const AttributionSet& detected, Dims dims, const EvalConfig& cfg) {
  RecordResult res;
  res.id = r.id;
  res.kind = r.kind;
  res.n_detected = detected.regions.size();
  if (r.kind == ChartKind::Line) {
    res.line = line_metrics(detected.regions, r.gt_points, dims);
    res.n_gt = res.line.total;
    res.matched = res.line.covered;
  } else {
    res.n_gt = r.gt_regions.size();
    res.matched = match_regions(detected.regions, r.gt_regions, cfg).size();
    res.scores = prf1_from_counts(res.matched, res.n_detected, res.n_gt);
  }
  return res;
}

EvalReport aggregate(std::string system, const EvalConfig& cfg, std::vector<RecordResult> records) {
  EvalReport rep;
  rep.system = std::move(system);
  rep.cfg = cfg;
  std::sort(records.begin(), records.end(), [](const RecordResult& a, const RecordResult& b) { return a.id < b.id; });
  rep.records = std::move(records);

  std::map<ChartKind, std::vector<const RecordResult*>> groups;
  for (const auto& r : rep.records) groups[r.kind].push_back(&r);
  for (const auto& [kind, group] : groups) {
    KindAggregate a;
    a.records = group.size();
    double p_sum = 0, r_sum = 0, f_sum = 0, det_sum = 0, area_sum = 0;
    for (const auto* r : group) {
      if (r->failed) ++a.failed;
      if (kind == ChartKind::Line) {
        a.covered += r->line.covered;
        a.points += r->line.total;
        det_sum += r->line.detection_rate;
        area_sum += r->line.area_frac;
      } else {
        a.matched += r->matched;
        a.detected += r->n_detected;
        a.gt += r->n_gt;
        p_sum += r->scores.precision;
        r_sum += r->scores.recall;
        f_sum += r->scores.f1;
      }
    }
    const double n = static_cast<double>(group.size());
    if (kind == ChartKind::Line) {
      a.detection_micro = a.points == 0 ? 0.0 : static_cast<double>(a.covered) / static_cast<double>(a.points);
      a.detection_macro = det_sum / n;
      a.area_mean = area_sum / n;
    } else {
      a.micro = prf1_from_counts(a.matched, a.detected, a.gt);
      a.macro = {p_sum / n, r_sum / n, f_sum / n};
    }
    rep.by_kind[kind] = a;
  }
  return rep;
}

EvalReport evaluate_dataset(const std::vector<DatasetRecord>& records, const AttributionSystem& system,
                            const EvalConfig& cfg, const std::string& system_name, int jobs) {
  cfg.validate();
  std::vector<RecordResult> results(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      const auto& rec = records[i];
      Dims dims{};
      try {
        const ChartImage img = load_png(rec.chart_path).with_id(rec.id);
        dims = img.dims();
        results[i] = score_record(rec, system(rec, img), dims, cfg);
      } catch (const std::exception& e) {
        if (dims.area() == 0) dims = {1, 1};
        results[i] = score_record(rec, AttributionSet{}, dims, cfg);
        results[i].failed = true;
        results[i].error = e.what();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, std::max<int>(1, static_cast<int>(records.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  EvalReport rep = aggregate(system_name, cfg, std::move(results));
  if (records.empty()) rep.warnings.emplace_back("dataset is empty");
  const auto failed = std::count_if(rep.records.begin(), rep.records.end(), [](const RecordResult& r) { return r.failed; });
  if (failed > 0) rep.warnings.push_back(std::to_string(failed) + " record(s) failed and were scored as empty attributions");
  return rep;
}

namespace {

double pct(double v) { return 100.0 * v; }

Json prf_json(const Prf1& s) {
  Json j;
  j["precision"] = pct(s.precision);
  j["recall"] = pct(s.recall);
  j["f1"] = pct(s.f1);
  return j;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace

Json report_to_json(const EvalReport& report) {
  Json j;
  j["system"] = report.system;
  j["iou_threshold"] = report.cfg.iou_threshold;
  j["aggregation"] = "micro";
  Json kinds = Json::object();
  for (const auto& [kind, a] : report.by_kind) {
    Json k;
    k["records"] = a.records;
    k["failed"] = a.failed;
    if (kind == ChartKind::Line) {
      k["detection_pct"] = pct(a.detection_micro);
      k["detection_pct_macro"] = pct(a.detection_macro);
      k["chart_area_pct"] = pct(a.area_mean);
      k["covered_points"] = a.covered;
      k["gt_points"] = a.points;
    } else {
      k["micro"] = prf_json(a.micro);
      k["macro"] = prf_json(a.macro);
      k["matched"] = a.matched;
      k["detected"] = a.detected;
      k["gt"] = a.gt;
    }
    kinds[std::string(to_string(kind))] = std::move(k);
  }
  j["by_kind"] = std::move(kinds);
  Json recs = Json::array();
  for (const auto& r : report.records) {
    Json k;
    k["id"] = r.id;
    k["kind"] = std::string(to_string(r.kind));
    k["failed"] = r.failed;
    if (r.failed) k["error"] = r.error;
    k["detected"] = r.n_detected;
    k["gt"] = r.n_gt;
    if (r.kind == ChartKind::Line) {
      k["covered"] = r.matched;
      k["detection_pct"] = pct(r.line.detection_rate);
      k["chart_area_pct"] = pct(r.line.area_frac);
    } else {
      k["matched"] = r.matched;
      const Json s = prf_json(r.scores);
      for (const auto& [key, v] : s.items()) k[key] = v;
    }
    recs.push_back(std::move(k));
  }
  j["records"] = std::move(recs);
  j["warnings"] = report.warnings;
  return j;
}

std::string report_table(const EvalReport& report) {
  std::string out;
  const std::string name = report.system.size() > 14 ? report.system.substr(0, 14) : report.system;
  auto prf_table = [&](ChartKind kind, const char* title) {
    out += fmt("%s (IoU >= %.2f, micro-averaged)\n", title, report.cfg.iou_threshold);
    out += fmt("%-14s %7s %7s %8s %8s %8s\n", "System", "Charts", "Failed", "P", "R", "F1");
    const auto it = report.by_kind.find(kind);
    if (it == report.by_kind.end()) {
      out += fmt("%-14s %7d %7d %8s %8s %8s\n", name.c_str(), 0, 0, "-", "-", "-");
    } else {
      const auto& a = it->second;
      out += fmt("%-14s %7zu %7zu %8.2f %8.2f %8.2f\n", name.c_str(), a.records, a.failed, pct(a.micro.precision),
                 pct(a.micro.recall), pct(a.micro.f1));
    }
    out += "\n";
  };
  prf_table(ChartKind::Bar, "Bar charts");

  out += "Line charts\n";
  out += fmt("%-14s %7s %7s %11s %12s\n", "System", "Charts", "Failed", "Detection%", "Chart-Area%");
  if (const auto it = report.by_kind.find(ChartKind::Line); it == report.by_kind.end()) {
    out += fmt("%-14s %7d %7d %11s %12s\n", name.c_str(), 0, 0, "-", "-");
  } else {
    const auto& a = it->second;
    out += fmt("%-14s %7zu %7zu %11.2f %12.2f\n", name.c_str(), a.records, a.failed, pct(a.detection_micro),
               pct(a.area_mean));
  }
  out += "\n";

  prf_table(ChartKind::Pie, "Pie charts");
  out.pop_back();
  return out;
}

}  // namespace chartlens
