#include "chartlens/dataset.hpp"

#include <fstream>
#include <set>

#include "chartlens/error.hpp"

namespace chartlens {

DatasetRecord parse_record(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("record must be a JSON object");
  DatasetRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.chart_path = base_dir / j.at("chart").get<std::string>();
    r.kind = parse_chart_kind(j.at("kind").get<std::string>());
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
  } catch (const Json::exception& e) {
    throw InputError(e.what());
  }
  if (r.id.empty()) throw InputError("id must not be empty");

  const bool has_regions = j.contains("gt_regions");
  const bool has_points = j.contains("gt_points");
  if (r.kind == ChartKind::Line) {
    if (has_regions) throw InputError("line record must use gt_points, not gt_regions");
    if (!has_points) throw InputError("line record needs gt_points");
    try {
      for (const auto& p : j.at("gt_points")) r.gt_points.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    } catch (const Json::exception& e) {
      throw InputError(std::string("gt_points: ") + e.what());
    }
    if (r.gt_points.empty()) throw InputError("gt_points must not be empty");
  } else {
    if (has_points) throw InputError(std::string(to_string(r.kind)) + " record must use gt_regions, not gt_points");
    if (!has_regions) throw InputError(std::string(to_string(r.kind)) + " record needs gt_regions");
    if (!j.at("gt_regions").is_array()) throw InputError("gt_regions must be an array");
    for (const auto& g : j.at("gt_regions")) {
      Region region = region_from_json(g);
      if (region.kind != r.kind) throw InputError("gt region kind does not match record kind");
      r.gt_regions.push_back(std::move(region));
    }
    if (r.gt_regions.empty()) throw InputError("gt_regions must not be empty");
  }
  return r;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  const auto base_dir = path.parent_path();
  Dataset ds;
  std::vector<std::string> errors;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      DatasetRecord r = parse_record(j, base_dir);
      if (!ids.insert(r.id).second) throw InputError("duplicate id '" + r.id + "'");
      r.line_no = line_no;
      ds.records.push_back(std::move(r));
    } catch (const Json::exception& e) {
      errors.push_back("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    } catch (const InputError& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = path.string() + ": " + std::to_string(errors.size()) + " invalid line(s)";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InputError(msg);
  }
  if (ds.records.empty()) ds.warnings.push_back("dataset " + path.string() + " is empty");
  return ds;
}

Json record_to_json(const DatasetRecord& r, const std::filesystem::path& base_dir) {
  Json j;
  j["id"] = r.id;
  const auto rel = r.chart_path.lexically_relative(base_dir);
  j["chart"] = (rel.empty() || *rel.begin() == "..") ? r.chart_path.generic_string() : rel.generic_string();
  j["kind"] = std::string(to_string(r.kind));
  j["question"] = r.question;
  j["answer"] = r.answer;
  if (r.kind == ChartKind::Line) {
    Json pts = Json::array();
    for (const auto& p : r.gt_points) pts.push_back({p.x, p.y});
    j["gt_points"] = std::move(pts);
  } else {
    Json regions = Json::array();
    for (const auto& g : r.gt_regions) regions.push_back(region_to_json(g));
    j["gt_regions"] = std::move(regions);
  }
  return j;
}

}  // namespace chartlens
