#include "chartlens/json_io.hpp"

#include "chartlens/error.hpp"

namespace chartlens {

Json region_to_json(const Region& r) {
  Json geometry = std::visit(
      [](const auto& g) -> Json {
        using T = std::decay_t<decltype(g)>;
        Json out;
        if constexpr (std::is_same_v<T, Box>) {
          out["type"] = "box";
          out["x0"] = g.x0;
          out["y0"] = g.y0;
          out["x1"] = g.x1;
          out["y1"] = g.y1;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          out["type"] = "polygon";
          Json pts = Json::array();
          for (const auto& p : g.vertices) pts.push_back({p.x, p.y});
          out["points"] = std::move(pts);
        } else {
          out["type"] = "mask_rle";
          out["width"] = g.width();
          out["height"] = g.height();
          out["counts"] = g.counts_string();
        }
        return out;
      },
      r.geometry);
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["geometry"] = std::move(geometry);
  j["label"] = r.label ? Json(*r.label) : Json(nullptr);
  return j;
}

Region region_from_json(const Json& j) {
  try {
    Region r;
    r.kind = parse_chart_kind(j.at("kind").get<std::string>());
    const auto& g = j.at("geometry");
    const auto type = g.at("type").get<std::string>();
    if (type == "box") {
      r.geometry = Box{g.at("x0").get<int>(), g.at("y0").get<int>(), g.at("x1").get<int>(), g.at("y1").get<int>()};
    } else if (type == "polygon") {
      Polygon poly;
      for (const auto& p : g.at("points")) {
        if (!p.is_array() || p.size() != 2) throw InputError("polygon point must be [x,y]");
        poly.vertices.push_back({p[0].get<int>(), p[1].get<int>()});
      }
      r.geometry = std::move(poly);
    } else if (type == "mask_rle") {
      r.geometry = RleMask::parse(g.at("counts").get<std::string>(), g.at("width").get<int>(),
                                  g.at("height").get<int>());
    } else {
      throw InputError("unknown geometry type '" + type + "'");
    }
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) r.label = it->get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("invalid region: ") + e.what());
  }
}

Json markset_to_json(const MarkSet& m) {
  Json j;
  j["chart_id"] = m.chart_id();
  j["kind"] = std::string(to_string(m.kind()));
  j["width"] = m.dims().width;
  j["height"] = m.dims().height;
  Json marks = Json::array();
  for (const auto& mark : m.marks()) {
    Json e;
    e["label"] = mark.label();
    e["region"] = region_to_json(mark.region);
    e["anchor"] = {mark.anchor.x, mark.anchor.y};
    e["refined"] = mark.refined;
    if (m.kind() == ChartKind::Line) {
      e["series"] = mark.series;
      e["segment"] = mark.segment;
    }
    marks.push_back(std::move(e));
  }
  j["marks"] = std::move(marks);
  j["low_confidence"] = m.low_confidence();
  j["warnings"] = m.warnings();
  return j;
}

MarkSet markset_from_json(const Json& j) {
  try {
    std::vector<Mark> marks;
    for (const auto& e : j.at("marks")) {
      Mark mark;
      mark.region = region_from_json(e.at("region"));
      mark.region.label = e.at("label").get<std::string>();
      mark.anchor = {e.at("anchor")[0].get<double>(), e.at("anchor")[1].get<double>()};
      mark.refined = e.value("refined", false);
      mark.series = e.value("series", 0);
      mark.segment = e.value("segment", 0);
      marks.push_back(std::move(mark));
    }
    MarkSet out(j.at("chart_id").get<std::string>(), parse_chart_kind(j.at("kind").get<std::string>()),
                Dims{j.at("width").get<int>(), j.at("height").get<int>()}, std::move(marks),
                j.value("warnings", std::vector<std::string>{}));
    out.set_low_confidence(j.value("low_confidence", false));
    return out;
  } catch (const Json::exception& e) {
    throw InputError(std::string("invalid mark set: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid mark set: ") + e.what());
  }
}

}  // namespace chartlens
