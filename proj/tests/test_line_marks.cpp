#include <gtest/gtest.h>

#include <cmath>

#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"
#include "chartlens/line_marks.hpp"
#include "chartlens/metrics.hpp"
#include "support.hpp"

using namespace chartlens;

namespace {

LineTrace straight(int x0, int x1, int y, int step = 1) {
  LineTrace t;
  for (int x = x0; x <= x1; x += step) t.points.push_back({x, y});
  return t;
}

// Worst per-column error of the extracted trace against the generator's
// polyline over the columns both cover. Both are in pixel indices.
double max_column_error(const LineTrace& got, const LineTrace& truth) {
  double worst = 0;
  for (const auto& p : got.points) {
    if (p.x < truth.points.front().x || p.x > truth.points.back().x) continue;
    worst = std::max(worst, std::abs(p.y - truth.y_at(p.x)));
  }
  return worst;
}

std::vector<double> sine(int n, double phase) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(50 + 40 * std::sin(i * 0.7 + phase));
  return v;
}

}  // namespace

TEST(LineConfig, Validation) {
  EXPECT_NO_THROW(LineMarkConfig{}.validate());
  LineMarkConfig c;
  c.extractor = LineExtractorKind::RemoteNeural;
  EXPECT_THROW(c.validate(), InputError);
  c.remote_url = "http://127.0.0.1:1";
  EXPECT_NO_THROW(c.validate());
  c = {};
  c.segments_per_line = 1;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(LineTrace, Interpolation) {
  LineTrace t;
  t.points = {{0, 0}, {10, 20}};
  EXPECT_DOUBLE_EQ(t.y_at(5), 10);
  EXPECT_DOUBLE_EQ(t.y_at(-4), 0);
  EXPECT_DOUBLE_EQ(t.y_at(99), 20);
}

TEST(Normalize, SortsDedupsAndRenumbers) {
  LineTrace low, high, stub;
  low.points = {{30, 80}, {10, 81}, {10, 5}, {500, 80}, {20, 79}};
  high.points = {{5, 10}, {15, 12}};
  stub.points = {{3, 3}};
  const auto out = normalize_traces({low, high, stub}, {100, 100});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].series_id, 1);
  EXPECT_EQ(out[0].points, (std::vector<Point>{{5, 10}, {15, 12}}));
  EXPECT_EQ(out[1].series_id, 2);
  EXPECT_EQ(out[1].points, (std::vector<Point>{{10, 81}, {20, 79}, {30, 80}}));
}

TEST(ColorTrace, TwoSeriesWithinTwoPixels) {
  const auto chart = generate_chart(testsupport::line_spec({{20, 35, 30, 60, 55, 80}, {90, 75, 85, 95, 80, 99}}));
  const auto traces = ColorTraceExtractor({}).extract(chart.image);
  ASSERT_EQ(traces.size(), 2u);
  for (const auto& t : traces) {
    double best = 1e9;
    for (const auto& truth : chart.traces) best = std::min(best, max_column_error(t, truth));
    EXPECT_LE(best, 2.0) << "series " << t.series_id;
  }
}

TEST(ColorTrace, DarkTheme) {
  const auto chart = generate_chart(testsupport::line_spec({sine(8, 0)}, Theme::Dark));
  const auto traces = ColorTraceExtractor({}).extract(chart.image);
  ASSERT_EQ(traces.size(), 1u);
  EXPECT_LE(max_column_error(traces[0], chart.traces[0]), 2.0);
}

TEST(ColorTrace, BlankImage) {
  EXPECT_TRUE(ColorTraceExtractor({}).extract(ChartImage::filled(100, 80, {255, 255, 255})).empty());
  ColorTraceExtractor ex({});
  const auto m = detect_lines(ChartImage::filled(100, 80, {255, 255, 255}), {}, ex);
  EXPECT_TRUE(m.empty());
  ASSERT_EQ(m.warnings().size(), 1u);
  EXPECT_EQ(m.warnings()[0], "no lines found");
}

TEST(RemoteExtractor, CrossingLinesFixture) {
  const std::string body = read_file(testsupport::fixtures_dir() / "extract_lines_crossing.json");
  testsupport::StubServer stub;
  std::string seen_image;
  stub.server().Post("/extract-lines", [&](const httplib::Request& req, httplib::Response& res) {
    seen_image = nlohmann::json::parse(req.body).at("image_png_b64").get<std::string>();
    res.set_content(body, "application/json");
  });
  stub.start();
  const auto img = ChartImage::filled(400, 300, {255, 255, 255});
  RemoteLineExtractor ex({stub.url()});
  const auto traces = ex.extract(img);
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(decode_png(base64_decode(seen_image)).dims(), img.dims());
  for (const auto& t : traces) {
    EXPECT_EQ(t.points.front().x, 40);
    EXPECT_EQ(t.points.back().x, 360);
  }
  // equal means; both orders keep series ids 1..2
  EXPECT_EQ(traces[0].series_id, 1);
  EXPECT_EQ(traces[1].series_id, 2);
}

TEST(RemoteExtractor, ErrorsAreServiceErrors) {
  testsupport::StubServer stub;
  stub.server().Post("/extract-lines", [](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad", "text/plain");
  });
  stub.start();
  RemoteLineExtractor ex({stub.url()});
  try {
    ex.extract(ChartImage::filled(40, 40, {255, 255, 255}));
    FAIL() << "expected ServiceError";
  } catch (const ServiceError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("extractor unavailable", 0), 0u);
  }
  RemoteLineExtractor dead({"http://127.0.0.1:1", 1, 0, std::chrono::milliseconds(500)});
  EXPECT_THROW(dead.extract(ChartImage::filled(40, 40, {255, 255, 255})), ServiceError);
}

TEST(SegmentLine, StraightLineTenEqualBoxes) {
  LineMarkConfig cfg;
  cfg.dilate_px = 0;
  const auto t = straight(100, 300, 50);
  const auto boxes = segment_line(t, cfg, {400, 100});
  ASSERT_EQ(boxes.size(), 10u);
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const Box b = std::get<Box>(boxes[k].geometry);
    EXPECT_EQ(b.x0, 100 + 20 * static_cast<int>(k));
    EXPECT_EQ(b.width(), 20);
    EXPECT_EQ(*boxes[k].label, "L1-" + std::to_string(k + 1));
  }
}

TEST(SegmentLine, TwoPointTrace) {
  LineTrace t;
  t.points = {{10, 10}, {50, 30}};
  const LineMarkConfig cfg;
  const auto boxes = segment_line(t, cfg, {100, 100});
  ASSERT_GE(boxes.size(), 2u);
  for (const auto& b : boxes) EXPECT_FALSE(std::get<Box>(b.geometry).empty());
  for (const auto& p : t.points) {
    bool hit = false;
    for (const auto& b : boxes) hit = hit || covers_point(b, p);
    EXPECT_TRUE(hit);
  }
  LineTrace one;
  one.points = {{1, 1}};
  EXPECT_THROW(segment_line(one, cfg, {100, 100}), InputError);
}

TEST(SegmentLine, SineTraceCoverage) {
  const auto chart = generate_chart(testsupport::line_spec({sine(14, 0.3)}));
  ColorTraceExtractor ex({});
  const auto traces = ex.extract(chart.image);
  ASSERT_EQ(traces.size(), 1u);
  const auto boxes = segment_line(traces[0], {}, chart.image.dims());
  std::size_t covered = 0;
  for (const auto& p : traces[0].points) {
    bool hit = false;
    for (const auto& b : boxes) hit = hit || covers_point(b, p);
    covered += hit;
  }
  EXPECT_GE(static_cast<double>(covered), 0.99 * static_cast<double>(traces[0].points.size()));
}

TEST(LineMarkSet, AnchorsAtSegmentEnds) {
  LineMarkConfig cfg;
  LineTrace t;
  t.points = {{100, 200}, {300, 100}};
  const auto m = line_markset("c", {400, 300}, {t}, cfg);
  ASSERT_EQ(m.size(), 10u);
  EXPECT_EQ(m[0].label(), "L1-1");
  EXPECT_EQ(m[0].series, 1);
  EXPECT_EQ(m[0].segment, 1);
  EXPECT_DOUBLE_EQ(m[0].anchor.x, 120.5);
  EXPECT_DOUBLE_EQ(m[0].anchor.y, 190.5);
  EXPECT_DOUBLE_EQ(m[9].anchor.x, 300.5);
  EXPECT_DOUBLE_EQ(m[9].anchor.y, 100.5);
}

TEST(SegmentIndex, EdgesAndClamp) {
  const auto t = straight(0, 100, 5);
  EXPECT_EQ(segment_index(t, 0, 10), 0);
  EXPECT_EQ(segment_index(t, 9, 10), 0);
  EXPECT_EQ(segment_index(t, 10, 10), 1);
  EXPECT_EQ(segment_index(t, 100, 10), 9);
}
