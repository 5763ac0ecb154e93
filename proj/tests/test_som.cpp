#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chartlens/bar_seg.hpp"
#include "chartlens/canvas.hpp"
#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"
#include "chartlens/pie_seg.hpp"
#include "chartlens/som.hpp"
#include "support.hpp"

using namespace chartlens;

namespace {

Mark mark(const std::string& label, Box b, int series = 0, int segment = 0) {
  Mark m;
  m.region = {ChartKind::Bar, b, label};
  m.anchor = {(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0};
  m.series = series;
  m.segment = segment;
  return m;
}

MarkSet bars(int n) {
  std::vector<Mark> ms;
  for (int i = 0; i < n; ++i) ms.push_back(mark("B" + std::to_string(i + 1), {10 + 30 * i, 20, 30 + 30 * i, 90}));
  return MarkSet("c", ChartKind::Bar, {40 + 30 * n, 100}, std::move(ms));
}

MarkSet lines(int series, int segments) {
  std::vector<Mark> ms;
  for (int s = 1; s <= series; ++s)
    for (int k = 1; k <= segments; ++k) {
      Mark m = mark("L" + std::to_string(s) + "-" + std::to_string(k), {10 * k, 10 * s, 10 * k + 10, 10 * s + 8}, s, k);
      m.region.kind = ChartKind::Line;
      ms.push_back(std::move(m));
    }
  return MarkSet("c", ChartKind::Line, {200, 100}, std::move(ms));
}

// Bounding box of the 4-connected component of colour `c` that fills most
// of its own bbox; outlines are thin rings and never qualify.
std::optional<Box> find_tag(const ChartImage& img, Rgb c) {
  std::vector<char> seen(static_cast<std::size_t>(img.width()) * img.height(), 0);
  std::optional<Box> best;
  double best_fill = 0.5;
  for (int y0 = 0; y0 < img.height(); ++y0)
    for (int x0 = 0; x0 < img.width(); ++x0) {
      if (seen[static_cast<std::size_t>(y0) * img.width() + x0] || !(img.at(x0, y0) == c)) continue;
      std::vector<Point> stack{{x0, y0}};
      seen[static_cast<std::size_t>(y0) * img.width() + x0] = 1;
      Box bb{x0, y0, x0 + 1, y0 + 1};
      long long n = 0;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        ++n;
        bb = bb.unite({p.x, p.y, p.x + 1, p.y + 1});
        const Point nb[] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
        for (const auto& q : nb) {
          if (!img.contains(q.x, q.y)) continue;
          auto& s = seen[static_cast<std::size_t>(q.y) * img.width() + q.x];
          if (s || !(img.at(q.x, q.y) == c)) continue;
          s = 1;
          stack.push_back(q);
        }
      }
      const double fill = static_cast<double>(n) / static_cast<double>(bb.area());
      if (n >= 30 && fill > best_fill) {
        best_fill = fill;
        best = bb;
      }
    }
  return best;
}

}  // namespace

TEST(Parse, ConsistentTwoLabels) {
  const auto m = bars(5);
  const auto r = parse_attribution_response("Step 1: ...\nVALIDATION: CONSISTENT\nATTRIBUTION: [B2, B5]", m, ChartKind::Bar);
  EXPECT_EQ(r.verdict, Verdict::Consistent);
  EXPECT_EQ(r.selection.labels, (std::vector<std::string>{"B2", "B5"}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Parse, UnknownLabelDroppedWithWarning) {
  const auto m = bars(5);
  const auto r = parse_attribution_response("ATTRIBUTION: [B2, B9]", m, ChartKind::Bar);
  EXPECT_EQ(r.selection.labels, (std::vector<std::string>{"B2"}));
  bool warned = false;
  for (const auto& w : r.warnings) warned = warned || w.find("B9") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Parse, FreeTextIsUnverifiable) {
  const auto r = parse_attribution_response("The chart shows sales going up.", bars(3), ChartKind::Bar);
  EXPECT_EQ(r.verdict, Verdict::Unverifiable);
  EXPECT_TRUE(r.selection.labels.empty());
}

TEST(Parse, LastSentinelWinsAndCaseInsensitive) {
  const std::string text =
      "validation: inconsistent\nattribution: [B1]\nOn reflection:\nValidation: Consistent.\nAttribution: [b3, B3 ,B1]";
  const auto r = parse_attribution_response(text, bars(3), ChartKind::Bar);
  EXPECT_EQ(r.verdict, Verdict::Consistent);
  EXPECT_EQ(r.selection.labels, (std::vector<std::string>{"B1", "B3"}));
}

TEST(Parse, LinePairsCanonicalAndCrossSeriesDropped) {
  const auto m = lines(2, 10);
  const auto r = parse_attribution_response(
      "VALIDATION: CONSISTENT\nATTRIBUTION: [(L1-5, L1-2), (L1-2,L2-4), (L2-1,L2-3), (L1-2,L1-5)]", m, ChartKind::Line);
  EXPECT_EQ(r.selection.pairs, (std::vector<LabelPair>{{"L1-2", "L1-5"}, {"L2-1", "L2-3"}}));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Grammar, RenderShape) {
  EXPECT_EQ(render_grammar(Verdict::Consistent, {{"B2", "B5"}, {}}, ChartKind::Bar),
            "VALIDATION: CONSISTENT\nATTRIBUTION: [B2, B5]");
  EXPECT_EQ(render_grammar(Verdict::Inconsistent, {{}, {{"L1-2", "L1-5"}, {"L2-1", "L2-2"}}}, ChartKind::Line),
            "VALIDATION: INCONSISTENT\nATTRIBUTION: [(L1-2,L1-5), (L2-1,L2-2)]");
  EXPECT_EQ(render_grammar(Verdict::Unverifiable, {}, ChartKind::Pie), "VALIDATION: UNVERIFIABLE\nATTRIBUTION: []");
}

TEST(Grammar, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  const auto bm = bars(12);
  const auto lm = lines(3, 10);
  const Verdict verdicts[] = {Verdict::Consistent, Verdict::Inconsistent, Verdict::Unverifiable};
  for (int i = 0; i < 100; ++i) {
    const Verdict v = verdicts[rng() % 3];
    LabelSelection sel;
    for (std::size_t k = 0; k < bm.size(); ++k)
      if (rng() % 3 == 0) sel.labels.push_back(bm[k].label());
    const auto r = parse_attribution_response("reasoning\n" + render_grammar(v, sel, ChartKind::Bar), bm, ChartKind::Bar);
    EXPECT_EQ(r.verdict, v);
    EXPECT_EQ(r.selection, sel);

    LabelSelection ps;
    for (int s = 1; s <= 3; ++s)
      for (int a = 1; a <= 10; ++a)
        for (int b = a + 1; b <= 10; ++b)
          if (rng() % 40 == 0)
            ps.pairs.push_back({"L" + std::to_string(s) + "-" + std::to_string(a), "L" + std::to_string(s) + "-" + std::to_string(b)});
    const auto rl = parse_attribution_response(render_grammar(v, ps, ChartKind::Line), lm, ChartKind::Line);
    EXPECT_EQ(rl.verdict, v);
    EXPECT_EQ(rl.selection, ps);
  }
}

TEST(Render, EmptyMarkSetUnchanged) {
  const auto img = generate_chart(testsupport::three_bar_spec()).image;
  const auto out = render_marks(img, MarkSet("c", ChartKind::Bar, img.dims(), {}));
  EXPECT_TRUE(std::equal(out.pixels().begin(), out.pixels().end(), img.pixels().begin()));
}

TEST(Render, ThreeBarTagsDecodeInOrder) {
  const auto chart = generate_chart(testsupport::three_bar_spec());
  IdentityRefiner idr;
  const auto marks = detect_bars(chart.image, {}, idr);
  ASSERT_EQ(marks.size(), 3u);
  const auto out = render_marks(chart.image, marks);
  const auto tags = layout_tags(marks, out.dims());
  int prev_x = -1;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto found = find_tag(out, mark_palette()[i]);
    ASSERT_TRUE(found.has_value()) << i;
    EXPECT_EQ(*found, tags[i].box);
    EXPECT_GT(found->x0, prev_x);
    prev_x = found->x0;
    // glyph pixels inside the tag spell the label
    Canvas expect(tags[i].box.width(), tags[i].box.height(), tags[i].color);
    const Rgb ink = luminance(tags[i].color) > 140 ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
    expect.draw_text(2, 2, "B" + std::to_string(i + 1), ink, 2);
    for (int y = 0; y < expect.height(); ++y)
      for (int x = 0; x < expect.width(); ++x)
        ASSERT_EQ(out.at(found->x0 + x, found->y0 + y), expect.get(x, y));
    // outline colour on the region's border
    const Box b = bounding_box(marks[i].region);
    EXPECT_EQ(out.at(b.x0, b.y1 - 1), mark_palette()[i]);
  }
}

TEST(Render, OverlappingTagsPushedDown) {
  std::vector<Mark> ms = {mark("B1", {10, 10, 40, 40}), mark("B2", {12, 12, 42, 42})};
  const MarkSet m("c", ChartKind::Bar, {100, 100}, ms);
  const auto tags = layout_tags(m, m.dims());
  ASSERT_EQ(tags.size(), 2u);
  EXPECT_TRUE(tags[0].box.intersect(tags[1].box).empty());
  EXPECT_GT(tags[1].box.y0, tags[0].box.y0);
}

TEST(Render, PieTagsAtMidAngle) {
  const auto spec = testsupport::pie_spec({25, 25, 25, 25}, 20);
  const auto chart = generate_chart(spec);
  IdentityRefiner idr;
  const auto marks = detect_pie(chart.image, {}, idr);
  ASSERT_EQ(marks.size(), 4u);
  const double cx = std::floor(spec.width / 2.0) + 0.5, cy = std::floor(spec.height / 2.0) + 10.5;
  const double r = std::floor(0.34 * std::min(spec.width, spec.height));
  const auto tags = layout_tags(marks, marks.dims());
  for (std::size_t i = 0; i < 4; ++i) {
    const double mid = (20 + 45 + 90.0 * static_cast<double>(i)) * M_PI / 180.0;
    const double ex = cx + 0.6 * r * std::cos(mid), ey = cy + 0.6 * r * std::sin(mid);
    const double tx = (tags[i].box.x0 + tags[i].box.x1) / 2.0, ty = (tags[i].box.y0 + tags[i].box.y1) / 2.0;
    EXPECT_NEAR(tx, ex, 4.0) << marks[i].label();
    EXPECT_NEAR(ty, ey, 4.0) << marks[i].label();
  }
}

TEST(Prompt, BarListsLabelsAndSentinels) {
  const auto m = bars(6);
  const auto img = ChartImage::filled(220, 100, {255, 255, 255});
  const auto p = build_prompt(img, m, {"Which is largest?", "B"}, ChartKind::Bar);
  for (int i = 1; i <= 6; ++i) EXPECT_NE(p.user_text.find("B" + std::to_string(i)), std::string::npos);
  EXPECT_NE(p.user_text.find("VALIDATION:"), std::string::npos);
  EXPECT_NE(p.user_text.find("ATTRIBUTION:"), std::string::npos);
  EXPECT_NE(p.user_text.find("Which is largest?"), std::string::npos);
  const auto again = build_prompt(img, m, {"Which is largest?", "B"}, ChartKind::Bar);
  EXPECT_EQ(p.user_text, again.user_text);
  EXPECT_EQ(p.system_text, again.system_text);
}

TEST(Prompt, LineDescribesPairs) {
  const auto p = build_prompt(ChartImage::filled(200, 100, {255, 255, 255}), lines(1, 4), {"q", "a"}, ChartKind::Line);
  EXPECT_NE(p.user_text.find("(L1-2,L1-5)"), std::string::npos);
  EXPECT_NE(p.user_text.find("pair of points on the same line"), std::string::npos);
}

TEST(FewShot, DefaultsParseWithOwnGrammar) {
  for (const auto& [kind, examples] : default_few_shot()) {
    EXPECT_GE(examples.size(), 2u);
    for (const auto& ex : examples) {
      const auto r = parse_attribution_response(ex.response, kind == ChartKind::Line ? lines(2, 10) : bars(4), kind);
      EXPECT_NE(r.verdict, Verdict::Unverifiable);
    }
  }
}

TEST(FewShot, LoadFromFile) {
  const auto dir = testsupport::fresh_dir("fewshot");
  write_file_atomic(dir / "ok.json", std::string_view(R"({"bar":[{"question":"q1","answer":"a1","response":"ATTRIBUTION: [B1]"},
    {"question":"q2","answer":"a2","response":"ATTRIBUTION: [B2]"}]})"));
  const auto set = load_few_shot(dir / "ok.json");
  EXPECT_EQ(set.at(ChartKind::Bar)[0].question, "q1");
  EXPECT_EQ(set.at(ChartKind::Pie).size(), default_few_shot().at(ChartKind::Pie).size());
  write_file_atomic(dir / "short.json", std::string_view(R"({"pie":[{"question":"q","answer":"a","response":"r"}]})"));
  EXPECT_THROW(load_few_shot(dir / "short.json"), InputError);
}
