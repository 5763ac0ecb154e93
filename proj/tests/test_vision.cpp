#include <gtest/gtest.h>

#include <random>

#include "chartlens/canvas.hpp"
#include "chartlens/vision.hpp"
#include "support.hpp"

using namespace chartlens;
using namespace chartlens::vision;

namespace {

// Between-class variance (unnormalized) of splitting at "sample <= t".
double split_score(const std::vector<std::uint8_t>& s, double t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (auto v : s) {
    if (v <= t) {
      ++n0;
      s0 += v;
    } else {
      ++n1;
      s1 += v;
    }
  }
  if (n0 == 0 || n1 == 0) return -1;
  const double d = s0 / n0 - s1 / n1;
  return n0 * n1 * d * d;
}

double brute_best_split(const std::vector<std::uint8_t>& s) {
  double best = -1;
  for (int t = 0; t < 255; ++t) best = std::max(best, split_score(s, t));
  return best;
}

BinaryImage from_rows(const std::vector<std::string>& rows) {
  BinaryImage b(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x) b.set(x, y, rows[y][x] == '#');
  return b;
}

}  // namespace

TEST(Otsu, BimodalSplitStrictlyBetween) {
  std::vector<std::uint8_t> s(100, 0);
  std::fill(s.begin() + 50, s.end(), 255);
  const auto t = otsu_threshold(s);
  ASSERT_TRUE(t.has_value());
  EXPECT_GT(*t, 0.0);
  EXPECT_LT(*t, 255.0);
}

TEST(Otsu, ConstantHasNoThreshold) {
  std::vector<std::uint8_t> s(64, 77);
  EXPECT_FALSE(otsu_threshold(s).has_value());
  EXPECT_FALSE(otsu_threshold({}).has_value());
}

TEST(Otsu, MatchesBruteForceOnRandomHistograms) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> n(5, 400), lv(0, 255), k(2, 6);
    std::vector<int> modes(k(rng));
    for (auto& m : modes) m = lv(rng);
    std::vector<std::uint8_t> s(n(rng));
    std::normal_distribution<double> noise(0, 12);
    for (auto& v : s) {
      const int m = modes[std::uniform_int_distribution<std::size_t>(0, modes.size() - 1)(rng)];
      v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(m + noise(rng))), 0, 255));
    }
    const auto t = otsu_threshold(s);
    const double best = brute_best_split(s);
    if (best < 0) {
      EXPECT_FALSE(t.has_value());
      continue;
    }
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(split_score(s, *t), best, 1e-9 * best) << "case " << i;
    // never lands on a sample value
    EXPECT_EQ(std::count_if(s.begin(), s.end(), [&](std::uint8_t v) { return v == *t; }), 0);
  }
}

TEST(Binarize, LightChartBarsAreForeground) {
  Canvas c(60, 40, {255, 255, 255});
  c.fill_rect({10, 10, 20, 35}, {31, 119, 180});
  const auto b = binarize(c.to_image());
  EXPECT_FALSE(b.dark_background);
  EXPECT_TRUE(b.mask.get(15, 20));
  EXPECT_FALSE(b.mask.get(40, 20));
}

TEST(Binarize, DarkBackgroundInverted) {
  Canvas c(60, 40, {0, 0, 0});
  c.fill_rect({10, 10, 20, 35}, {255, 255, 255});
  const auto b = binarize(c.to_image());
  EXPECT_TRUE(b.dark_background);
  EXPECT_TRUE(b.mask.get(15, 20));
  EXPECT_FALSE(b.mask.get(40, 20));
}

TEST(Binarize, DarkThemeSynthBarsForeground) {
  auto spec = testsupport::bar_spec({30, 60, 90, 45});
  spec.theme = Theme::Dark;
  spec.palette = {{255, 127, 14}};
  const auto chart = generate_chart(spec);
  const auto b = binarize(chart.image);
  ASSERT_TRUE(b.dark_background);
  for (const auto& m : chart.gt.marks()) {
    const Box bb = bounding_box(m.region);
    EXPECT_TRUE(b.mask.get((bb.x0 + bb.x1) / 2, (bb.y0 + bb.y1) / 2)) << m.label();
  }
}

TEST(Binarize, ConstantGrayIsEmptyAndFlagged) {
  const auto b = binarize(ChartImage::filled(32, 32, {128, 128, 128}));
  EXPECT_TRUE(b.uniform);
  EXPECT_EQ(b.mask.count(), 0);
}

TEST(DarkBackground, BorderLuminance) {
  EXPECT_FALSE(detect_dark_background(ChartImage::filled(20, 20, {255, 255, 255})));
  EXPECT_TRUE(detect_dark_background(ChartImage::filled(20, 20, {0, 0, 0})));
  auto spec = testsupport::bar_spec({10, 20});
  spec.theme = Theme::Dark;
  EXPECT_TRUE(detect_dark_background(generate_chart(spec).image));
  spec.theme = Theme::Light;
  EXPECT_FALSE(detect_dark_background(generate_chart(spec).image));
}

TEST(Morph, SpeckleRemoved) {
  BinaryImage b(9, 9);
  b.set(4, 4);
  EXPECT_EQ(morph_clean(b).count(), 0);
}

TEST(Morph, LargeSquareUnchanged) {
  BinaryImage b(70, 70);
  for (int y = 10; y < 60; ++y)
    for (int x = 10; x < 60; ++x) b.set(x, y);
  EXPECT_EQ(morph_clean(b), b);
}

TEST(Morph, PinholeFilled) {
  // Opening keeps the 7x7 block (its eroded ring dilates back), closing
  // fills the centre hole.
  const auto b = from_rows({"...........",
                           "...........",
                           "..#######..",
                           "..#######..",
                           "..#######..",
                           "..###.###..",
                           "..#######..",
                           "..#######..",
                           "..#######..",
                           "...........",
                           "..........."});
  const auto expected = from_rows({"...........",
                                  "...........",
                                  "..#######..",
                                  "..#######..",
                                  "..#######..",
                                  "..#######..",
                                  "..#######..",
                                  "..#######..",
                                  "..#######..",
                                  "...........",
                                  "..........."});
  EXPECT_EQ(morph_clean(b), expected);
}

TEST(Contours, TwoRectangles) {
  BinaryImage b(40, 20);
  for (int y = 2; y < 10; ++y)
    for (int x = 2; x < 12; ++x) b.set(x, y);
  for (int y = 5; y < 18; ++y)
    for (int x = 20; x < 30; ++x) b.set(x, y);
  const auto cs = extract_contours(b);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].bbox, (Box{2, 2, 12, 10}));
  EXPECT_EQ(cs[0].area, 80);
  EXPECT_DOUBLE_EQ(cs[0].solidity, 1.0);
  EXPECT_DOUBLE_EQ(cs[1].solidity, 1.0);
}

TEST(Contours, CShapeSolidityBelowOne) {
  const auto b = from_rows({"..........",
                            ".#######..",
                            ".#######..",
                            ".##.......",
                            ".##.......",
                            ".##.......",
                            ".#######..",
                            ".#######..",
                            ".........."});
  const auto cs = extract_contours(b);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area, b.count());
  // hull of the C is its 7x7 bbox
  EXPECT_NEAR(cs[0].solidity, 34.0 / 49.0, 1e-9);
  EXPECT_LT(cs[0].solidity, 1.0);
}

TEST(Contours, EmptyImage) { EXPECT_TRUE(extract_contours(BinaryImage(10, 10)).empty()); }

TEST(Mec, Examples) {
  Contour sq;
  sq.boundary = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  auto c = min_enclosing_circle(sq);
  EXPECT_NEAR(c.center.x, 5, 1e-3);
  EXPECT_NEAR(c.center.y, 5, 1e-3);
  EXPECT_NEAR(c.radius, 5 * std::sqrt(2.0), 1e-3);

  Contour pt;
  pt.boundary = {{7, 3}};
  EXPECT_NEAR(min_enclosing_circle(pt).radius, 0.0, 1e-6);

  Canvas disc(120, 120, {255, 255, 255});
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 120; ++x)
      if (std::hypot(x + 0.5 - 60, y + 0.5 - 60) <= 40) disc.set(x, y, {0, 0, 0});
  const auto b = binarize(disc.to_image());
  const auto cs = extract_contours(b.mask);
  ASSERT_EQ(cs.size(), 1u);
  const double r = min_enclosing_circle(cs[0]).radius;
  EXPECT_GE(r, 39.5);
  EXPECT_LE(r, 40.5);
}
