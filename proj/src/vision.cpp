#include "chartlens/vision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <opencv2/imgproc.hpp>

#include "cv_bridge.hpp"

namespace chartlens::vision {

std::optional<double> otsu_threshold(std::span<const std::uint8_t> samples) {
  std::array<long long, 256> hist{};
  for (auto s : samples) ++hist[s];
  const double total = static_cast<double>(samples.size());
  if (samples.empty()) return std::nullopt;
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * hist[i];

  double w0 = 0, sum0 = 0, best = -1;
  int best_k = -1;
  for (int k = 0; k < 255; ++k) {
    w0 += hist[k];
    sum0 += static_cast<double>(k) * hist[k];
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0, mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  if (best_k < 0) return std::nullopt;
  int hi = best_k + 1;
  while (hi < 256 && hist[hi] == 0) ++hi;
  int lo = best_k;
  while (lo > 0 && hist[lo] == 0) --lo;
  return (lo + hi) / 2.0;
}

std::vector<std::uint8_t> grayscale(const ChartImage& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(
        std::lround(luminance({px[3 * i], px[3 * i + 1], px[3 * i + 2]})));
  }
  return out;
}

std::vector<std::uint8_t> value_channel(const ChartImage& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max({px[3 * i], px[3 * i + 1], px[3 * i + 2]});
  return out;
}

bool detect_dark_background(const ChartImage& img) {
  constexpr int kBorder = 2;
  double sum = 0;
  long long n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool border = x < kBorder || y < kBorder || x >= img.width() - kBorder || y >= img.height() - kBorder;
      if (!border) continue;
      sum += luminance(img.at(x, y));
      ++n;
    }
  }
  return sum / static_cast<double>(n) < 128.0;
}

Binarization binarize(const ChartImage& img) {
  Binarization out;
  out.mask = BinaryImage(img.width(), img.height());
  const auto gray = grayscale(img);
  const auto value = value_channel(img);
  out.gray_threshold = otsu_threshold(gray);
  out.value_threshold = otsu_threshold(value);
  if (!out.gray_threshold && !out.value_threshold) {
    out.uniform = true;
    return out;
  }
  out.dark_background = detect_dark_background(img);
  auto bits = out.mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const bool fg_gray = out.gray_threshold && gray[i] < *out.gray_threshold;
    const bool fg_value = out.value_threshold && value[i] < *out.value_threshold;
    const bool fg = fg_gray || fg_value;
    bits[i] = (fg != out.dark_background) ? 1 : 0;
  }
  return out;
}

namespace {

const cv::Mat& kernel3() {
  static const cv::Mat k = cv::getStructuringElement(cv::MORPH_RECT, {3, 3});
  return k;
}

}  // namespace

BinaryImage morph_open(const BinaryImage& b) {
  cv::Mat m = detail::to_mat(b);
  cv::morphologyEx(m, m, cv::MORPH_OPEN, kernel3());
  return detail::from_mat(m);
}

BinaryImage morph_clean(const BinaryImage& b) {
  cv::Mat m = detail::to_mat(b);
  cv::morphologyEx(m, m, cv::MORPH_OPEN, kernel3());
  cv::morphologyEx(m, m, cv::MORPH_CLOSE, kernel3());
  return detail::from_mat(m);
}

std::vector<Contour> extract_contours(const BinaryImage& b) {
  std::vector<Contour> out;
  if (b.width() == 0 || b.height() == 0) return out;
  cv::Mat m = detail::to_mat(b);
  cv::Mat labels, stats, centroids;
  cv::connectedComponentsWithStats(m, labels, stats, centroids, 8, CV_32S);

  std::vector<std::vector<cv::Point>> contours;
  cv::findContours(m.clone(), contours, cv::RETR_EXTERNAL, cv::CHAIN_APPROX_NONE);

  for (const auto& c : contours) {
    if (c.empty()) continue;
    const int label = labels.at<int>(c.front());
    if (label == 0) continue;
    Contour contour;
    contour.boundary.reserve(c.size());
    for (const auto& p : c) contour.boundary.push_back({p.x, p.y});
    contour.area = stats.at<int>(label, cv::CC_STAT_AREA);
    const int x = stats.at<int>(label, cv::CC_STAT_LEFT);
    const int y = stats.at<int>(label, cv::CC_STAT_TOP);
    const int w = stats.at<int>(label, cv::CC_STAT_WIDTH);
    const int h = stats.at<int>(label, cv::CC_STAT_HEIGHT);
    contour.bbox = {x, y, x + w, y + h};

    std::vector<cv::Point> hull;
    cv::convexHull(c, hull);
    for (auto& p : hull) p -= cv::Point(x, y);
    cv::Mat hull_raster = cv::Mat::zeros(h, w, CV_8UC1);
    cv::fillConvexPoly(hull_raster, hull, cv::Scalar(255));
    const int hull_area = std::max(cv::countNonZero(hull_raster), 1);
    contour.solidity = static_cast<double>(contour.area) / hull_area;
    out.push_back(std::move(contour));
  }
  std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& c) {
    return std::tie(a.bbox.y0, a.bbox.x0) < std::tie(c.bbox.y0, c.bbox.x0);
  });
  return out;
}

Circle min_enclosing_circle(const Contour& c) {
  if (c.boundary.empty()) return {};
  if (c.boundary.size() == 1) return {{static_cast<double>(c.boundary[0].x), static_cast<double>(c.boundary[0].y)}, 0.0};
  std::vector<cv::Point2f> pts;
  pts.reserve(c.boundary.size());
  for (const auto& p : c.boundary) pts.emplace_back(static_cast<float>(p.x), static_cast<float>(p.y));
  cv::Point2f center;
  float radius = 0;
  cv::minEnclosingCircle(pts, center, radius);
  return {{center.x, center.y}, radius};
}

}  // namespace chartlens::vision
