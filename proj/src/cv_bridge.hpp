#pragma once

#include <opencv2/core.hpp>

#include "chartlens/image.hpp"

namespace chartlens::detail {

inline cv::Mat to_mat(const BitMask& m) {
  cv::Mat out(m.height(), m.width(), CV_8UC1);
  const auto bits = m.bits();
  for (int y = 0; y < m.height(); ++y) {
    auto* row = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.width(); ++x) row[x] = bits[static_cast<std::size_t>(y) * m.width() + x] ? 255 : 0;
  }
  return out;
}

inline BitMask from_mat(const cv::Mat& mat) {
  BitMask out(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) out.set(x, y, row[x] != 0);
  }
  return out;
}

inline cv::Mat gray_mat(std::span<const std::uint8_t> gray, int width, int height) {
  return cv::Mat(height, width, CV_8UC1, const_cast<std::uint8_t*>(gray.data())).clone();
}

}  // namespace chartlens::detail
