#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chartlens/geometry.hpp"
#include "chartlens/image.hpp"

namespace chartlens::vision {

using BinaryImage = BitMask;

struct Binarization {
  BinaryImage mask;
  bool dark_background = false;
  /// Set when both channels have zero variance; the mask is then empty.
  bool uniform = false;
  std::optional<double> gray_threshold;
  std::optional<double> value_threshold;
};

struct Contour {
  std::vector<Point> boundary;  // outer boundary pixels, closed
  long long area = 0;           // pixels in the 8-connected component
  double solidity = 1.0;        // area / rasterized convex hull area
  Box bbox;
};

struct Circle {
  PointF center;
  double radius = 0;
};

/// Otsu's threshold over 8-bit samples, returned halfway between the two
/// class boundary levels (so it never equals a sample value). nullopt when
/// all samples are equal.
std::optional<double> otsu_threshold(std::span<const std::uint8_t> samples);

std::vector<std::uint8_t> grayscale(const ChartImage& img);
/// HSV value channel, max(R, G, B).
std::vector<std::uint8_t> value_channel(const ChartImage& img);

/// Mean luminance of the 2-pixel image border is below 128.
bool detect_dark_background(const ChartImage& img);

/// Otsu on grayscale and on HSV value; foreground is the dark side of either
/// threshold, and the fused mask is inverted for dark-background charts.
Binarization binarize(const ChartImage& img);

/// One 3x3 opening followed by one 3x3 closing.
BinaryImage morph_clean(const BinaryImage& b);
/// 3x3 opening only.
BinaryImage morph_open(const BinaryImage& b);

/// External boundaries of 8-connected components ordered by bbox (top, left).
std::vector<Contour> extract_contours(const BinaryImage& b);

Circle min_enclosing_circle(const Contour& c);

}  // namespace chartlens::vision
