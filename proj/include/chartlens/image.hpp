#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chartlens {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// ITU-R BT.601 luma, the same weights OpenCV uses for RGB->GRAY.
double luminance(Rgb c) noexcept;

struct Dims {
  int width = 0;
  int height = 0;

  long long area() const noexcept { return static_cast<long long>(width) * height; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Immutable row-major 8-bit RGB raster. Construction enforces the
/// minimum chart size of 16x16.
class ChartImage {
 public:
  static constexpr int kMinSide = 16;

  ChartImage(int width, int height, std::vector<std::uint8_t> rgb, std::string id = {});

  static ChartImage filled(int width, int height, Rgb color, std::string id = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Dims dims() const noexcept { return {width_, height_}; }
  const std::string& id() const noexcept { return id_; }
  std::span<const std::uint8_t> pixels() const noexcept { return rgb_; }

  Rgb at(int x, int y) const noexcept {
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  ChartImage with_id(std::string id) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
  std::string id_;
};

/// Dense 1-bit raster (one byte per pixel, 0 or 1).
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height);
  BitMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Dims dims() const noexcept { return {width_, height_}; }

  bool get(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) noexcept { bits_[index(x, y)] = v ? 1 : 0; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  long long count() const noexcept;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

ChartImage load_png(const std::filesystem::path& path);
ChartImage decode_png(std::span<const std::uint8_t> bytes, std::string id = {});
std::vector<std::uint8_t> encode_png(const ChartImage& img);
void save_png(const ChartImage& img, const std::filesystem::path& path);

/// FNV-1a over raw bytes; used for deterministic seeding and caching.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace chartlens
