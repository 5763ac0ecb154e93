#include "chartlens/image.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <numeric>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"

namespace chartlens {

double luminance(Rgb c) noexcept { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

ChartImage::ChartImage(int width, int height, std::vector<std::uint8_t> rgb, std::string id)
    : width_(width), height_(height), rgb_(std::move(rgb)), id_(std::move(id)) {
  if (width < kMinSide || height < kMinSide) {
    throw InputError("chart image must be at least 16x16, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  if (rgb_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw InputError("pixel buffer size does not match image dimensions");
  }
}

ChartImage ChartImage::filled(int width, int height, Rgb color, std::string id) {
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * 3);
  for (std::size_t i = 0; i < buf.size(); i += 3) {
    buf[i] = color.r;
    buf[i + 1] = color.g;
    buf[i + 2] = color.b;
  }
  return ChartImage(width, height, std::move(buf), std::move(id));
}

ChartImage ChartImage::with_id(std::string id) const {
  ChartImage copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

BitMask::BitMask(int width, int height)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

BitMask::BitMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("bit buffer size does not match mask dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

long long BitMask::count() const noexcept {
  return std::accumulate(bits_.begin(), bits_.end(), 0LL);
}

namespace {

ChartImage from_bgr(const cv::Mat& bgr, std::string id) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  std::vector<std::uint8_t> buf(rgb.total() * 3);
  for (int y = 0; y < rgb.rows; ++y) {
    std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, buf.data() + static_cast<std::size_t>(y) * rgb.cols * 3);
  }
  return ChartImage(rgb.cols, rgb.rows, std::move(buf), std::move(id));
}

cv::Mat to_bgr(const ChartImage& img) {
  cv::Mat rgb(img.height(), img.width(), CV_8UC3, const_cast<std::uint8_t*>(img.pixels().data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

}  // namespace

ChartImage decode_png(std::span<const std::uint8_t> bytes, std::string id) {
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
  if (bgr.empty()) throw InputError("cannot decode image data");
  return from_bgr(bgr, std::move(id));
}

ChartImage load_png(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw InputError("cannot read image " + path.string());
  return from_bgr(bgr, path.stem().string());
}

std::vector<std::uint8_t> encode_png(const ChartImage& img) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", to_bgr(img), out, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw std::runtime_error("png encoding failed");
  }
  return out;
}

void save_png(const ChartImage& img, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(img));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw InputError("base64 payload length is not a multiple of 4");
  std::vector<std::uint8_t> out(clean.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw InputError("malformed base64 payload");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t pad = 0;
  if (!clean.empty() && clean.back() == '=') ++pad;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace chartlens
