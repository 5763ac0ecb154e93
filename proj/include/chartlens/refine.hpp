#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chartlens/geometry.hpp"
#include "chartlens/http_util.hpp"
#include "chartlens/image.hpp"

namespace chartlens {

struct Refinement {
  Geometry geometry;
  double score = 0;  // confidence in [0, 1]
};

/// Point-prompted mask refinement. Implementations must tolerate
/// concurrent calls. Remote implementations throw ServiceError when the
/// service cannot be reached.
class RefinementBackend {
 public:
  virtual ~RefinementBackend() = default;
  /// `heuristic` is the region the points were sampled from; remote
  /// backends only see the image and the points.
  virtual Refinement refine(const ChartImage& image, const Region& heuristic, std::span<const Point> points) = 0;
};

/// Returns the heuristic region untouched with confidence 1.
class IdentityRefiner final : public RefinementBackend {
 public:
  Refinement refine(const ChartImage& image, const Region& heuristic, std::span<const Point> points) override;
};

struct RemoteRefinerOptions {
  std::string base_url;
  int max_in_flight = 4;
  int retries = 1;
  std::chrono::milliseconds timeout{30000};
};

/// Client for POST {base_url}/refine.
class RemoteRefiner final : public RefinementBackend {
 public:
  explicit RemoteRefiner(RemoteRefinerOptions opts);
  Refinement refine(const ChartImage& image, const Region& heuristic, std::span<const Point> points) override;

 private:
  std::string encoded_image(const ChartImage& image);

  RemoteRefinerOptions opts_;
  http::Endpoint endpoint_;
  http::InFlightLimiter limiter_;
  std::mutex cache_mu_;
  std::uint64_t cached_hash_ = 0;
  std::string cached_b64_;
};

struct RefineConfig {
  int n_points = 5;
  double accept_min_iou = 0.5;
  std::optional<std::string> remote_url;  // unset: Identity backend
};

std::unique_ptr<RefinementBackend> make_refiner(const RefineConfig& cfg);

/// Deepest interior pixel (max distance to the boundary) followed by n-1
/// pixels with boundary distance >= 2, drawn with a generator seeded from
/// the region's contents. Regions thinner than that repeat their centroid.
std::vector<Point> sample_prompt_points(const Region& r, int n);

struct RefinedRegion {
  Region region;
  bool refined = false;
  std::optional<std::string> warning;
};

/// Accepts the backend's mask iff it is non-empty and overlaps the heuristic
/// region with iou >= accept_min_iou; otherwise keeps the heuristic region.
RefinedRegion refine_region(const ChartImage& img, const Region& r, const RefineConfig& cfg,
                            RefinementBackend& backend);

}  // namespace chartlens
