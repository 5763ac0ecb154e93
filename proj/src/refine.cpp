#include "chartlens/refine.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <opencv2/imgproc.hpp>
#include <random>

#include "chartlens/error.hpp"
#include "cv_bridge.hpp"

namespace chartlens {

Refinement IdentityRefiner::refine(const ChartImage&, const Region& heuristic, std::span<const Point>) {
  return {heuristic.geometry, 1.0};
}

RemoteRefiner::RemoteRefiner(RemoteRefinerOptions opts)
    : opts_(std::move(opts)), endpoint_(http::parse_url(opts_.base_url)), limiter_(opts_.max_in_flight) {}

std::string RemoteRefiner::encoded_image(const ChartImage& image) {
  const auto h = fnv1a64(image.pixels(), static_cast<std::uint64_t>(image.width()) * 131 + image.height());
  std::lock_guard lock(cache_mu_);
  if (h != cached_hash_ || cached_b64_.empty()) {
    cached_b64_ = base64_encode(encode_png(image));
    cached_hash_ = h;
  }
  return cached_b64_;
}

Refinement RemoteRefiner::refine(const ChartImage& image, const Region&, std::span<const Point> points) {
  nlohmann::json req;
  req["image_png_b64"] = encoded_image(image);
  auto pts = nlohmann::json::array();
  for (const auto& p : points) pts.push_back({p.x, p.y});
  req["points"] = std::move(pts);

  http::Response res;
  {
    auto permit = limiter_.acquire();
    res = http::post_with_retry(endpoint_, "/refine", req.dump(), {}, opts_.timeout, opts_.retries);
  }
  if (res.status == 0) throw ServiceError("refiner unreachable: " + res.error);
  if (res.status != 200) throw ServiceError("refiner returned HTTP " + std::to_string(res.status) + ": " + res.body);
  try {
    const auto body = nlohmann::json::parse(res.body);
    const int w = body.at("width").get<int>();
    const int h = body.at("height").get<int>();
    if (w != image.width() || h != image.height()) {
      throw ServiceError("refiner mask is " + std::to_string(w) + "x" + std::to_string(h) + ", chart is " +
                         std::to_string(image.width()) + "x" + std::to_string(image.height()));
    }
    Refinement out;
    out.geometry = RleMask::parse(body.at("mask_rle").get<std::string>(), w, h);
    out.score = std::clamp(body.at("score").get<double>(), 0.0, 1.0);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(std::string("malformed refiner response: ") + e.what());
  } catch (const InputError& e) {
    throw ServiceError(std::string("malformed refiner response: ") + e.what());
  }
}

std::unique_ptr<RefinementBackend> make_refiner(const RefineConfig& cfg) {
  if (cfg.remote_url) return std::make_unique<RemoteRefiner>(RemoteRefinerOptions{*cfg.remote_url});
  return std::make_unique<IdentityRefiner>();
}

namespace {

std::uint64_t region_hash(const Region& r) {
  std::vector<std::uint8_t> bytes;
  auto push_int = [&](long long v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  };
  push_int(static_cast<int>(r.kind));
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Box>) {
          push_int(0);
          push_int(g.x0), push_int(g.y0), push_int(g.x1), push_int(g.y1);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          push_int(1);
          for (const auto& p : g.vertices) push_int(p.x), push_int(p.y);
        } else {
          push_int(2);
          push_int(g.width()), push_int(g.height());
          for (auto run : g.runs()) push_int(run);
        }
      },
      r.geometry);
  return fnv1a64(bytes);
}

}  // namespace

std::vector<Point> sample_prompt_points(const Region& r, int n) {
  n = std::max(n, 1);
  const Box window = bounding_box(r).expanded(1);
  const BitMask raster = rasterize(r, window);
  cv::Mat mask = detail::to_mat(raster);
  cv::Mat dist;
  cv::distanceTransform(mask, dist, cv::DIST_L2, cv::DIST_MASK_PRECISE);

  double max_d = 0;
  cv::Point max_loc;
  cv::minMaxLoc(dist, nullptr, &max_d, nullptr, &max_loc);

  std::vector<Point> candidates;
  for (int y = 0; y < dist.rows; ++y)
    for (int x = 0; x < dist.cols; ++x)
      if (dist.at<float>(y, x) >= 2.0f) candidates.push_back({x + window.x0, y + window.y0});

  if (candidates.empty()) {
    const PointF c = pixel_centroid(r);
    return std::vector<Point>(static_cast<std::size_t>(n), Point{static_cast<int>(std::floor(c.x)),
                                                                static_cast<int>(std::floor(c.y))});
  }

  std::vector<Point> out;
  out.push_back({max_loc.x + window.x0, max_loc.y + window.y0});
  std::mt19937_64 rng(region_hash(r));
  // Partial Fisher-Yates without replacement while candidates last. The raw
  // mt19937_64 output is fixed by the standard; std distributions are not.
  for (int i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    if (k < candidates.size()) {
      const std::size_t pick = k + static_cast<std::size_t>(rng() % (candidates.size() - k));
      std::swap(candidates[k], candidates[pick]);
      out.push_back(candidates[k]);
    } else {
      out.push_back(candidates[static_cast<std::size_t>(rng() % candidates.size())]);
    }
  }
  return out;
}

RefinedRegion refine_region(const ChartImage& img, const Region& r, const RefineConfig& cfg,
                            RefinementBackend& backend) {
  const auto points = sample_prompt_points(r, cfg.n_points);
  Refinement proposal;
  try {
    proposal = backend.refine(img, r, points);
  } catch (const ServiceError& e) {
    return {r, false, std::string("refinement skipped: ") + e.what()};
  }
  Region candidate{r.kind, std::move(proposal.geometry), r.label};
  if (region_area(candidate) == 0) return {r, false, "refinement rejected: empty mask"};
  double overlap = 0;
  try {
    overlap = iou(candidate, r, img.dims());
  } catch (const IncompatibleChartsError& e) {
    return {r, false, std::string("refinement rejected: ") + e.what()};
  }
  if (overlap < cfg.accept_min_iou) return {r, false, std::nullopt};
  return {std::move(candidate), true, std::nullopt};
}

}  // namespace chartlens
