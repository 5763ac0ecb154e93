#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chartlens/geometry.hpp"

namespace chartlens {

/// One labeled candidate region on a chart.
struct Mark {
  Region region;  // region.label is always set
  PointF anchor;  // tag position: bar centroid, sector mid-angle point, line segment end
  bool refined = false;
  int series = 0;   // line marks only (1-based)
  int segment = 0;  // line marks only (1-based)

  const std::string& label() const { return *region.label; }
  friend bool operator==(const Mark&, const Mark&) = default;
};

/// Ordered, uniquely labeled marks for a single chart.
class MarkSet {
 public:
  MarkSet() = default;
  /// Throws std::invalid_argument if a mark is unlabeled or labels repeat
  /// (compared case-insensitively).
  MarkSet(std::string chart_id, ChartKind kind, Dims dims, std::vector<Mark> marks,
          std::vector<std::string> warnings = {});

  const std::string& chart_id() const noexcept { return chart_id_; }
  ChartKind kind() const noexcept { return kind_; }
  Dims dims() const noexcept { return dims_; }
  const std::vector<Mark>& marks() const noexcept { return marks_; }
  std::size_t size() const noexcept { return marks_.size(); }
  bool empty() const noexcept { return marks_.empty(); }
  const Mark& operator[](std::size_t i) const { return marks_[i]; }

  /// Case-insensitive label lookup.
  std::optional<std::size_t> index_of(std::string_view label) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  bool low_confidence() const noexcept { return low_confidence_; }
  void set_low_confidence(bool v) noexcept { low_confidence_ = v; }

  friend bool operator==(const MarkSet&, const MarkSet&) = default;

 private:
  std::string chart_id_;
  ChartKind kind_ = ChartKind::Bar;
  Dims dims_;
  std::vector<Mark> marks_;
  std::vector<std::string> warnings_;
  bool low_confidence_ = false;
  std::unordered_map<std::string, std::size_t> by_label_;
};

std::string to_upper(std::string_view s);

}  // namespace chartlens
