#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chartlens/dataset.hpp"
#include "chartlens/line_marks.hpp"
#include "chartlens/markset.hpp"

namespace chartlens {

enum class BarLayout { Simple, Grouped, Stacked };
enum class Orientation { Vertical, Horizontal };
enum class Theme { Light, Dark };

std::string_view to_string(BarLayout v) noexcept;
std::string_view to_string(Theme v) noexcept;
Theme parse_theme(std::string_view text);

struct ChartStyle {
  bool grid = true;
  bool ticks = true;
  int font_scale = 1;
  bool pie_borders = false;  // 1-px background-coloured radial lines
};

struct Series {
  std::string name;
  std::vector<double> values;  // one per category (bar, pie) or per x position (line)
};

struct ChartSpec {
  ChartKind kind = ChartKind::Bar;
  BarLayout layout = BarLayout::Simple;
  Orientation orientation = Orientation::Vertical;
  std::vector<std::string> categories;  // bar/pie categories, line x labels
  std::vector<Series> series;
  Theme theme = Theme::Light;
  std::vector<Rgb> palette;  // one colour per series (bar, line) or per category (pie)
  ChartStyle style;
  std::uint64_t seed = 0;
  int width = 800;
  int height = 500;
  double pie_start_deg = 0;  // first wedge edge, clockwise from +x

  /// Throws InputError.
  void validate() const;
};

/// Pairwise max channel difference.
int channel_distance(Rgb a, Rgb b) noexcept;

struct GeneratedChart {
  ChartImage image;
  MarkSet gt;                      // bars and sectors; empty for lines
  std::vector<std::pair<int, int>> gt_items;  // (category, series) per gt mark
  std::vector<LineTrace> traces;   // line vertices, one per series in spec order
  std::vector<double> boundaries;  // pie wedge edge angles in radians, sorted in [0, 2pi)
  std::vector<std::string> notes;
};

/// Throws InputError("too many bars for canvas") when a bar would be
/// narrower than 4 px.
GeneratedChart gen_bar_chart(const ChartSpec& spec);
/// Throws InputError when a share is below 2 degrees.
GeneratedChart gen_pie_chart(const ChartSpec& spec);
GeneratedChart gen_line_chart(const ChartSpec& spec);
GeneratedChart generate_chart(const ChartSpec& spec);

struct RandomSpecOptions {
  int width = 800;
  int height = 500;
  std::optional<Theme> theme;
  std::optional<int> sectors;     // pie: exact sector count
  int min_sectors = 3;
  int max_sectors = 8;
  double min_sector_deg = 20.0;
  int max_bars = 12;
  int min_line_series = 1;
  int max_line_series = 2;
};

/// Deterministic in (kind, seed, opts).
ChartSpec random_spec(ChartKind kind, std::uint64_t seed, const RandomSpecOptions& opts = {});

struct GeneratedRecord {
  DatasetRecord record;
  std::string mock_response;  // scripted reply that names the correct marks
};

/// Template QA naming one gt element (a span for lines), plus the reply a
/// correct model would give for the marks the default pipeline produces.
GeneratedRecord make_record(const ChartSpec& spec, const GeneratedChart& chart, const std::string& id,
                            const std::filesystem::path& chart_path);

struct GenerateOptions {
  std::vector<ChartKind> kinds{ChartKind::Bar};  // cycled over the records
  int count = 10;
  std::uint64_t seed = 0;
  RandomSpecOptions spec;
};

/// Writes charts/<id>.png, dataset.jsonl and mock_mllm.json into out_dir.
std::vector<DatasetRecord> generate_dataset(const std::filesystem::path& out_dir, const GenerateOptions& opts);

}  // namespace chartlens
