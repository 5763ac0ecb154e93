#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chartlens/json_io.hpp"

namespace chartlens {

struct DatasetRecord {
  std::string id;
  std::filesystem::path chart_path;  // resolved against the dataset file's directory
  ChartKind kind = ChartKind::Bar;
  std::string question;
  std::string answer;
  std::vector<Region> gt_regions;  // bar and pie
  std::vector<Point> gt_points;    // line
  int line_no = 0;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::vector<std::string> warnings;
};

/// Parses one JSONL line. Throws InputError.
DatasetRecord parse_record(const Json& j, const std::filesystem::path& base_dir);

/// Throws InputError listing every bad line as "line N: reason". Chart files
/// are not opened here.
Dataset load_dataset(const std::filesystem::path& path);

/// `chart` is written relative to `base_dir` when possible.
Json record_to_json(const DatasetRecord& r, const std::filesystem::path& base_dir);

}  // namespace chartlens
