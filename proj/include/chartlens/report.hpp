#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chartlens/attribute.hpp"
#include "chartlens/dataset.hpp"
#include "chartlens/metrics.hpp"

namespace chartlens {

struct RecordResult {
  std::string id;
  ChartKind kind = ChartKind::Bar;
  bool failed = false;
  std::string error;
  std::size_t n_detected = 0;
  std::size_t n_gt = 0;       // regions or points
  std::size_t matched = 0;    // matched pairs or covered points
  Prf1 scores;                // bar and pie
  LineScores line;            // line
};

struct KindAggregate {
  std::size_t records = 0;
  std::size_t failed = 0;
  // bar and pie
  std::size_t matched = 0;
  std::size_t detected = 0;
  std::size_t gt = 0;
  Prf1 micro;
  Prf1 macro;
  // line
  std::size_t covered = 0;
  std::size_t points = 0;
  double detection_micro = 0;
  double detection_macro = 0;
  double area_mean = 0;
};

struct EvalReport {
  std::string system;
  EvalConfig cfg;
  std::vector<RecordResult> records;  // sorted by id
  std::map<ChartKind, KindAggregate> by_kind;
  std::vector<std::string> warnings;
};

/// Maps a record and its chart to detected regions. Exceptions are
/// recorded as failures.
using AttributionSystem = std::function<AttributionSet(const DatasetRecord&, const ChartImage&)>;

/// Returns the ground truth; line points become 1x1 boxes.
AttributionSet oracle_system(const DatasetRecord& r, const ChartImage& img);

RecordResult score_record(const DatasetRecord& r, const AttributionSet& detected, Dims dims, const EvalConfig& cfg);

/// Sorts records by id and folds them into per-kind aggregates.
EvalReport aggregate(std::string system, const EvalConfig& cfg, std::vector<RecordResult> records);

EvalReport evaluate_dataset(const std::vector<DatasetRecord>& records, const AttributionSystem& system,
                            const EvalConfig& cfg, const std::string& system_name, int jobs = 1);

Json report_to_json(const EvalReport& report);

/// Three aligned tables: bar (P/R/F1), line (Detection%/Chart-Area%), pie
/// (P/R/F1). Values are percentages with two decimals.
std::string report_table(const EvalReport& report);

}  // namespace chartlens
