#pragma once

#include <stdexcept>
#include <string>

namespace chartlens {

/// Bad user input: unreadable files, schema violations, invalid specs.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regions from charts with different dimensions were compared.
class IncompatibleChartsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mark generation could not produce a usable result for the chart.
class SegmentationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A remote dependency (MLLM, refiner, line extractor) failed.
class ServiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps a failure with the pipeline stage it came from ("segment", "query", ...).
class StageError : public std::runtime_error {
 public:
  enum class Cause { Input, Segmentation, Service };

  StageError(std::string stage, Cause cause, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), cause_(cause) {}

  const std::string& stage() const noexcept { return stage_; }
  Cause cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  Cause cause_;
};

}  // namespace chartlens
