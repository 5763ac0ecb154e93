#include "chartlens/markset.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace chartlens {

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

MarkSet::MarkSet(std::string chart_id, ChartKind kind, Dims dims, std::vector<Mark> marks,
                 std::vector<std::string> warnings)
    : chart_id_(std::move(chart_id)),
      kind_(kind),
      dims_(dims),
      marks_(std::move(marks)),
      warnings_(std::move(warnings)) {
  for (std::size_t i = 0; i < marks_.size(); ++i) {
    const auto& label = marks_[i].region.label;
    if (!label || label->empty()) throw std::invalid_argument("every mark needs a label");
    if (!by_label_.emplace(to_upper(*label), i).second) {
      throw std::invalid_argument("duplicate mark label " + *label);
    }
  }
}

std::optional<std::size_t> MarkSet::index_of(std::string_view label) const {
  const auto it = by_label_.find(to_upper(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

}  // namespace chartlens
