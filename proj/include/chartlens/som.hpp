#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chartlens/canvas.hpp"
#include "chartlens/markset.hpp"

namespace chartlens {

enum class Verdict { Consistent, Inconsistent, Unverifiable };

std::string_view to_string(Verdict v) noexcept;

struct QaPair {
  std::string question;
  std::string answer;
};

/// Two line marks; the attributed span runs between their anchors.
struct LabelPair {
  std::string first;
  std::string second;
  friend bool operator==(const LabelPair&, const LabelPair&) = default;
  friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

struct FewShotExample {
  std::string question;
  std::string answer;
  std::string response;  // reasoning followed by the two sentinel lines
};

/// Few-shot examples per chart kind.
using FewShotSet = std::map<ChartKind, std::vector<FewShotExample>>;

const FewShotSet& default_few_shot();
/// {"bar": [{"question", "answer", "response"}, ...], "pie": [...], "line": [...]}.
/// Kinds missing from the file keep the defaults. Throws InputError when a
/// listed kind has fewer than 2 examples.
FewShotSet load_few_shot(const std::filesystem::path& path);

const std::vector<Rgb>& mark_palette();

struct TagPlacement {
  std::string label;
  Box box;
  Rgb color;
};

/// Tags centred on their anchors, clamped to the image and pushed down by
/// one tag height while they overlap an earlier tag.
std::vector<TagPlacement> layout_tags(const MarkSet& marks, Dims dims, int scale = 2);

/// Outlines every region and draws its label on a filled tag.
ChartImage render_marks(const ChartImage& img, const MarkSet& marks);

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  ChartImage marked_image;
  QaPair qa;
};

PromptBundle build_prompt(const ChartImage& marked, const MarkSet& marks, const QaPair& qa, ChartKind kind,
                          const FewShotSet& few_shot = default_few_shot());

/// Attribution content: plain labels for bar and pie charts, endpoint pairs
/// for line charts.
struct LabelSelection {
  std::vector<std::string> labels;
  std::vector<LabelPair> pairs;
  friend bool operator==(const LabelSelection&, const LabelSelection&) = default;
};

/// The two sentinel lines the model is asked to end with.
std::string render_grammar(Verdict verdict, const LabelSelection& selection, ChartKind kind);

struct ParsedResponse {
  Verdict verdict = Verdict::Unverifiable;
  LabelSelection selection;  // canonical labels, in mark order
  std::vector<std::string> warnings;
};

/// Uses the last VALIDATION and ATTRIBUTION lines (case-insensitive).
/// Unknown labels and cross-series pairs are dropped with a warning. A
/// missing ATTRIBUTION line yields an empty selection and Unverifiable.
ParsedResponse parse_attribution_response(std::string_view text, const MarkSet& marks, ChartKind kind);

}  // namespace chartlens
