#include "chartlens/som.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"

namespace chartlens {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::Inconsistent: return "INCONSISTENT";
    case Verdict::Unverifiable: return "UNVERIFIABLE";
  }
  return "UNVERIFIABLE";
}

const FewShotSet& default_few_shot() {
  static const FewShotSet set = {
      {ChartKind::Bar,
       {{"Which year had the highest revenue?", "2019 had the highest revenue.",
         "Step 1: The chart shows revenue per year as vertical bars.\n"
         "Step 2: Bar B3 (2019) is the tallest bar; B1, B2 and B4 are shorter.\n"
         "Step 3: The answer names 2019, which matches B3.\n"
         "VALIDATION: CONSISTENT\nATTRIBUTION: [B3]"},
        {"How much larger is the value for Canada than for Mexico?", "Canada is about twice Mexico.",
         "Step 1: The bars compare countries.\n"
         "Step 2: B1 is Canada and reaches about 40; B2 is Mexico and reaches about 35.\n"
         "Step 3: 40 is not twice 35, so the answer does not match the chart. The evidence is B1 and B2.\n"
         "VALIDATION: INCONSISTENT\nATTRIBUTION: [B1, B2]"}}},
      {ChartKind::Pie,
       {{"What share of respondents chose email?", "Email was chosen by 45% of respondents.",
         "Step 1: The pie splits respondents by preferred channel.\n"
         "Step 2: Sector S2 is labeled email and covers a little less than half of the circle.\n"
         "Step 3: 45% agrees with S2.\n"
         "VALIDATION: CONSISTENT\nATTRIBUTION: [S2]"},
        {"Which two categories together make up the majority?", "Rent and food make up the majority.",
         "Step 1: The pie shows monthly spending.\n"
         "Step 2: S1 (rent) is about 35% and S4 (food) is about 20%; together 55%.\n"
         "Step 3: 55% is a majority, so the answer holds. The evidence is S1 and S4.\n"
         "VALIDATION: CONSISTENT\nATTRIBUTION: [S1, S4]"}}},
      {ChartKind::Line,
       {{"How did sales change between 2010 and 2014?", "Sales rose steadily from 2010 to 2014.",
         "Step 1: Line 1 shows sales over time; its marked points run left to right.\n"
         "Step 2: From L1-2 (2010) to L1-6 (2014) the line climbs without a dip.\n"
         "Step 3: The answer describes that rise.\n"
         "VALIDATION: CONSISTENT\nATTRIBUTION: [(L1-2,L1-6)]"},
        {"When did the second series peak?", "The second series peaked at the start.",
         "Step 1: There are two lines; line 2 is the lower one.\n"
         "Step 2: Line 2 is highest between L2-7 and L2-8, near the end, not at the start.\n"
         "Step 3: The answer contradicts the chart; the peak span is the evidence.\n"
         "VALIDATION: INCONSISTENT\nATTRIBUTION: [(L2-7,L2-8)]"}}},
  };
  return set;
}

FewShotSet load_few_shot(const std::filesystem::path& path) {
  FewShotSet set = default_few_shot();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("few-shot file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw InputError("few-shot file " + path.string() + ": expected an object");
  for (const auto& [key, list] : j.items()) {
    const ChartKind kind = parse_chart_kind(key);
    std::vector<FewShotExample> examples;
    try {
      for (const auto& e : list)
        examples.push_back({e.at("question").get<std::string>(), e.at("answer").get<std::string>(),
                            e.at("response").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw InputError("few-shot file " + path.string() + ": " + e.what());
    }
    if (examples.size() < 2) throw InputError("few-shot file " + path.string() + ": " + key + " needs at least 2 examples");
    set[kind] = std::move(examples);
  }
  return set;
}

const std::vector<Rgb>& mark_palette() {
  static const std::vector<Rgb> palette = {
      {230, 25, 75}, {0, 130, 200}, {60, 180, 75}, {245, 130, 48},
      {145, 30, 180}, {240, 50, 230}, {0, 128, 128}, {128, 0, 0},
  };
  return palette;
}

std::vector<TagPlacement> layout_tags(const MarkSet& marks, Dims dims, int scale) {
  std::vector<TagPlacement> placed;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const auto& m = marks[i];
    const int w = std::min(Canvas::text_width(m.label(), scale) + 4, dims.width);
    const int h = std::min(Canvas::text_height(scale) + 4, dims.height);
    int x0 = std::clamp(round_px(m.anchor.x - w / 2.0), 0, dims.width - w);
    int y0 = std::clamp(round_px(m.anchor.y - h / 2.0), 0, dims.height - h);
    auto overlaps = [&](const Box& b) {
      return std::any_of(placed.begin(), placed.end(), [&](const TagPlacement& t) { return !t.box.intersect(b).empty(); });
    };
    const int max_steps = dims.height / std::max(h, 1) + 1;
    for (int step = 0; step < max_steps && overlaps({x0, y0, x0 + w, y0 + h}); ++step) {
      y0 += h;
      if (y0 + h > dims.height) y0 = 0;
    }
    placed.push_back({m.label(), {x0, y0, x0 + w, y0 + h}, mark_palette()[i % mark_palette().size()]});
  }
  return placed;
}

ChartImage render_marks(const ChartImage& img, const MarkSet& marks) {
  if (marks.empty()) return img;
  Canvas canvas(img);
  const auto& palette = mark_palette();
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const Rgb c = palette[i % palette.size()];
    canvas.outline_region(marks[i].region, c, 2);
    if (marks.kind() == ChartKind::Line) {
      const int ax = static_cast<int>(std::floor(marks[i].anchor.x));
      const int ay = static_cast<int>(std::floor(marks[i].anchor.y));
      canvas.fill_rect(Box{ax - 2, ay - 2, ax + 3, ay + 3}.clamped(img.dims()), c);
    }
  }
  constexpr int kScale = 2;
  for (const auto& tag : layout_tags(marks, img.dims(), kScale)) {
    canvas.fill_rect(tag.box, tag.color);
    const Rgb text = luminance(tag.color) > 140 ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
    canvas.draw_text(tag.box.x0 + 2, tag.box.y0 + 2, tag.label, text, kScale);
  }
  return canvas.to_image(img.id());
}

namespace {

std::string_view element_noun(ChartKind kind) {
  switch (kind) {
    case ChartKind::Bar: return "bar";
    case ChartKind::Pie: return "pie sector";
    case ChartKind::Line: return "marked point on a line";
  }
  return "element";
}

}  // namespace

PromptBundle build_prompt(const ChartImage& marked, const MarkSet& marks, const QaPair& qa, ChartKind kind,
                          const FewShotSet& few_shot) {
  PromptBundle p{"", "", marked, qa};
  p.system_text =
      "You are a careful chart analyst. You verify answers about charts and point to the chart elements "
      "that support them.";

  std::ostringstream u;
  u << "Chart attribution means finding the elements of a chart that support a given answer to a question "
       "about that chart.\n"
    << "The attached " << to_string(kind) << " chart has been overlaid with labeled marks. Each label names one "
    << element_noun(kind) << ".\n";
  u << "Marked labels: ";
  for (std::size_t i = 0; i < marks.size(); ++i) u << (i ? ", " : "") << marks[i].label();
  if (marks.empty()) u << "(none)";
  u << "\n";
  if (kind == ChartKind::Line) {
    u << "Labels have the form L<line>-<point>. Points on each line are numbered from left to right. "
         "Attribute a span of a line as a pair of points on the same line, written (L1-2,L1-5). "
         "Several spans are separated by commas.\n";
  }
  u << "\nExamples:\n";
  const auto it = few_shot.find(kind);
  if (it != few_shot.end()) {
    int n = 1;
    for (const auto& ex : it->second) {
      u << "Example " << n++ << "\nQuestion: " << ex.question << "\nAnswer: " << ex.answer << "\nResponse:\n"
        << ex.response << "\n\n";
    }
  }
  u << "Now the task.\nQuestion: " << qa.question << "\nAnswer: " << qa.answer << "\n\n"
    << "Think step by step:\n"
    << "1. Restate what the chart shows and read the values relevant to the question.\n"
    << "2. Decide whether the answer is consistent with the chart and write the line\n"
    << "VALIDATION: CONSISTENT|INCONSISTENT|UNVERIFIABLE\n"
    << "3. End with one line listing the supporting labels, for example\n";
  if (kind == ChartKind::Line) {
    u << "ATTRIBUTION: [(L1-2,L1-5)]\n";
  } else {
    const std::string a = kind == ChartKind::Pie ? "S" : "B";
    u << "ATTRIBUTION: [" << a << "2, " << a << "5]\n";
  }
  u << "Use only labels that appear in the image. Write ATTRIBUTION: [] when nothing supports the answer.\n";
  p.user_text = u.str();
  return p;
}

std::string render_grammar(Verdict verdict, const LabelSelection& selection, ChartKind kind) {
  std::string out = "VALIDATION: " + std::string(to_string(verdict)) + "\nATTRIBUTION: [";
  if (kind == ChartKind::Line) {
    for (std::size_t i = 0; i < selection.pairs.size(); ++i)
      out += (i ? ", (" : "(") + selection.pairs[i].first + "," + selection.pairs[i].second + ")";
  } else {
    for (std::size_t i = 0; i < selection.labels.size(); ++i) out += (i ? ", " : "") + selection.labels[i];
  }
  return out + "]";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Text after the last occurrence of `key` up to the end of that line.
std::optional<std::string> last_sentinel(std::string_view text, const std::string& upper, std::string_view key) {
  const auto pos = upper.rfind(key);
  if (pos == std::string::npos) return std::nullopt;
  const auto start = pos + key.size();
  const auto end = text.find('\n', start);
  return std::string(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

}  // namespace

ParsedResponse parse_attribution_response(std::string_view text, const MarkSet& marks, ChartKind kind) {
  ParsedResponse out;
  const std::string upper = to_upper(text);

  const auto attribution = last_sentinel(text, upper, "ATTRIBUTION:");
  if (!attribution) {
    out.warnings.emplace_back("response has no ATTRIBUTION line");
    return out;
  }

  if (const auto v = last_sentinel(text, upper, "VALIDATION:")) {
    std::string word;
    for (char c : to_upper(*v)) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        word += c;
      } else if (!word.empty()) {
        break;
      }
    }
    if (word == "CONSISTENT") {
      out.verdict = Verdict::Consistent;
    } else if (word == "INCONSISTENT") {
      out.verdict = Verdict::Inconsistent;
    } else if (word == "UNVERIFIABLE") {
      out.verdict = Verdict::Unverifiable;
    } else {
      out.warnings.push_back("unrecognized validation verdict '" + trim(*v) + "'");
    }
  } else {
    out.warnings.emplace_back("response has no VALIDATION line");
  }

  std::string body = *attribution;
  if (const auto open = body.find('['); open != std::string::npos) {
    const auto close = body.find(']', open);
    body = body.substr(open + 1, close == std::string::npos ? std::string::npos : close - open - 1);
  }

  auto resolve = [&](const std::string& raw) -> std::optional<std::size_t> {
    const auto idx = marks.index_of(raw);
    if (!idx) out.warnings.push_back("unknown label '" + raw + "' dropped");
    return idx;
  };

  if (kind == ChartKind::Line) {
    static const std::regex pair_re(R"(\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\))");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), pair_re); it != std::sregex_iterator(); ++it) {
      const auto a = resolve((*it)[1].str());
      const auto b = resolve((*it)[2].str());
      if (!a || !b) continue;
      if (marks[*a].series != marks[*b].series) {
        out.warnings.push_back("pair (" + marks[*a].label() + "," + marks[*b].label() + ") spans two lines; dropped");
        continue;
      }
      seen.insert({std::min(*a, *b), std::max(*a, *b)});
    }
    for (const auto& [a, b] : seen) out.selection.pairs.push_back({marks[a].label(), marks[b].label()});
  } else {
    std::set<std::size_t> seen;
    std::string token;
    auto flush = [&] {
      if (token.empty()) return;
      if (const auto idx = resolve(token)) seen.insert(*idx);
      token.clear();
    };
    for (char c : body) {
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
        token += c;
      } else {
        flush();
      }
    }
    flush();
    for (auto idx : seen) out.selection.labels.push_back(marks[idx].label());
  }
  return out;
}

}  // namespace chartlens
