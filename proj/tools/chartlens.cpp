// chartlens command line: segment, attribute, evaluate, generate.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "chartlens/attribute.hpp"
#include "chartlens/dataset.hpp"
#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"
#include "chartlens/json_io.hpp"
#include "chartlens/report.hpp"
#include "chartlens/synthgen.hpp"

namespace fs = std::filesystem;
using namespace chartlens;

namespace {

enum Exit { kOk = 0, kInput = 1, kSegmentation = 2, kService = 3 };

struct Options {
  // shared
  std::string chart;
  std::string kind = "bar";
  std::string out;
  std::string refiner_url;
  std::string line_extractor_url;
  std::string extractor = "colortrace";
  int segments = 10;
  int refine_points = 5;
  double refine_min_iou = 0.5;
  // attribute
  std::string question;
  std::string answer;
  std::string record_id;
  std::string mllm_url;
  std::string mllm_model = "gpt-4o";
  std::string mock_mllm;
  std::string few_shot;
  int max_in_flight = 4;
  double rate = 2.0;
  // evaluate
  std::string dataset;
  std::string system = "chartlens";
  double iou = 0.9;
  int jobs = 0;
  std::string report_format = "table";
  // generate
  int count = 10;
  std::uint64_t seed = 0;
  int sectors = 0;
  std::string theme;
  int width = 800;
  int height = 500;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.refine.n_points = o.refine_points;
  cfg.refine.accept_min_iou = o.refine_min_iou;
  if (!o.refiner_url.empty()) cfg.refine.remote_url = o.refiner_url;
  cfg.line.segments_per_line = o.segments;
  if (o.extractor == "remote") {
    cfg.line.extractor = LineExtractorKind::RemoteNeural;
    if (o.line_extractor_url.empty()) throw InputError("--extractor remote needs --line-extractor-url");
    cfg.line.remote_url = o.line_extractor_url;
  } else if (o.extractor != "colortrace") {
    throw InputError("unknown extractor '" + o.extractor + "'");
  }
  if (!o.few_shot.empty()) cfg.few_shot = load_few_shot(o.few_shot);
  cfg.bar.validate();
  cfg.pie.validate();
  cfg.line.validate();
  if (cfg.refine.n_points < 1) throw InputError("--refine-points must be >= 1");
  return cfg;
}

std::unique_ptr<MllmClient> make_mllm(const Options& o) {
  if (!o.mock_mllm.empty()) return std::make_unique<ScriptedMllm>(ScriptedMllm::from_file(o.mock_mllm));
  if (o.mllm_url.empty()) throw ServiceError("mllm unavailable: no endpoint configured (--mllm-url or CHARTLENS_MLLM_URL) and no --mock-mllm");
  MllmConfig cfg;
  cfg.base_url = o.mllm_url;
  cfg.model = o.mllm_model;
  cfg.api_key = env("CHARTLENS_API_KEY");
  cfg.max_in_flight = o.max_in_flight;
  cfg.requests_per_second = o.rate;
  return std::make_unique<HttpMllmClient>(cfg);
}

ChartImage load_chart(const std::string& path) {
  if (path.empty()) throw InputError("--chart is required");
  ChartImage img = load_png(path);
  return img.with_id(fs::path(path).stem().string());
}

int cmd_segment(const Options& o) {
  const PipelineConfig cfg = pipeline_config(o);
  const ChartKind kind = parse_chart_kind(o.kind);
  const ChartImage img = load_chart(o.chart);
  auto refiner = make_refiner(cfg.refine);
  auto extractor = make_line_extractor(cfg.line);
  const MarkSet marks = segment_chart(img, kind, cfg, *refiner, *extractor);
  for (const auto& w : marks.warnings()) warn(w);
  if (marks.empty()) throw SegmentationError("no marks found on " + o.chart);
  const fs::path out(o.out);
  write_file_atomic(out / "marks.json", markset_to_json(marks).dump(2) + "\n");
  save_png(render_marks(img, marks), out / "marked.png");
  std::cout << marks.size() << " marks written to " << (out / "marks.json").string() << "\n";
  return kOk;
}

int cmd_attribute(const Options& o) {
  const PipelineConfig cfg = pipeline_config(o);
  const ChartKind kind = parse_chart_kind(o.kind);
  const ChartImage img = load_chart(o.chart);
  auto mllm = make_mllm(o);
  auto refiner = make_refiner(cfg.refine);
  auto extractor = make_line_extractor(cfg.line);
  const std::string id = o.record_id.empty() ? img.id() : o.record_id;
  const AttributionResult res =
      attribute(img, {o.question, o.answer}, kind, cfg, Backends{*refiner, *extractor, *mllm}, id);
  for (const auto& w : res.warnings) warn(w);
  const fs::path out(o.out);
  write_file_atomic(out / "attribution.json", attribution_to_json(res).dump(2) + "\n");
  write_file_atomic(out / "marks.json", markset_to_json(res.marks).dump(2) + "\n");
  save_png(render_marks(img, res.marks), out / "marked.png");
  save_png(render_highlight(img, res.selected), out / "highlight.png");
  std::cout << "validation: " << to_string(res.validated) << ", " << res.selected.size() << " region(s) selected\n";
  return kOk;
}

int cmd_evaluate(const Options& o) {
  EvalConfig ecfg;
  ecfg.iou_threshold = o.iou;
  ecfg.validate();
  if (o.report_format != "json" && o.report_format != "table") throw InputError("--report-format must be json or table");
  const Dataset ds = load_dataset(o.dataset);
  for (const auto& w : ds.warnings) warn(w);

  PipelineConfig cfg;
  std::unique_ptr<MllmClient> mllm;
  std::unique_ptr<RefinementBackend> refiner;
  std::unique_ptr<LineExtractor> extractor;
  AttributionSystem system;
  if (o.system == "oracle") {
    system = oracle_system;
  } else if (o.system == "chartlens" || o.system == "zeroshot") {
    cfg = pipeline_config(o);
    mllm = make_mllm(o);
    refiner = make_refiner(cfg.refine);
    extractor = make_line_extractor(cfg.line);
    if (o.system == "chartlens") {
      system = [&](const DatasetRecord& r, const ChartImage& img) {
        const auto res = attribute(img, {r.question, r.answer}, r.kind, cfg, Backends{*refiner, *extractor, *mllm}, r.id);
        return AttributionSet{res.selected, res.warnings};
      };
    } else {
      system = [&](const DatasetRecord& r, const ChartImage& img) {
        return zero_shot_bbox_baseline(img, {r.question, r.answer}, r.kind, *mllm, r.id);
      };
    }
  } else {
    throw InputError("unknown system '" + o.system + "' (oracle, chartlens, zeroshot)");
  }

  int jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (o.system != "oracle") jobs = std::min(jobs, o.max_in_flight);
  const EvalReport rep = evaluate_dataset(ds.records, system, ecfg, o.system, jobs);
  for (const auto& w : rep.warnings) warn(w);
  const fs::path out(o.out);
  const std::string json = report_to_json(rep).dump(2) + "\n";
  const std::string table = report_table(rep);
  write_file_atomic(out / "report.json", json);
  write_file_atomic(out / "report.txt", table);
  std::cout << (o.report_format == "json" ? json : table);
  return kOk;
}

int cmd_generate(const Options& o) {
  GenerateOptions g;
  if (o.kind == "mixed") {
    g.kinds = {ChartKind::Bar, ChartKind::Pie, ChartKind::Line};
  } else {
    g.kinds = {parse_chart_kind(o.kind)};
  }
  if (o.count < 0) throw InputError("--count must be >= 0");
  g.count = o.count;
  g.seed = o.seed;
  g.spec.width = o.width;
  g.spec.height = o.height;
  if (!o.theme.empty()) g.spec.theme = parse_theme(o.theme);
  if (o.sectors != 0) {
    if (o.sectors < 2) throw InputError("--sectors must be >= 2");
    if (o.sectors > 8) throw InputError("--sectors must be <= 8 (palette size)");
    g.spec.sectors = o.sectors;
  }
  const auto records = generate_dataset(o.out, g);
  std::cout << records.size() << " records written to " << (fs::path(o.out) / "dataset.jsonl").string() << "\n";
  return kOk;
}

std::string print_config(const Options& o, const std::string& sub) {
  Json j;
  j["subcommand"] = sub;
  j["kind"] = o.kind;
  j["mllm_url"] = o.mllm_url;
  j["mllm_model"] = o.mllm_model;
  j["api_key"] = env("CHARTLENS_API_KEY") ? "<set>" : "<unset>";
  j["refiner_url"] = o.refiner_url;
  j["line_extractor_url"] = o.line_extractor_url;
  j["extractor"] = o.extractor;
  j["mock_mllm"] = o.mock_mllm;
  j["segments_per_line"] = o.segments;
  j["refine_points"] = o.refine_points;
  j["refine_min_iou"] = o.refine_min_iou;
  j["max_in_flight"] = o.max_in_flight;
  j["requests_per_second"] = o.rate;
  j["iou_threshold"] = o.iou;
  j["jobs"] = o.jobs;
  j["system"] = o.system;
  return j.dump(2);
}

int exit_for(StageError::Cause c) {
  switch (c) {
    case StageError::Cause::Input: return kInput;
    case StageError::Cause::Segmentation: return kSegmentation;
    case StageError::Cause::Service: return kService;
  }
  return kInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chartlens: post-hoc chart attribution with set-of-marks prompting"};
  app.require_subcommand(1);
  Options o;
  bool show_config = false;
  app.add_flag("--print-config", show_config, "Print the resolved configuration and exit");

  auto add_pipeline = [&](CLI::App* c) {
    c->add_option("--refiner-url", o.refiner_url, "Refinement service base URL")->envname("CHARTLENS_REFINER_URL");
    c->add_option("--line-extractor-url", o.line_extractor_url, "Line extraction service base URL")
        ->envname("CHARTLENS_LINE_EXTRACTOR_URL");
    c->add_option("--extractor", o.extractor, "Line extractor: colortrace or remote");
    c->add_option("--segments", o.segments, "Segments per line");
    c->add_option("--refine-points", o.refine_points, "Prompt points per region");
    c->add_option("--refine-min-iou", o.refine_min_iou, "Minimum IoU to accept a refined mask");
  };
  auto add_mllm = [&](CLI::App* c) {
    c->add_option("--mllm-url", o.mllm_url, "OpenAI-compatible base URL")->envname("CHARTLENS_MLLM_URL");
    c->add_option("--mllm-model", o.mllm_model, "Model name")->envname("CHARTLENS_MLLM_MODEL");
    c->add_option("--mock-mllm", o.mock_mllm, "JSON fixture of scripted responses keyed by record id");
    c->add_option("--few-shot", o.few_shot, "JSON file overriding the few-shot examples");
    c->add_option("--max-in-flight", o.max_in_flight, "Concurrent MLLM requests");
    c->add_option("--rate", o.rate, "MLLM requests per second");
  };

  auto* seg = app.add_subcommand("segment", "Generate marks for a chart");
  seg->add_option("--chart", o.chart, "Chart PNG")->required();
  seg->add_option("--kind", o.kind, "bar, pie or line")->required();
  seg->add_option("--out", o.out, "Output directory")->required();
  add_pipeline(seg);

  auto* att = app.add_subcommand("attribute", "Attribute an answer to chart regions");
  att->add_option("--chart", o.chart, "Chart PNG")->required();
  att->add_option("--kind", o.kind, "bar, pie or line")->required();
  att->add_option("--question", o.question, "Question about the chart")->required();
  att->add_option("--answer", o.answer, "Answer to attribute")->required();
  att->add_option("--record-id", o.record_id, "Id used to look up scripted responses (default: chart file stem)");
  att->add_option("--out", o.out, "Output directory")->required();
  add_pipeline(att);
  add_mllm(att);

  auto* ev = app.add_subcommand("evaluate", "Score a system on a JSONL dataset");
  ev->add_option("--dataset", o.dataset, "Dataset JSONL")->required();
  ev->add_option("--out", o.out, "Output directory")->required();
  ev->add_option("--system", o.system, "oracle, chartlens or zeroshot");
  ev->add_option("--iou", o.iou, "IoU matching threshold");
  ev->add_option("--jobs", o.jobs, "Parallel records (default: logical cores)");
  ev->add_option("--report-format", o.report_format, "Printed format: json or table");
  add_pipeline(ev);
  add_mllm(ev);

  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--kind", o.kind, "bar, pie, line or mixed");
  gen->add_option("--count", o.count, "Number of charts");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--sectors", o.sectors, "Exact pie sector count");
  gen->add_option("--theme", o.theme, "light or dark (default: random)");
  gen->add_option("--width", o.width, "Canvas width");
  gen->add_option("--height", o.height, "Canvas height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (show_config) {
    std::cout << print_config(o, sub) << "\n";
    return kOk;
  }
  try {
    if (sub == "segment") return cmd_segment(o);
    if (sub == "attribute") return cmd_attribute(o);
    if (sub == "evaluate") return cmd_evaluate(o);
    return cmd_generate(o);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.cause());
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const IncompatibleChartsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const SegmentationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSegmentation;
  } catch (const ServiceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kService;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
