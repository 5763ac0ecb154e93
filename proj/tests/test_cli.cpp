#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "chartlens/fs_util.hpp"
#include "chartlens/image.hpp"
#include "chartlens/json_io.hpp"
#include "support.hpp"

using namespace chartlens;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

// Runs the CLI with `args`, capturing both streams into `dir`.
Run cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = env + " \"" CHARTLENS_CLI_PATH "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, read_file(out), read_file(err)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path three_bars(const fs::path& dir) {
  const auto chart = generate_chart(testsupport::three_bar_spec());
  save_png(chart.image, dir / "three.png");
  return dir / "three.png";
}

}  // namespace

TEST(Cli, SegmentWritesMarks) {
  const auto dir = testsupport::fresh_dir("cli_seg");
  const auto chart = generate_chart(testsupport::bar_spec({30, 55, 80, 20, 65, 45}));
  save_png(chart.image, dir / "c.png");
  const auto r = cli(dir, "segment --chart " + q(dir / "c.png") + " --kind bar --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto marks = markset_from_json(Json::parse(read_file(dir / "o" / "marks.json")));
  EXPECT_EQ(marks.size(), 6u);
  EXPECT_TRUE(fs::exists(dir / "o" / "marked.png"));
}

TEST(Cli, SegmentExitCodes) {
  const auto dir = testsupport::fresh_dir("cli_seg_codes");
  save_png(ChartImage::filled(300, 200, {255, 255, 255}), dir / "blank.png");
  EXPECT_EQ(cli(dir, "segment --chart " + q(dir / "blank.png") + " --kind bar --out " + q(dir / "o")).code, 2);
  EXPECT_EQ(cli(dir, "segment --chart " + q(dir / "missing.png") + " --kind bar --out " + q(dir / "o")).code, 1);
  EXPECT_EQ(cli(dir, "segment --chart " + q(dir / "blank.png") + " --kind donut --out " + q(dir / "o")).code, 1);
  EXPECT_EQ(cli(dir, "segment --kind bar").code, 1);
}

TEST(Cli, AttributeWithoutEndpointIsServiceError) {
  const auto dir = testsupport::fresh_dir("cli_att_noep");
  const auto png = three_bars(dir);
  const auto r = cli(dir, "attribute --chart " + q(png) + " --kind bar --question q --answer a --out " + q(dir / "o"),
                     "env -u CHARTLENS_MLLM_URL");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("mllm unavailable"), std::string::npos) << r.err;
}

TEST(Cli, AttributeMockSelectsB2) {
  const auto dir = testsupport::fresh_dir("cli_att_mock");
  const auto png = three_bars(dir);
  write_file_atomic(dir / "mock.json", std::string_view(R"({"three":"VALIDATION: CONSISTENT\nATTRIBUTION: [B2]"})"));
  const auto r = cli(dir, "attribute --chart " + q(png) + " --kind bar --question \"Which is tallest?\" --answer BETA --mock-mllm " +
                              q(dir / "mock.json") + " --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(read_file(dir / "o" / "attribution.json"));
  EXPECT_EQ(j.at("labels"), Json::array({"B2"}));
  EXPECT_EQ(j.at("regions").size(), 1u);
  for (const char* f : {"marks.json", "marked.png", "highlight.png"}) EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
}

TEST(Cli, UnverifiableStillSucceeds) {
  const auto dir = testsupport::fresh_dir("cli_att_unver");
  const auto png = three_bars(dir);
  write_file_atomic(dir / "mock.json", std::string_view(R"({"*":"I cannot tell."})"));
  const auto r = cli(dir, "attribute --chart " + q(png) + " --kind bar --question q --answer a --mock-mllm " + q(dir / "mock.json") +
                              " --out " + q(dir / "o"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(read_file(dir / "o" / "attribution.json"));
  EXPECT_EQ(j.at("validated"), "UNVERIFIABLE");
  EXPECT_TRUE(j.at("regions").empty());
}

TEST(Cli, EvaluateOracleAndBadInput) {
  const auto dir = testsupport::fresh_dir("cli_eval");
  ASSERT_EQ(cli(dir, "generate --out " + q(dir / "ds") + " --kind mixed --count 6 --seed 3").code, 0);
  const auto r = cli(dir, "evaluate --dataset " + q(dir / "ds" / "dataset.jsonl") + " --system oracle --out " + q(dir / "o") +
                              " --report-format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("by_kind").at("bar").at("micro").at("f1"), 100.0);
  EXPECT_EQ(j.at("by_kind").at("pie").at("micro").at("f1"), 100.0);
  EXPECT_EQ(j.at("by_kind").at("line").at("detection_pct"), 100.0);
  EXPECT_TRUE(fs::exists(dir / "o" / "report.txt"));

  write_file_atomic(dir / "bad.jsonl", std::string_view("{not json\n"));
  EXPECT_EQ(cli(dir, "evaluate --dataset " + q(dir / "bad.jsonl") + " --system oracle --out " + q(dir / "o2")).code, 1);

  write_file_atomic(dir / "empty.jsonl", std::string_view(""));
  const auto e = cli(dir, "evaluate --dataset " + q(dir / "empty.jsonl") + " --system oracle --out " + q(dir / "o3"));
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.err.find("warning: dataset is empty"), std::string::npos) << e.err;
  EXPECT_EQ(cli(dir, "evaluate --dataset " + q(dir / "empty.jsonl") + " --iou 0 --out " + q(dir / "o3")).code, 1);
}

TEST(Cli, GenerateIsDeterministic) {
  const auto dir = testsupport::fresh_dir("cli_gen");
  ASSERT_EQ(cli(dir, "generate --out " + q(dir / "a") + " --kind pie --count 3 --seed 9 --sectors 5").code, 0);
  ASSERT_EQ(cli(dir, "generate --out " + q(dir / "b") + " --kind pie --count 3 --seed 9 --sectors 5").code, 0);
  EXPECT_EQ(read_file(dir / "a" / "dataset.jsonl"), read_file(dir / "b" / "dataset.jsonl"));
  EXPECT_EQ(cli(dir, "generate --out " + q(dir / "c") + " --kind pie --sectors 9").code, 1);
}

TEST(Cli, PrintConfigReadsKeyFromEnvOnly) {
  const auto dir = testsupport::fresh_dir("cli_cfg");
  const auto with = cli(dir, "--print-config attribute --chart x.png --kind bar --question q --answer a --out o",
                        "CHARTLENS_API_KEY=sk-secret CHARTLENS_MLLM_URL=http://h:1/v1");
  ASSERT_EQ(with.code, 0) << with.err;
  const auto j = Json::parse(with.out);
  EXPECT_EQ(j.at("api_key"), "<set>");
  EXPECT_EQ(j.at("mllm_url"), "http://h:1/v1");
  EXPECT_EQ(with.out.find("sk-secret"), std::string::npos);
  const auto without = cli(dir, "--print-config generate --out o", "env -u CHARTLENS_API_KEY");
  EXPECT_EQ(Json::parse(without.out).at("api_key"), "<unset>");
  EXPECT_NE(cli(dir, "attribute --api-key k --chart x.png --kind bar --question q --answer a --out o").code, 0);
}
