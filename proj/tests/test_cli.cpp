#include "mstool/cli.hpp"

#include "mstool/pipeline_io.hpp"
#include "mstool/promptgen.hpp"
#include "mstool/synthquality.hpp"
#include "mstool/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mstool;
using namespace mstool::test;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mstool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

const fs::path kFixture = MSTOOL_TEST_DATA "/fixture";

std::vector<std::string> fixture_inputs(const fs::path& dir, const std::string& ext = ".eegr") {
  std::vector<std::string> out;
  for (const char* stem : {"Subject00_load", "Subject00_rest", "Subject01_load", "Subject01_rest"})
    out.push_back((dir / (stem + ext)).string());
  return out;
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors") {
  const auto unknown_flag = run({"segment", "--bogus", "1", "x.eegr"});
  CHECK(unknown_flag.status == 2);
  CHECK(unknown_flag.err.find("Usage:") != std::string::npos);
  const auto unknown_cmd = run({"frobnicate"});
  CHECK(unknown_cmd.status == 2);
  CHECK(unknown_cmd.err.find("Usage:") != std::string::npos);
  CHECK(run({}).status == 2);
  const auto help = run({"--help"});
  CHECK(help.status == 0);
  CHECK(help.out.find("synth-score") != std::string::npos);
}

TEST_CASE("seeded commands need a seed") {
  TempDir dir;
  const auto r = run(cat({"--out-dir", dir.path().string(), "segment"}, fixture_inputs(kFixture)));
  CHECK(r.status == 1);
  CHECK(r.err.find("--seed") != std::string::npos);
}

TEST_CASE("module errors are reported verbatim") {
  TempDir dir;
  const auto r = run({"--out-dir", dir.path().string(), "preprocess", (dir / "missing.eegr").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("missing.eegr") != std::string::npos);
  write_text_file(dir / "bad.json", R"({"segment":{"k":0}})");
  const auto cfg = run({"--config", (dir / "bad.json").string(), "--out-dir", dir.path().string(), "preprocess",
                        fixture_inputs(kFixture)[0]});
  CHECK(cfg.status == 1);
  CHECK(cfg.err.find("number of states") != std::string::npos);
}

TEST_CASE("full pipeline with config and flag composition") {
  TempDir dir;
  const auto pre = dir / "pre";
  const auto out = dir / "out";
  write_text_file(dir / "cfg.json", R"({"segment":{"k":4,"n_init":3,"seed":5},"backfit":{"min_duration_ms":8}})");
  const std::string cfg = (dir / "cfg.json").string();

  REQUIRE(run(cat({"--out-dir", pre.string(), "preprocess", "--reference", "avg"}, fixture_inputs(kFixture))).status == 0);
  const auto rec = load_recording(pre / "Subject00_rest.eegr");
  CHECK(rec.data.colwise().sum().cwiseAbs().maxCoeff() < 1e-9);

  auto seg = run(cat({"--config", cfg, "--out-dir", out.string(), "--jobs", "2", "segment", "--n-init", "4"},
                     fixture_inputs(pre)));
  REQUIRE_MESSAGE(seg.status == 0, seg.err);
  const auto prov = nlohmann::json::parse(read_text_file(out / "Subject00_rest.segment.provenance.json"));
  CHECK(prov.at("config").at("segment").at("n_init") == 4);
  CHECK(prov.at("config").at("segment").at("seed") == 5);
  CHECK(prov.at("inputs").at(0).at("fnv1a64") == file_checksum(pre / "Subject00_rest.eegr"));
  CHECK(prov.at("outputs").at(0) == "Subject00_rest.model.json");
  const auto model = load_model(out / "Subject00_rest.model.json");
  CHECK(model.n_init == 4);
  CHECK(model.channel_labels == rec.channel_labels);

  REQUIRE(run(cat({"--config", cfg, "--out-dir", out.string(), "backfit"}, fixture_inputs(pre))).status == 0);
  const auto bprov = nlohmann::json::parse(read_text_file(out / "Subject01_load.backfit.provenance.json"));
  CHECK(bprov.at("config").at("backfit").at("min_duration_ms") == 8.0);
  const auto gev = nlohmann::json::parse(read_text_file(out / "Subject01_load.gev.json"));
  CHECK(gev.at("total").get<double>() > 0.0);

  REQUIRE(run(cat({"--out-dir", out.string(), "features"}, fixture_inputs(pre))).status == 0);
  CHECK(fs::exists(out / "Subject01_load.features.csv"));

  const auto features = fixture_inputs(out, ".features.json");
  const auto prompts = out / "prompts";
  REQUIRE(run(cat({"--out-dir", prompts.string(), "prompts", "--seed", "3", "--train-fraction", "0.5", "--stratify"}, features))
              .status == 0);
  const auto train = read_jsonl(prompts / "train.jsonl");
  const auto test = read_jsonl(prompts / "test.jsonl");
  CHECK(train.size() == 2);
  CHECK(test.size() == 2);
  for (const auto& r : train) CHECK(has_template_structure(r));
  const auto summary = nlohmann::json::parse(read_text_file(prompts / "summary.json"));
  CHECK(summary.at("class_balance").at("train").at("load") == 1);
  CHECK(fs::exists(prompts / "prompts.provenance.json"));

  // import appends records from an existing dataset
  const auto merged = out / "merged";
  const auto imported = run(cat({"--out-dir", merged.string(), "prompts", "--seed", "3", "--train-fraction", "0.75", "--import",
                                  (prompts / "train.jsonl").string()},
                                 features));
  REQUIRE_MESSAGE(imported.status == 0, imported.err);
  CHECK(read_jsonl(merged / "train.jsonl").size() + read_jsonl(merged / "test.jsonl").size() == 6);

  // eval against the test split
  std::string preds = "subject_id,label\n";
  for (const auto& r : test) preds += r.user + "," + to_string(condition_of_answer(r.answer)) + "\n";
  write_text_file(dir / "preds.csv", preds);
  std::string worse;
  for (const auto& r : test) worse += r.user + ",Rest\n";
  write_text_file(dir / "before.csv", worse);
  const auto ev = run({"--out-dir", out.string(), "eval", "--truth", (prompts / "test.jsonl").string(), "--predictions",
                       (dir / "preds.csv").string(), "--before", (dir / "before.csv").string()});
  REQUIRE_MESSAGE(ev.status == 0, ev.err);
  const auto metrics = nlohmann::json::parse(read_text_file(out / "metrics.json"));
  CHECK(metrics.at("metrics").at("accuracy") == 100.0);
  CHECK(metrics.at("comparison").at("accuracy").at("after") == 100.0);

  write_text_file(dir / "short.csv", "S,Load\n");
  CHECK(run({"--out-dir", out.string(), "eval", "--truth", (prompts / "test.jsonl").string(), "--predictions",
             (dir / "short.csv").string()})
            .status == 1);

  // plots
  REQUIRE(run({"--out-dir", out.string(), "plot", "gfp", (pre / "Subject00_rest.eegr").string(), "--duration-s", "2"}).status == 0);
  REQUIRE(run({"--out-dir", out.string(), "plot", "segmentation", (pre / "Subject00_rest.eegr").string()}).status == 0);
  CHECK(fs::exists(out / "Subject00_rest.segmentation.svg"));
  CHECK(run({"--out-dir", out.string(), "plot", "gfp", (pre / "Subject00_rest.eegr").string(), "--start-s", "7.5"}).status == 1);
}

TEST_CASE("preprocess will not overwrite its input") {
  TempDir dir;
  const auto rec = make_recording(Eigen::MatrixXd::Random(3, 200), 100.0);
  save_recording(rec, dir / "r.eegr", RecordingFormat::raw_f64);
  const auto r = run({"--out-dir", dir.path().string(), "preprocess", "--reference", "avg", (dir / "r.eegr").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("overwrite") != std::string::npos);
  CHECK(run({"--out-dir", dir.path().string(), "preprocess", "--reference", "avg", "--format", "csv", (dir / "r.eegr").string()})
            .status == 0);
  CHECK(fs::exists(dir / "r.csv"));
}

TEST_CASE("duplicate stems are refused") {
  TempDir dir;
  const auto rec = make_recording(Eigen::MatrixXd::Random(3, 200), 100.0);
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  save_recording(rec, dir / "a/x.eegr", RecordingFormat::raw_f64);
  save_recording(rec, dir / "b/x.eegr", RecordingFormat::raw_f64);
  const auto r = run({"--out-dir", (dir / "o").string(), "preprocess", (dir / "a/x.eegr").string(), (dir / "b/x.eegr").string(),
                      "--reference", "avg"});
  CHECK(r.status == 1);
  CHECK(r.err.find("stem") != std::string::npos);
}

TEST_CASE("synth-gen and synth-score") {
  TempDir dir;
  auto rng = make_rng(4);
  std::string csv = "x:numeric,y:numeric,g:categorical\n";
  std::normal_distribution<double> nd;
  for (int i = 0; i < 300; ++i) {
    const double a = nd(rng);
    csv += format_roundtrip(a) + "," + format_roundtrip(0.6 * a + 0.8 * nd(rng)) + "," + (a > 0 ? "hi" : "lo") + "\n";
  }
  write_text_file(dir / "orig.csv", csv);
  REQUIRE(run({"--out-dir", dir.path().string(), "synth-gen", (dir / "orig.csv").string(), "--n", "400", "--seed", "9"}).status == 0);
  const auto synth = read_table_csv(dir / "orig.synth.csv");
  CHECK(synth.rows() == 400);
  const auto score = run({"--out-dir", dir.path().string(), "synth-score", (dir / "orig.csv").string(),
                          (dir / "orig.synth.csv").string(), "--weights", "0.5,0.25,0.25", "--bins", "10"});
  REQUIRE_MESSAGE(score.status == 0, score.err);
  const auto report = nlohmann::json::parse(read_text_file(dir / "quality.json"));
  CHECK(report.at("composite").get<double>() > 50.0);
  CHECK(report.at("weights").at(0) == 0.5);
  CHECK(run({"--out-dir", dir.path().string(), "synth-score", (dir / "orig.csv").string(), (dir / "orig.synth.csv").string(),
             "--weights", "0.5,0.5"})
            .status == 1);
  CHECK(run({"--out-dir", dir.path().string(), "synth-gen", (dir / "orig.csv").string()}).status == 1);
}
