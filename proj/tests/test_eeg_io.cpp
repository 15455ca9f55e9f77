#include "mstool/eeg_io.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstring>

using namespace mstool;
using namespace mstool::test;

namespace {

void write_sidecar(const std::filesystem::path& data_path, const std::string& extra = "") {
  write_text_file(sidecar_path(data_path),
                  R"({"subject_id":"Subject07","age":19,"gender":"male","arithmetic_score":23,"condition":"Load",)"
                  R"("sampling_rate_hz":500)" + extra + "}");
}

}  // namespace

TEST_CASE("small CSV loads with header labels") {
  TempDir dir;
  const auto path = dir / "tiny.csv";
  write_text_file(path, "Fz,Cz\n1,2\n3,4\n5,6\n");
  write_sidecar(path);
  const auto rec = load_recording(path, RecordingFormat::csv);
  CHECK(rec.channel_labels == std::vector<std::string>{"Fz", "Cz"});
  REQUIRE(rec.channels() == 2);
  REQUIRE(rec.samples() == 3);
  CHECK(rec.data(0, 2) == 5.0);
  CHECK(rec.data(1, 0) == 2.0);
  CHECK(rec.sampling_rate_hz == 500.0);
  CHECK(rec.meta.subject_id == "Subject07");
  CHECK(rec.meta.gender == Gender::male);
  CHECK(rec.meta.condition == Condition::Load);
  CHECK(rec.meta.arithmetic_score == 23);
}

TEST_CASE("non-finite CSV value is located") {
  TempDir dir;
  const auto path = dir / "bad.csv";
  write_text_file(path, "Fz,Cz\n1,2\n3,NaN\n");
  write_sidecar(path);
  try {
    load_recording(path, RecordingFormat::csv);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("CSV structural errors") {
  TempDir dir;
  const auto ragged = dir / "ragged.csv";
  write_text_file(ragged, "Fz,Cz\n1,2\n3\n");
  write_sidecar(ragged);
  CHECK_THROWS_AS(load_recording(ragged, RecordingFormat::csv), ParseError);
  const auto header = dir / "header.csv";
  write_text_file(header, "Fz,,Cz\n1,2,3\n1,2,3\n");
  write_sidecar(header);
  CHECK_THROWS_AS(load_recording(header, RecordingFormat::csv), ParseError);
  const auto mismatch = dir / "mismatch.csv";
  write_text_file(mismatch, "Fz,Cz\n1,2\n3,4\n");
  write_sidecar(mismatch, R"(,"channel_labels":["Cz","Fz"])");
  CHECK_THROWS_AS(load_recording(mismatch, RecordingFormat::csv), Error);
  CHECK_THROWS_AS(load_recording(dir / "missing.csv", RecordingFormat::csv), IoError);
}

TEST_CASE("raw_f64 and csv round trips") {
  TempDir dir;
  auto rng = make_rng(11);
  const auto rec = make_recording(random_matrix(rng, 19, 5000, 30.0), 256.0, "Subject03", Condition::Load);

  save_recording(rec, dir / "r.eegr", RecordingFormat::raw_f64);
  const auto raw = load_recording(dir / "r.eegr");
  REQUIRE(raw.data.rows() == 19);
  REQUIRE(raw.data.cols() == 5000);
  CHECK(std::memcmp(raw.data.data(), rec.data.data(), sizeof(double) * rec.data.size()) == 0);
  CHECK(raw.channel_labels == rec.channel_labels);
  CHECK(raw.meta.subject_id == "Subject03");
  CHECK(raw.meta.condition == Condition::Load);
  CHECK(raw.sampling_rate_hz == 256.0);

  save_recording(rec, dir / "r.csv", RecordingFormat::csv);
  const auto csv = load_recording(dir / "r.csv");
  CHECK((csv.data - rec.data).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("small matrices round trip") {
  TempDir dir;
  const auto zeros = make_recording(Eigen::MatrixXd::Zero(2, 2));
  for (auto fmt : {RecordingFormat::csv, RecordingFormat::raw_f64}) {
    const auto path = dir / (fmt == RecordingFormat::csv ? "z.csv" : "z.eegr");
    save_recording(zeros, path, fmt);
    CHECK(load_recording(path).data == zeros.data);
  }
  auto rng = make_rng(5);
  const auto small = make_recording(random_matrix(rng, 8, 100));
  save_recording(small, dir / "s.csv", RecordingFormat::csv);
  CHECK((load_recording(dir / "s.csv").data - small.data).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("recordings below the minimum shape are rejected") {
  TempDir dir;
  const auto one_channel = make_recording(Eigen::MatrixXd::Zero(1, 2));
  CHECK_THROWS_AS(save_recording(one_channel, dir / "one.eegr", RecordingFormat::raw_f64), Error);
  CHECK_THROWS_AS(make_recording(Eigen::MatrixXd::Zero(3, 1)).validate(), Error);
}

TEST_CASE("save to an empty path fails") {
  const auto rec = make_recording(Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(save_recording(rec, "", RecordingFormat::csv), Error);
}

TEST_CASE("raw_f64 framing errors") {
  TempDir dir;
  const auto path = dir / "bad.eegr";
  write_text_file(path, "NOPE0000000000000000");
  write_sidecar(path, R"(,"channel_labels":["A","B"])");
  CHECK_THROWS_AS(load_recording(path), ParseError);
  const auto rec = make_recording(Eigen::MatrixXd::Ones(2, 10));
  save_recording(rec, dir / "t.eegr", RecordingFormat::raw_f64);
  std::filesystem::resize_file(dir / "t.eegr", std::filesystem::file_size(dir / "t.eegr") - 8);
  CHECK_THROWS_AS(load_recording(dir / "t.eegr"), ParseError);
}

TEST_CASE("metadata validation") {
  SubjectMeta m{"S", 20, Gender::male, 0, Condition::Rest};
  CHECK_NOTHROW(m.validate());
  m.age = 0;
  CHECK_THROWS_AS(m.validate(), Error);
  m.age = 20;
  m.arithmetic_score = -1;
  CHECK_THROWS_AS(m.validate(), Error);
  m.arithmetic_score = 1;
  m.subject_id.clear();
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK(parse_condition("REST") == Condition::Rest);
  CHECK_THROWS_AS(parse_gender("other"), Error);
  CHECK(format_from_extension("a/b.CSV") == RecordingFormat::csv);
  CHECK(format_from_extension("a/b.bin") == RecordingFormat::raw_f64);
  CHECK(sidecar_path("d/x.eegr") == std::filesystem::path("d/x.meta.json"));
}
