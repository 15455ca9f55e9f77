#include "mstool/promptgen.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mstool;
using namespace mstool::test;

namespace {

FeatureTable fixture_table() {
  FeatureTable t;
  t.subject = SubjectMeta{"Subject12", 23, Gender::male, 31, Condition::Load};
  t.duration_s = 60.0;
  t.per_state["A"] = {0.2134, 0.7712, 0.3125, 18.75, 0.05625, 5.555555};
  t.per_state["B"] = {0.18765, 0.74, 0.25, 15.0, 0.048, 5.2083333};
  t.per_state["C"] = {0.1, 0.7033333, 0.2291667, 13.75, 0.0425, 5.3921569};
  t.per_state["D"] = {0.0912, 0.69, 0.2083333, 12.5, 0.04, 5.2083333};
  return t;
}

std::vector<PromptRecord> dummy_records(std::size_t n) {
  std::vector<PromptRecord> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"S" + std::to_string(i), "d", "q" + std::to_string(i), i % 3 == 0 ? kLoadAnswer : kRestAnswer});
  return out;
}

}  // namespace

TEST_CASE("answers follow the condition") {
  auto t = fixture_table();
  t.subject.condition = Condition::Rest;
  CHECK(render_prompt(t).answer == "Subject is at resting state.");
  t.subject.condition = Condition::Load;
  CHECK(render_prompt(t).answer == "Subject is at cognitive load state.");
  CHECK(condition_of_answer(kRestAnswer) == Condition::Rest);
  CHECK_THROWS_AS(condition_of_answer("Subject is tired."), ParseError);
}

TEST_CASE("rendered fixture matches the golden line") {
  const auto line = to_jsonl_line(render_prompt(fixture_table()));
  const auto golden = read_text_file(MSTOOL_TEST_DATA "/golden/prompt_fixture.jsonl");
  CHECK(line + "\n" == golden);
}

TEST_CASE("template structure and failure modes") {
  const auto r = render_prompt(fixture_table());
  CHECK(has_template_structure(r));
  CHECK(r.description.find("in a 1 minute period") != std::string::npos);
  auto bad = r;
  bad.query.replace(bad.query.find("    Microstate C:"), 4, "");
  CHECK_FALSE(has_template_structure(bad));

  auto t = fixture_table();
  t.per_state.erase("C");
  CHECK_THROWS_AS(render_prompt(t), Error);
  t = fixture_table();
  t.per_state["E"] = {};
  CHECK_THROWS_AS(render_prompt(t), Error);
  t = fixture_table();
  t.subject.subject_id.clear();
  CHECK_THROWS_AS(render_prompt(t), Error);
  t = fixture_table();
  t.duration_s = 7.5;
  CHECK(render_prompt(t).description.find("in a 7.500 second period") != std::string::npos);
}

TEST_CASE("jsonl lines round trip and are strict") {
  const auto r = render_prompt(fixture_table());
  const auto line = to_jsonl_line(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.rfind(R"({"user":)", 0) == 0);
  const auto back = parse_jsonl_line(line);
  CHECK(back == r);
  CHECK(to_jsonl_line(back) == line);
  CHECK_THROWS_AS(parse_jsonl_line(R"({"user":"a","description":"b","query":"c"})"), ParseError);
  CHECK_THROWS_AS(parse_jsonl_line(R"({"user":"a","description":"b","query":"c","answer":"x"})"), ParseError);
  CHECK_THROWS_AS(
      parse_jsonl_line(R"({"user":"a","description":"b","query":"c","answer":"Subject is at resting state.","x":1})"),
      ParseError);
  CHECK_THROWS_AS(parse_jsonl_line("not json"), ParseError);
}

TEST_CASE("split sizes") {
  const auto ten = split_dataset(dummy_records(10), 0.9, 1);
  CHECK(ten.train.size() == 9);
  CHECK(ten.test.size() == 1);
  const auto big = split_dataset(dummy_records(3000), 0.9, 2024);
  CHECK(big.train.size() == 2700);
  CHECK(big.test.size() == 300);
  CHECK_THROWS_AS(split_dataset(dummy_records(4), 0.9, 1), Error);
  CHECK_THROWS_AS(split_dataset(dummy_records(4), 1.0, 1), Error);
  CHECK_THROWS_AS(split_dataset({}, 0.5, 1), Error);
}

TEST_CASE("split is a seeded partition with consistent class counts") {
  const auto records = dummy_records(57);
  for (bool stratify : {false, true}) {
    const auto s = split_dataset(records, 0.7, 77, stratify);
    CHECK(s.train.size() == 40);
    std::vector<std::string> seen;
    for (const auto& r : s.train) seen.push_back(r.query);
    for (const auto& r : s.test) seen.push_back(r.query);
    std::sort(seen.begin(), seen.end());
    std::vector<std::string> expect;
    for (const auto& r : records) expect.push_back(r.query);
    std::sort(expect.begin(), expect.end());
    CHECK(seen == expect);
    CHECK(s.summary.train.rest + s.summary.test.rest == s.summary.total.rest);
    CHECK(s.summary.train.load + s.summary.test.load == s.summary.total.load);
    CHECK(s.summary.total.load == 19);
    const auto again = split_dataset(records, 0.7, 77, stratify);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
    CHECK_FALSE(split_dataset(records, 0.7, 78, stratify).train == s.train);
  }
}

TEST_CASE("write_dataset files are deterministic and re-readable") {
  TempDir a, b;
  const auto records = dummy_records(20);
  const auto sa = write_dataset(records, 0.9, 5, a.path());
  write_dataset(records, 0.9, 5, b.path());
  for (const char* f : {"train.jsonl", "test.jsonl", "summary.json"}) CHECK(read_text_file(a / f) == read_text_file(b / f));
  CHECK(read_jsonl(a / "train.jsonl").size() == 18);
  CHECK(sa.n_test == 2);
  const auto summary = nlohmann::json::parse(read_text_file(a / "summary.json"));
  CHECK(summary.at("n_train") == 18);
  CHECK(summary.at("class_balance").at("total").at("load") == 7);
}
