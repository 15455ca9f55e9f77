#include "mstool/config.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mstool;
using namespace mstool::test;

TEST_CASE("defaults validate and survive a json round trip") {
  const PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.segment.k == 4);
  CHECK(back.prompts.train_fraction == 0.9);
  CHECK_FALSE(back.segment.seed.has_value());
}

TEST_CASE("partial documents override only what they name") {
  TempDir dir;
  write_text_file(dir / "c.json", R"({"segment":{"k":5,"seed":12},"synth":{"weights":[0.5,0.25,0.25]},"plot":{"duration_s":2}})");
  const auto c = load_config(dir / "c.json");
  CHECK(c.segment.k == 5);
  CHECK(*c.segment.seed == 12);
  CHECK(c.segment.n_init == 10);
  CHECK(c.synth.quality.weights[0] == 0.5);
  CHECK(c.plot.duration_s == 2.0);
}

TEST_CASE("invalid documents are rejected") {
  const auto bad = [](const char* text) {
    auto c = config_from_json(nlohmann::json::parse(text));
    c.validate();
  };
  CHECK_THROWS_AS(bad(R"({"segmnet":{}})"), Error);
  CHECK_THROWS_AS(bad(R"({"segment":{"kk":3}})"), Error);
  CHECK_THROWS_AS(bad(R"({"segment":{"k":"four"}})"), Error);
  CHECK_THROWS_AS(bad(R"({"segment":{"k":0}})"), Error);
  CHECK_THROWS_AS(bad(R"({"preprocess":{"low_hz":50,"high_hz":40}})"), Error);
  CHECK_THROWS_AS(bad(R"({"prompts":{"train_fraction":1.0}})"), Error);
  CHECK_THROWS_AS(bad(R"({"synth":{"weights":[0.5,0.5,0.5]}})"), Error);
  CHECK_THROWS_AS(bad(R"({"eval":{"positive_class":"Maybe"}})"), Error);
  CHECK_THROWS_AS(bad(R"({"plot":{"duration_s":0}})"), Error);
  CHECK_THROWS_AS(bad("[]"), Error);
  TempDir dir;
  write_text_file(dir / "broken.json", "{");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), Error);
}
