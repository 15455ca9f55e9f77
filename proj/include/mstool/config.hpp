#pragma once

#include "mstool/preprocess.hpp"
#include "mstool/synthquality.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace mstool {

struct PipelineConfig {
  struct Preprocess {
    FilterSpec filter;
    std::string reference = "fz";
  } preprocess;

  struct Segment {
    std::size_t k = 4;
    int n_init = 10;
    int max_iter = 300;
    double tol = 1e-6;
    std::optional<std::uint64_t> seed;
    double min_peak_distance_ms = 0.0;
    bool use_full_signal = false;
  } segment;

  struct Backfit {
    double min_duration_ms = 0.0;
  } backfit;

  struct Prompts {
    double train_fraction = 0.9;
    std::optional<std::uint64_t> seed;
    bool stratify = false;
  } prompts;

  struct Synth {
    QualityOptions quality;
    std::size_t n = 1000;
    std::optional<std::uint64_t> seed;
  } synth;

  struct Eval {
    std::string positive_class = "Load";
  } eval;

  struct Plot {
    double start_s = 0.0;
    double duration_s = 1.0;
    double min_peak_distance_ms = 0.0;
  } plot;

  // Checks every field against its module's preconditions.
  void validate() const;
};

// Keys missing from the document keep their defaults; unknown keys are errors.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const PipelineConfig& c);

}  // namespace mstool
