#pragma once

#include "mstool/eeg_io.hpp"
#include "mstool/features.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mstool {

inline constexpr const char* kRestAnswer = "Subject is at resting state.";
inline constexpr const char* kLoadAnswer = "Subject is at cognitive load state.";

struct PromptRecord {
  std::string user;
  std::string description;
  std::string query;
  std::string answer;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

// Requires states A-D and a complete subject record.
PromptRecord render_prompt(const FeatureTable& table);

std::string answer_for(Condition c);
Condition condition_of_answer(const std::string& answer);

// One compact JSON object with keys user, description, query, answer in
// that order. No trailing newline.
std::string to_jsonl_line(const PromptRecord& r);
// Throws ParseError unless the line holds exactly those four string keys and
// a valid answer.
PromptRecord parse_jsonl_line(const std::string& line);
std::vector<PromptRecord> read_jsonl(const std::filesystem::path& path);

// True when the query has exactly four "Microstate X:" blocks of five lines.
bool has_template_structure(const PromptRecord& r);

struct ClassCounts {
  std::size_t rest = 0;
  std::size_t load = 0;
};

struct DatasetSummary {
  std::size_t n_total = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double train_fraction = 0.0;
  std::uint64_t seed = 0;
  bool stratified = false;
  ClassCounts total, train, test;
};

struct DatasetSplit {
  std::vector<PromptRecord> train;
  std::vector<PromptRecord> test;
  DatasetSummary summary;
};

// Seeded shuffle, |train| = round(train_fraction * n). With `stratify`,
// each class is split on its own before the halves are shuffled together.
DatasetSplit split_dataset(const std::vector<PromptRecord>& records, double train_fraction, std::uint64_t seed,
                           bool stratify = false);

// Writes train.jsonl, test.jsonl and summary.json into out_dir.
DatasetSummary write_dataset(const std::vector<PromptRecord>& records, double train_fraction, std::uint64_t seed,
                             const std::filesystem::path& out_dir, bool stratify = false);

nlohmann::ordered_json to_json(const DatasetSummary& s);

}  // namespace mstool
