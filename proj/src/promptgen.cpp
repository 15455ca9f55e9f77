#include "mstool/promptgen.hpp"

#include "mstool/error.hpp"
#include "mstool/random.hpp"
#include "mstool/text.hpp"

#include <cmath>
#include <fstream>

namespace mstool {

using ojson = nlohmann::ordered_json;

namespace {

const char* const kFeatureGlossary =
    "Global Explained Variance (gev) is the share of signal variance explained by the state, from 0.0 to 1.0; "
    "Mean correlation (mean_corr) is the average absolute spatial correlation between the state map and the samples "
    "assigned to it, from 0.0 to 1.0; Time coverage (timecov) is the total time the state is active, in seconds; "
    "Mean duration (meandurs) is the average length of an uninterrupted segment of the state, in seconds; "
    "Occurrences (occurrence) is the number of segments of the state per second.";

std::string period_text(double seconds) {
  const double minutes = seconds / 60.0;
  if (minutes >= 1.0 && std::abs(minutes - std::round(minutes)) < 1e-9)
    return std::to_string(static_cast<long long>(std::round(minutes))) + " minute";
  if (std::abs(seconds - std::round(seconds)) < 1e-9) return std::to_string(static_cast<long long>(std::round(seconds))) + " second";
  return format_sig4(seconds) + " second";
}

}  // namespace

std::string answer_for(Condition c) { return c == Condition::Rest ? kRestAnswer : kLoadAnswer; }

Condition condition_of_answer(const std::string& answer) {
  if (answer == kRestAnswer) return Condition::Rest;
  if (answer == kLoadAnswer) return Condition::Load;
  throw ParseError("unrecognized answer '" + answer + "'");
}

PromptRecord render_prompt(const FeatureTable& table) {
  table.subject.validate();
  if (!(table.duration_s > 0.0)) throw Error("feature table has no recording duration");
  static const char* const kStates[] = {"A", "B", "C", "D"};
  for (const char* s : kStates)
    if (!table.per_state.contains(s)) throw Error(std::string("feature table is missing microstate ") + s);
  if (table.per_state.size() != 4) throw Error("prompts need exactly four microstates (A-D)");

  PromptRecord r;
  r.user = table.subject.subject_id;
  r.description = "Subject of age " + std::to_string(table.subject.age) + ", a " + to_string(table.subject.gender) +
                  " with eeg recorded during rest state. Subject's performed a good quality count on number of "
                  "subtractions achieving a score of " +
                  std::to_string(table.subject.arithmetic_score) +
                  " during mental arithmetic tasks. Four eeg microstates have been extracted from the subject. "
                  "Quantitative representation of EEG microstates across five features in a " +
                  period_text(table.duration_s) +
                  " period have been extracted, the brain activity is segmented into 4 microstates. The feature "
                  "descriptions used are as follows: " +
                  kFeatureGlossary;

  std::string q = "The following are the parameters for each microstate features:\n";
  for (const char* s : kStates) {
    const auto& f = table.per_state.at(s);
    q += std::string("    Microstate ") + s + ":\n";
    q += "        Global Explained Variance:" + format_sig4(f.gev) + " seconds.\n";
    q += "        Mean correlation:" + format_sig4(f.mean_corr) + ".\n";
    q += "        Time coverage:" + format_sig4(f.timecov_seconds) + " seconds.\n";
    q += "        Mean duration " + format_sig4(f.meandurs_s) + " seconds.\n";
    q += "        Occurrences:" + format_sig4(f.occurrence_hz) + " times.\n";
  }
  q += "Based on the EEG feature parameters above, can you determine the cognitive load state of the subject?";
  r.query = std::move(q);
  r.answer = answer_for(table.subject.condition);
  return r;
}

std::string to_jsonl_line(const PromptRecord& r) {
  ojson j;
  j["user"] = r.user;
  j["description"] = r.description;
  j["query"] = r.query;
  j["answer"] = r.answer;
  return j.dump();
}

PromptRecord parse_jsonl_line(const std::string& line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON line: ") + e.what());
  }
  if (!j.is_object() || j.size() != 4) throw ParseError("prompt record must be an object with exactly four keys");
  PromptRecord r;
  try {
    r.user = j.at("user").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.query = j.at("query").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prompt record needs string keys user, description, query, answer: ") + e.what());
  }
  (void)condition_of_answer(r.answer);
  return r;
}

std::vector<PromptRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<PromptRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_jsonl_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

bool has_template_structure(const PromptRecord& r) {
  static const char* const kFeatureLines[] = {"Global Explained Variance:", "Mean correlation:", "Time coverage:",
                                              "Mean duration ", "Occurrences:"};
  const auto lines = split(r.query, '\n');
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& t = lines[i];
    if (t.find("Microstate ") == std::string::npos) continue;
    if (t.rfind("    Microstate ", 0) != 0 || t.size() != 17 || t.back() != ':') return false;
    if (i + 5 >= lines.size()) return false;
    for (std::size_t f = 0; f < 5; ++f)
      if (lines[i + 1 + f].rfind(std::string(8, ' ') + kFeatureLines[f], 0) != 0) return false;
    ++blocks;
  }
  return blocks == 4;
}

DatasetSplit split_dataset(const std::vector<PromptRecord>& records, double train_fraction, std::uint64_t seed,
                           bool stratify) {
  if (records.empty()) throw Error("no prompt records to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train fraction must lie strictly between 0 and 1");

  DatasetSplit split;
  auto& s = split.summary;
  s.n_total = records.size();
  s.train_fraction = train_fraction;
  s.seed = seed;
  s.stratified = stratify;

  Rng rng = make_rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  const auto take = [&](std::vector<std::size_t> idx) {
    shuffle(std::span<std::size_t>(idx), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  };
  if (stratify) {
    std::vector<std::size_t> rest, load;
    for (std::size_t i = 0; i < records.size(); ++i)
      (condition_of_answer(records[i].answer) == Condition::Rest ? rest : load).push_back(i);
    take(rest);
    take(load);
    shuffle(std::span<std::size_t>(train_idx), rng);
    shuffle(std::span<std::size_t>(test_idx), rng);
  } else {
    std::vector<std::size_t> all(records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    take(all);
  }
  if (train_idx.empty() || test_idx.empty())
    throw Error("degenerate split: " + std::to_string(train_idx.size()) + " train / " + std::to_string(test_idx.size()) +
                " test records");

  const auto tally = [&](const std::vector<std::size_t>& idx, std::vector<PromptRecord>& dest, ClassCounts& counts) {
    for (const auto i : idx) {
      dest.push_back(records[i]);
      (condition_of_answer(records[i].answer) == Condition::Rest ? counts.rest : counts.load)++;
    }
  };
  tally(train_idx, split.train, s.train);
  tally(test_idx, split.test, s.test);
  s.n_train = split.train.size();
  s.n_test = split.test.size();
  s.total = {s.train.rest + s.test.rest, s.train.load + s.test.load};
  return split;
}

nlohmann::ordered_json to_json(const DatasetSummary& s) {
  const auto counts = [](const ClassCounts& c) { return ojson{{"rest", c.rest}, {"load", c.load}}; };
  ojson j;
  j["n_total"] = s.n_total;
  j["n_train"] = s.n_train;
  j["n_test"] = s.n_test;
  j["train_fraction"] = s.train_fraction;
  j["seed"] = s.seed;
  j["stratified"] = s.stratified;
  j["class_balance"] = {{"total", counts(s.total)}, {"train", counts(s.train)}, {"test", counts(s.test)}};
  return j;
}

DatasetSummary write_dataset(const std::vector<PromptRecord>& records, double train_fraction, std::uint64_t seed,
                             const std::filesystem::path& out_dir, bool stratify) {
  const auto split = split_dataset(records, train_fraction, seed, stratify);
  std::filesystem::create_directories(out_dir);
  const auto dump = [](const std::vector<PromptRecord>& rs) {
    std::string out;
    for (const auto& r : rs) out += to_jsonl_line(r) + '\n';
    return out;
  };
  write_text_file(out_dir / "train.jsonl", dump(split.train));
  write_text_file(out_dir / "test.jsonl", dump(split.test));
  write_text_file(out_dir / "summary.json", to_json(split.summary).dump(2) + '\n');
  return split.summary;
}

}  // namespace mstool
