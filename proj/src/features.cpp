#include "mstool/features.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"

namespace mstool {

FeatureTable extract_features(const EegRecording& rec, const MicrostateModel& model, const LabelSequence& seq) {
  if (seq.size() == 0) throw Error("cannot extract features from an empty label sequence");
  if (static_cast<Eigen::Index>(seq.size()) != rec.samples())
    throw Error("label sequence length differs from the recording");
  const std::size_t k = model.k();
  seq.validate(k);
  const GevReport report = gev(rec, model, seq);

  const double n = static_cast<double>(seq.size());
  const double duration = n / rec.sampling_rate_hz;
  std::vector<double> corr_sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    corr_sum[static_cast<std::size_t>(seq.labels[t])] += seq.corr[t];
    ++count[static_cast<std::size_t>(seq.labels[t])];
  }
  std::vector<std::size_t> n_runs(k, 0);
  for (const auto& r : run_lengths(seq.labels)) ++n_runs[static_cast<std::size_t>(r.state)];

  FeatureTable table;
  table.subject = rec.meta;
  table.duration_s = duration;
  for (std::size_t s = 0; s < k; ++s) {
    StateFeatures f;
    f.gev = report.per_state[s];
    if (count[s] > 0) {
      f.mean_corr = corr_sum[s] / static_cast<double>(count[s]);
      f.timecov_fraction = static_cast<double>(count[s]) / n;
      f.timecov_seconds = static_cast<double>(count[s]) / rec.sampling_rate_hz;
      f.meandurs_s = static_cast<double>(count[s]) / static_cast<double>(n_runs[s]) / rec.sampling_rate_hz;
      f.occurrence_hz = static_cast<double>(n_runs[s]) / duration;
    }
    table.per_state[model.labels[s]] = f;
  }
  return table;
}

std::string features_csv(const FeatureTable& table) {
  std::string out = "subject_id,condition,state,gev,mean_corr,timecov_fraction,timecov_s,meandurs_s,occurrence_hz\n";
  for (const auto& [state, f] : table.per_state) {
    out += table.subject.subject_id + ',' + to_string(table.subject.condition) + ',' + state;
    for (const double v : {f.gev, f.mean_corr, f.timecov_fraction, f.timecov_seconds, f.meandurs_s, f.occurrence_hz})
      out += ',' + format_roundtrip(v);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const FeatureTable& table) {
  nlohmann::ordered_json j;
  j["subject_id"] = table.subject.subject_id;
  j["age"] = table.subject.age;
  j["gender"] = to_string(table.subject.gender);
  j["arithmetic_score"] = table.subject.arithmetic_score;
  j["condition"] = to_string(table.subject.condition);
  j["duration_s"] = table.duration_s;
  auto& states = j["states"];
  states = nlohmann::ordered_json::object();
  for (const auto& [state, f] : table.per_state)
    states[state] = {{"gev", f.gev},
                     {"mean_corr", f.mean_corr},
                     {"timecov_fraction", f.timecov_fraction},
                     {"timecov_s", f.timecov_seconds},
                     {"meandurs_s", f.meandurs_s},
                     {"occurrence_hz", f.occurrence_hz}};
  return j;
}

FeatureTable feature_table_from_json(const nlohmann::json& j) {
  FeatureTable t;
  try {
    t.subject.subject_id = j.at("subject_id").get<std::string>();
    t.subject.age = j.at("age").get<int>();
    t.subject.gender = parse_gender(j.at("gender").get<std::string>());
    t.subject.arithmetic_score = j.at("arithmetic_score").get<int>();
    t.subject.condition = parse_condition(j.at("condition").get<std::string>());
    t.duration_s = j.at("duration_s").get<double>();
    for (const auto& [state, f] : j.at("states").items()) {
      StateFeatures s;
      s.gev = f.at("gev").get<double>();
      s.mean_corr = f.at("mean_corr").get<double>();
      s.timecov_fraction = f.at("timecov_fraction").get<double>();
      s.timecov_seconds = f.at("timecov_s").get<double>();
      s.meandurs_s = f.at("meandurs_s").get<double>();
      s.occurrence_hz = f.at("occurrence_hz").get<double>();
      t.per_state[state] = s;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed feature table: ") + e.what());
  }
  t.subject.validate();
  return t;
}

}  // namespace mstool
