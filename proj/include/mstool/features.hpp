#pragma once

#include "mstool/backfit.hpp"
#include "mstool/eeg_io.hpp"
#include "mstool/microstate.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace mstool {

struct StateFeatures {
  double gev = 0.0;
  double mean_corr = 0.0;
  double timecov_fraction = 0.0;
  double timecov_seconds = 0.0;
  double meandurs_s = 0.0;
  double occurrence_hz = 0.0;
};

struct FeatureTable {
  SubjectMeta subject;
  double duration_s = 0.0;
  std::map<std::string, StateFeatures> per_state;  // keyed by state letter
};

// Requires `seq` to come from backfit(rec, model), optionally smoothed.
FeatureTable extract_features(const EegRecording& rec, const MicrostateModel& model, const LabelSequence& seq);

std::string features_csv(const FeatureTable& table);
nlohmann::ordered_json to_json(const FeatureTable& table);
FeatureTable feature_table_from_json(const nlohmann::json& j);

}  // namespace mstool
