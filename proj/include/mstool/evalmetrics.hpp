#pragma once

#include "mstool/eeg_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mstool {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::uint64_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const std::vector<Condition>& predictions, const std::vector<Condition>& truth,
                          Condition positive = Condition::Load);

// Percentages. A metric whose denominator is zero is std::nullopt.
struct MetricsReport {
  std::optional<double> accuracy, mrate, tpr, fpr, tnr, recall, precision, fscore;
};

MetricsReport metrics(const ConfusionCounts& c);

struct MetricDelta {
  std::string name;
  std::optional<double> before, after, difference, ratio;
};

// after - before and after / before for each metric, in report order.
std::vector<MetricDelta> compare_reports(const MetricsReport& before, const MetricsReport& after);

nlohmann::ordered_json to_json(const ConfusionCounts& c);
nlohmann::ordered_json to_json(const MetricsReport& r);
nlohmann::ordered_json to_json(const std::vector<MetricDelta>& deltas);

// "Rest", "Load" (any case) or one of the two answer sentences.
Condition parse_prediction_label(const std::string& s);

struct Prediction {
  std::string subject_id;
  Condition label;
};

// One `subject_id,label` per line; a header line starting with subject_id is skipped.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

}  // namespace mstool
