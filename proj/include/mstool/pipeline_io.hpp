#pragma once

#include "mstool/backfit.hpp"
#include "mstool/microstate.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace mstool {

nlohmann::ordered_json to_json(const MicrostateModel& model);
MicrostateModel model_from_json(const nlohmann::json& j);
MicrostateModel load_model(const std::filesystem::path& path);

// sample_index,label_letter,abs_corr
std::string labels_csv(const LabelSequence& seq, const MicrostateModel& model);
LabelSequence load_labels_csv(const std::filesystem::path& path, const MicrostateModel& model, double sampling_rate_hz);

nlohmann::ordered_json to_json(const GevReport& report, const MicrostateModel& model);

// FNV-1a 64 of the file bytes, as 16 hex digits. Used in provenance records.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace mstool
