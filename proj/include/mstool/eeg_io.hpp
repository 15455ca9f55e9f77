#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace mstool {

enum class Gender { male, female };
enum class Condition { Rest, Load };

std::string to_string(Gender g);
std::string to_string(Condition c);
Gender parse_gender(const std::string& s);
Condition parse_condition(const std::string& s);

struct SubjectMeta {
  std::string subject_id;
  int age = 0;
  Gender gender = Gender::female;
  int arithmetic_score = 0;  // count of subtractions
  Condition condition = Condition::Rest;

  // Throws Error if subject_id is empty, age <= 0 or arithmetic_score < 0.
  void validate() const;
};

// Channel-major matrix: rows are channels, columns are samples (microvolts).
struct EegRecording {
  std::vector<std::string> channel_labels;
  double sampling_rate_hz = 0.0;
  Eigen::MatrixXd data;
  SubjectMeta meta;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
  double duration_s() const { return static_cast<double>(data.cols()) / sampling_rate_hz; }

  // Index of a channel label, or -1.
  Eigen::Index channel_index(const std::string& label) const;

  // Checks every structural invariant; non-finite values are reported with
  // their (channel, sample) coordinates.
  void validate() const;
};

enum class RecordingFormat { csv, raw_f64 };

RecordingFormat parse_format(const std::string& s);
// .csv -> csv, anything else -> raw_f64.
RecordingFormat format_from_extension(const std::filesystem::path& path);

// `<dir>/<stem>.meta.json` next to a data file.
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

EegRecording load_recording(const std::filesystem::path& path, RecordingFormat format);
EegRecording load_recording(const std::filesystem::path& path);

// Writes the data file and its sidecar.
void save_recording(const EegRecording& rec, const std::filesystem::path& path, RecordingFormat format);

}  // namespace mstool
