#pragma once

#include "mstool/eeg_io.hpp"
#include "mstool/microstate.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mstool {

struct LabelSequence {
  std::vector<int> labels;   // state index per sample
  std::vector<double> corr;  // |spatial correlation| with the assigned map
  double sampling_rate_hz = 0.0;
  // k x samples matrix of |spatial correlation| with every map. Filled by
  // backfit; empty when the sequence was read back from a labels file.
  Eigen::MatrixXd state_corr;
  // Samples with zero spatial variance (label 0, corr 0).
  std::size_t constant_samples = 0;

  std::size_t size() const { return labels.size(); }
  void validate(std::size_t k) const;
};

struct GevReport {
  std::vector<double> per_state;
  double total = 0.0;
};

LabelSequence backfit(const Eigen::MatrixXd& data, const MicrostateModel& model, double sampling_rate_hz);
LabelSequence backfit(const EegRecording& rec, const MicrostateModel& model);

// Reassigns runs shorter than min_duration_ms to their neighbouring runs.
LabelSequence smooth_labels(const LabelSequence& seq, double min_duration_ms);

GevReport gev(const Eigen::MatrixXd& data, const MicrostateModel& model, const std::vector<int>& labels);
GevReport gev(const EegRecording& rec, const MicrostateModel& model, const LabelSequence& seq);

// Maximal runs of equal labels as (state, start, length).
struct Run {
  int state;
  std::size_t start;
  std::size_t length;
};
std::vector<Run> run_lengths(const std::vector<int>& labels);

}  // namespace mstool
