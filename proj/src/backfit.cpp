#include "mstool/backfit.hpp"

#include "mstool/error.hpp"

#include <algorithm>
#include <cmath>

namespace mstool {

void LabelSequence::validate(std::size_t k) const {
  if (labels.size() != corr.size()) throw Error("label and correlation vectors differ in length");
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] < 0 || static_cast<std::size_t>(labels[t]) >= k)
      throw Error("label " + std::to_string(labels[t]) + " at sample " + std::to_string(t) + " is not a state index < " +
                  std::to_string(k));
    if (!(corr[t] >= 0.0 && corr[t] <= 1.0)) throw Error("correlation at sample " + std::to_string(t) + " outside [0, 1]");
  }
  if (state_corr.size() != 0 &&
      (state_corr.rows() != static_cast<Eigen::Index>(k) || state_corr.cols() != static_cast<Eigen::Index>(labels.size())))
    throw Error("per-state correlation matrix has the wrong shape");
}

std::vector<Run> run_lengths(const std::vector<int>& labels) {
  std::vector<Run> runs;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (runs.empty() || runs.back().state != labels[t])
      runs.push_back({labels[t], t, 1});
    else
      ++runs.back().length;
  }
  return runs;
}

LabelSequence backfit(const Eigen::MatrixXd& data, const MicrostateModel& model, double sampling_rate_hz) {
  const Eigen::MatrixXd maps = model.map_matrix();
  if (maps.rows() != data.rows())
    throw Error("model has " + std::to_string(maps.rows()) + " channels, recording has " + std::to_string(data.rows()));
  const auto k = maps.cols();
  const auto n = data.cols();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centred = data.rowwise() - mean;
  const Eigen::RowVectorXd norms = centred.colwise().norm();
  const Eigen::MatrixXd act = maps.transpose() * centred;

  LabelSequence seq;
  seq.sampling_rate_hz = sampling_rate_hz;
  seq.labels.assign(static_cast<std::size_t>(n), 0);
  seq.corr.assign(static_cast<std::size_t>(n), 0.0);
  seq.state_corr = Eigen::MatrixXd::Zero(k, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!(norms[t] > 0.0)) {
      ++seq.constant_samples;
      continue;
    }
    int best = 0;
    for (Eigen::Index s = 0; s < k; ++s) {
      const double r = std::min(1.0, std::abs(act(s, t)) / norms[t]);
      seq.state_corr(s, t) = r;
      if (r > seq.state_corr(best, t)) best = static_cast<int>(s);
    }
    seq.labels[static_cast<std::size_t>(t)] = best;
    seq.corr[static_cast<std::size_t>(t)] = seq.state_corr(best, t);
  }
  return seq;
}

LabelSequence backfit(const EegRecording& rec, const MicrostateModel& model) {
  return backfit(rec.data, model, rec.sampling_rate_hz);
}

LabelSequence smooth_labels(const LabelSequence& seq, double min_duration_ms) {
  if (min_duration_ms <= 0.0 || seq.size() < 2) return seq;
  if (seq.state_corr.cols() != static_cast<Eigen::Index>(seq.size()))
    throw Error("smoothing needs the per-state correlations produced by backfit");
  const double min_samples = min_duration_ms * seq.sampling_rate_hz / 1000.0;
  LabelSequence out = seq;
  auto& labels = out.labels;
  const std::size_t n = labels.size();

  // Every pass eliminates each short run it touches; the cap only guards
  // against pathological alternation.
  for (std::size_t pass = 0; pass < n; ++pass) {
    const auto runs = run_lengths(labels);
    if (runs.size() < 2) break;
    bool changed = false;
    for (const auto& r : runs) {
      if (static_cast<double>(r.length) >= min_samples) continue;
      const std::size_t end = r.start + r.length;
      const int left = r.start > 0 ? labels[r.start - 1] : -1;
      const int right = end < n ? labels[end] : -1;
      // an earlier reassignment in this pass already merged this run
      if (left == r.state || right == r.state) continue;
      for (std::size_t t = r.start; t < end; ++t) {
        int target = left;
        if (left < 0)
          target = right;
        else if (right >= 0 && seq.state_corr(right, static_cast<Eigen::Index>(t)) > seq.state_corr(left, static_cast<Eigen::Index>(t)))
          target = right;
        labels[t] = target;
      }
      changed = true;
    }
    if (!changed) break;
  }
  for (std::size_t t = 0; t < n; ++t)
    out.corr[t] = out.state_corr(labels[t], static_cast<Eigen::Index>(t));
  return out;
}

GevReport gev(const Eigen::MatrixXd& data, const MicrostateModel& model, const std::vector<int>& labels) {
  const Eigen::MatrixXd maps = model.map_matrix();
  if (maps.rows() != data.rows()) throw Error("model and recording channel counts differ");
  if (static_cast<Eigen::Index>(labels.size()) != data.cols()) throw Error("label sequence length differs from recording");
  const auto k = static_cast<std::size_t>(maps.cols());
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centred = data.rowwise() - mean;
  const double channels = static_cast<double>(data.rows());

  GevReport report;
  report.per_state.assign(k, 0.0);
  double denom = 0.0;
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    const double sq = centred.col(t).squaredNorm();
    const double gfp_sq = sq / channels;
    denom += gfp_sq;
    const int s = labels[static_cast<std::size_t>(t)];
    if (s < 0 || static_cast<std::size_t>(s) >= k) throw Error("label out of range at sample " + std::to_string(t));
    if (!(sq > 0.0)) continue;
    const double c = maps.col(s).dot(centred.col(t)) / std::sqrt(sq);
    report.per_state[static_cast<std::size_t>(s)] += gfp_sq * c * c;
  }
  if (!(denom > 0.0)) throw DegenerateInputError("global field power is zero at every sample");
  for (auto& v : report.per_state) {
    v /= denom;
    report.total += v;
  }
  return report;
}

GevReport gev(const EegRecording& rec, const MicrostateModel& model, const LabelSequence& seq) {
  return gev(rec.data, model, seq.labels);
}

}  // namespace mstool
