#pragma once

#include "mstool/eeg_io.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace mstool {

struct GfpSeries {
  Eigen::VectorXd values;
  double sampling_rate_hz = 0.0;
};

// Zero-mean, unit-norm topography over channels.
class TopographicMap {
 public:
  TopographicMap() = default;
  // Centres and normalizes; throws DegenerateInputError for a constant vector.
  explicit TopographicMap(const Eigen::VectorXd& raw);
  // Takes weights that already satisfy the invariants (within 1e-9) as-is,
  // so maps reloaded from disk keep their exact bits.
  static TopographicMap from_unit(const Eigen::VectorXd& weights);

  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  TopographicMap negated() const;

 private:
  Eigen::VectorXd weights_;
};

struct MicrostateModel {
  std::vector<TopographicMap> maps;
  std::vector<std::string> labels;
  std::vector<std::string> channel_labels;
  double gev_total = 0.0;
  std::uint64_t fit_seed = 0;
  int n_init = 0;
  int converged_iterations = 0;

  std::size_t k() const { return maps.size(); }
  // channels x k
  Eigen::MatrixXd map_matrix() const;
  void validate() const;
};

// Letters A, B, C, ... for k <= 26.
std::vector<std::string> state_letters(std::size_t k);

// Population standard deviation across channels at every sample.
GfpSeries gfp(const EegRecording& rec);
Eigen::VectorXd gfp(const Eigen::MatrixXd& data);

// Interior local maxima (strictly greater than the left neighbour, at least
// the right one). Peaks closer than min_distance_ms are thinned greedily,
// keeping the larger value and, on ties, the earlier index.
std::vector<Eigen::Index> find_gfp_peaks(const GfpSeries& series, double min_distance_ms);

// Pearson correlation across channels between the sample and the map.
double spatial_correlation(const TopographicMap& map, const Eigen::VectorXd& sample);

struct ModKMeansOptions {
  std::size_t k = 4;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct RestartTrace {
  // Explained variance after initialization and after every accepted iteration.
  std::vector<double> explained_variance;
  int iterations = 0;
  bool converged = false;
};

struct ModKMeansFit {
  MicrostateModel model;
  std::vector<RestartTrace> restarts;
  std::size_t best_restart = 0;
};

// Polarity-invariant modified K-means on the columns of `samples`
// (channels x P). Maps are ordered by descending explained variance on the
// same samples; see order_maps for ordering against a full recording.
ModKMeansFit mod_kmeans_fit(const Eigen::MatrixXd& samples, const ModKMeansOptions& opts);
MicrostateModel mod_kmeans(const Eigen::MatrixXd& samples, const ModKMeansOptions& opts);

// Columns of rec.data at the given sample indices.
Eigen::MatrixXd gather_samples(const EegRecording& rec, const std::vector<Eigen::Index>& indices);

// Sorts maps by descending per-state GEV on `data`, relabels them A, B, ...
// and flips each map so its largest-magnitude weight is positive.
MicrostateModel order_maps(const MicrostateModel& model, const Eigen::MatrixXd& data);
MicrostateModel order_maps(const MicrostateModel& model, const EegRecording& rec);

}  // namespace mstool
