#pragma once

#include "mstool/eeg_io.hpp"
#include "mstool/random.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace mstool::test {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline std::vector<std::string> numbered_labels(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back("E" + std::to_string(i + 1));
  return out;
}

inline EegRecording make_recording(Eigen::MatrixXd data, double fs = 250.0, std::string subject = "S01",
                                   Condition cond = Condition::Rest) {
  EegRecording rec;
  rec.channel_labels = numbered_labels(data.rows());
  rec.sampling_rate_hz = fs;
  rec.data = std::move(data);
  rec.meta = SubjectMeta{std::move(subject), 25, Gender::female, 12, cond};
  return rec;
}

// k zero-mean, unit-norm, mutually orthogonal maps as columns.
inline Eigen::MatrixXd orthogonal_maps(Rng& rng, Eigen::Index channels, Eigen::Index k) {
  Eigen::MatrixXd m = random_matrix(rng, channels, k);
  m.rowwise() -= m.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(channels, k);
  q.rowwise() -= q.colwise().mean();
  for (Eigen::Index j = 0; j < k; ++j) q.col(j).normalize();
  return q;
}

struct PeakSet {
  Eigen::MatrixXd samples;
  std::vector<int> truth;
};

// Samples drawn from the given maps with random sign and amplitude, plus
// white noise at the requested per-sample power ratio.
inline PeakSet synthetic_peaks(Rng& rng, const Eigen::MatrixXd& maps, Eigen::Index n, double snr) {
  const Eigen::Index c = maps.rows();
  std::uniform_real_distribution<double> amp(1.0, 3.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  PeakSet out{Eigen::MatrixXd(c, n), {}};
  for (Eigen::Index j = 0; j < n; ++j) {
    const int s = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(maps.cols())));
    const double a = amp(rng) * (uniform_index(rng, 2) ? 1.0 : -1.0);
    const double sigma = std::abs(a) / std::sqrt(snr * static_cast<double>(c));
    for (Eigen::Index i = 0; i < c; ++i) out.samples(i, j) = a * maps(i, s) + sigma * nd(rng);
    out.truth.push_back(s);
  }
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mstool-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace mstool::test
