#pragma once

// Deliberately naive reference implementations: plain loops over the
// definitions, sharing no code with the library.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <vector>

namespace mstool::oracle {

inline double population_std(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

inline std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
  return out;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// Interior samples strictly above the left neighbour and not below the right.
inline std::vector<Eigen::Index> local_maxima(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index t = 1; t + 1 < v.size(); ++t)
    if (v[t] > v[t - 1] && v[t] >= v[t + 1]) out.push_back(t);
  return out;
}

// Explained-variance ratio: sum over samples of (GFP * corr with assigned map)^2
// over the sum of GFP^2.
inline std::vector<double> gev_per_state(const Eigen::MatrixXd& data, const Eigen::MatrixXd& maps,
                                         const std::vector<int>& labels) {
  std::vector<double> num(static_cast<std::size_t>(maps.cols()), 0.0);
  double den = 0;
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    const auto x = column(data, t);
    const double g = population_std(x);
    den += g * g;
    if (g == 0.0) continue;
    const double c = pearson(x, column(maps, labels[static_cast<std::size_t>(t)]));
    num[static_cast<std::size_t>(labels[static_cast<std::size_t>(t)])] += g * g * c * c;
  }
  for (auto& v : num) v /= den;
  return num;
}

struct RunStats {
  std::size_t samples = 0;
  std::size_t runs = 0;
};

inline std::map<int, RunStats> run_stats(const std::vector<int>& labels) {
  std::map<int, RunStats> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto& s = out[labels[t]];
    ++s.samples;
    if (t == 0 || labels[t - 1] != labels[t]) ++s.runs;
  }
  return out;
}

}  // namespace mstool::oracle
