#include "mstool/microstate.hpp"

#include "mstool/backfit.hpp"
#include "mstool/error.hpp"
#include "mstool/parallel.hpp"
#include "mstool/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace mstool {

TopographicMap::TopographicMap(const Eigen::VectorXd& raw) {
  Eigen::VectorXd w = raw.array() - raw.mean();
  const double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DegenerateInputError("topographic map has zero spatial variance");
  w /= norm;
  // second pass removes rounding left by the first centring
  w.array() -= w.mean();
  weights_ = w / w.norm();
}

TopographicMap TopographicMap::from_unit(const Eigen::VectorXd& weights) {
  if (weights.size() < 2 || std::abs(weights.mean()) > 1e-9 || std::abs(weights.norm() - 1.0) > 1e-9)
    throw Error("map weights must be zero-mean and unit-norm");
  TopographicMap m;
  m.weights_ = weights;
  return m;
}

TopographicMap TopographicMap::negated() const {
  TopographicMap m;
  m.weights_ = -weights_;
  return m;
}

Eigen::MatrixXd MicrostateModel::map_matrix() const {
  if (maps.empty()) return {};
  Eigen::MatrixXd m(maps.front().size(), static_cast<Eigen::Index>(maps.size()));
  for (std::size_t s = 0; s < maps.size(); ++s) m.col(static_cast<Eigen::Index>(s)) = maps[s].weights();
  return m;
}

void MicrostateModel::validate() const {
  if (maps.empty()) throw Error("model has no maps");
  if (labels.size() != maps.size()) throw Error("model label count does not match map count");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw Error("duplicate state label " + labels[i]);
  const auto channels = maps.front().size();
  for (const auto& m : maps) {
    if (m.size() != channels) throw Error("maps have inconsistent channel counts");
    if (std::abs(m.weights().mean()) > 1e-9 || std::abs(m.weights().norm() - 1.0) > 1e-9)
      throw Error("map is not zero-mean and unit-norm");
  }
  if (!channel_labels.empty() && static_cast<Eigen::Index>(channel_labels.size()) != channels)
    throw Error("model channel labels do not match map size");
  if (gev_total < 0.0 || gev_total > 1.0 + 1e-9) throw Error("gev_total outside [0, 1]");
}

std::vector<std::string> state_letters(std::size_t k) {
  if (k < 1 || k > 26) throw Error("number of states must be between 1 and 26");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(1, static_cast<char>('A' + i));
  return out;
}

Eigen::VectorXd gfp(const Eigen::MatrixXd& data) {
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centred = data.rowwise() - mean;
  return (centred.colwise().squaredNorm() / static_cast<double>(data.rows())).cwiseSqrt().transpose();
}

GfpSeries gfp(const EegRecording& rec) { return {gfp(rec.data), rec.sampling_rate_hz}; }

std::vector<Eigen::Index> find_gfp_peaks(const GfpSeries& series, double min_distance_ms) {
  const auto& v = series.values;
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index t = 1; t + 1 < v.size(); ++t)
    if (v[t] > v[t - 1] && v[t] >= v[t + 1]) peaks.push_back(t);
  if (min_distance_ms <= 0.0 || peaks.size() < 2) return peaks;

  const double min_distance_samples = min_distance_ms * series.sampling_rate_hz / 1000.0;
  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[peaks[a]] > v[peaks[b]]; });
  std::vector<bool> removed(peaks.size(), false);
  for (const std::size_t i : order) {
    if (removed[i]) continue;
    for (std::size_t j = i; j-- > 0 && static_cast<double>(peaks[i] - peaks[j]) < min_distance_samples;) removed[j] = true;
    for (std::size_t j = i + 1; j < peaks.size() && static_cast<double>(peaks[j] - peaks[i]) < min_distance_samples; ++j)
      removed[j] = true;
  }
  std::vector<Eigen::Index> kept;
  for (std::size_t i = 0; i < peaks.size(); ++i)
    if (!removed[i]) kept.push_back(peaks[i]);
  return kept;
}

double spatial_correlation(const TopographicMap& map, const Eigen::VectorXd& sample) {
  if (map.size() != sample.size()) throw Error("map and sample have different channel counts");
  const Eigen::VectorXd centred = sample.array() - sample.mean();
  const double norm = centred.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("sample has zero spatial variance");
  const double r = map.weights().dot(centred) / norm;
  return std::clamp(r, -1.0, 1.0);
}

namespace {

struct Restart {
  Eigen::MatrixXd maps;  // channels x k
  RestartTrace trace;
};

// Sum over samples of max_k (m_k . x)^2, divided by the total squared norm.
double explained_variance(const Eigen::MatrixXd& maps, const Eigen::MatrixXd& x, double total_power) {
  const Eigen::MatrixXd act = maps.transpose() * x;
  return act.array().square().colwise().maxCoeff().sum() / total_power;
}

Eigen::VectorXd centred_unit(const Eigen::VectorXd& v) { return TopographicMap(v).weights(); }

Restart run_restart(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& usable, double total_power,
                    const ModKMeansOptions& opts, std::uint64_t restart) {
  const auto channels = x.rows();
  const auto n = x.cols();
  const auto k = static_cast<Eigen::Index>(opts.k);
  Rng rng = make_rng(opts.seed, restart);

  // k distinct samples with non-zero spatial variance
  std::vector<Eigen::Index> pool = usable;
  Restart r;
  r.maps.resize(channels, k);
  for (Eigen::Index s = 0; s < k; ++s) {
    const auto pick = static_cast<std::size_t>(uniform_index(rng, pool.size() - static_cast<std::size_t>(s)));
    std::swap(pool[pick], pool[pool.size() - 1 - static_cast<std::size_t>(s)]);
    r.maps.col(s) = centred_unit(x.col(pool[pool.size() - 1 - static_cast<std::size_t>(s)]));
  }

  double ev = explained_variance(r.maps, x, total_power);
  r.trace.explained_variance.push_back(ev);
  const Eigen::VectorXd sq_norm = x.colwise().squaredNorm().transpose();

  for (int it = 0; it < opts.max_iter; ++it) {
    const Eigen::MatrixXd act = r.maps.transpose() * x;
    std::vector<Eigen::Index> label(static_cast<std::size_t>(n));
    Eigen::VectorXd explained(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      Eigen::Index best = 0;
      act.col(t).array().square().maxCoeff(&best);
      label[static_cast<std::size_t>(t)] = best;
      explained[t] = sq_norm[t] > 0.0 ? act(best, t) * act(best, t) / sq_norm[t] : 1.0;
    }

    Eigen::MatrixXd next(channels, k);
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index s = 0; s < k; ++s) {
      Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(channels, channels);
      Eigen::Index members = 0;
      for (Eigen::Index t = 0; t < n; ++t)
        if (label[static_cast<std::size_t>(t)] == s) {
          scatter.selfadjointView<Eigen::Lower>().rankUpdate(x.col(t));
          ++members;
        }
      if (members == 0) {
        // empty cluster: reseed from the worst explained sample not already used
        Eigen::Index worst = -1;
        for (const Eigen::Index t : usable)
          if (!taken[static_cast<std::size_t>(t)] && (worst < 0 || explained[t] < explained[worst])) worst = t;
        taken[static_cast<std::size_t>(worst)] = true;
        next.col(s) = centred_unit(x.col(worst));
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter.selfadjointView<Eigen::Lower>());
      next.col(s) = centred_unit(eig.eigenvectors().col(channels - 1));
    }

    const double next_ev = explained_variance(next, x, total_power);
    // Both steps are ascent steps; a drop can only be rounding at the optimum.
    if (next_ev < ev) {
      r.trace.converged = true;
      break;
    }
    r.maps = std::move(next);
    r.trace.explained_variance.push_back(next_ev);
    r.trace.iterations = it + 1;
    const double change = next_ev - ev;
    ev = next_ev;
    if (change <= opts.tol * next_ev) {
      r.trace.converged = true;
      break;
    }
  }
  assert(std::is_sorted(r.trace.explained_variance.begin(), r.trace.explained_variance.end()));
  return r;
}

}  // namespace

ModKMeansFit mod_kmeans_fit(const Eigen::MatrixXd& samples, const ModKMeansOptions& opts) {
  if (opts.k < 1) throw Error("k must be >= 1");
  if (opts.n_init < 1) throw Error("n_init must be >= 1");
  if (opts.max_iter < 1) throw Error("max_iter must be >= 1");
  if (!(opts.tol >= 0.0)) throw Error("tol must be >= 0");
  if (static_cast<std::size_t>(samples.cols()) < opts.k)
    throw Error("k = " + std::to_string(opts.k) + " exceeds the number of samples (" + std::to_string(samples.cols()) + ")");
  if (samples.rows() < 2) throw Error("clustering needs at least 2 channels");
  (void)state_letters(opts.k);

  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd x = samples.rowwise() - mean;
  const Eigen::VectorXd sq_norm = x.colwise().squaredNorm().transpose();
  const double scale = sq_norm.maxCoeff();
  std::vector<Eigen::Index> usable;
  for (Eigen::Index t = 0; t < x.cols(); ++t)
    if (sq_norm[t] > 1e-24 * scale && sq_norm[t] > 0.0) usable.push_back(t);
  if (usable.empty()) throw DegenerateInputError("all samples have zero spatial variance");
  if (usable.size() < opts.k)
    throw Error("only " + std::to_string(usable.size()) + " non-constant samples for k = " + std::to_string(opts.k));
  const double total_power = sq_norm.sum();

  std::vector<Restart> runs(static_cast<std::size_t>(opts.n_init));
  parallel_for(runs.size(), opts.jobs, [&](std::size_t i) { runs[i] = run_restart(x, usable, total_power, opts, i); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].trace.explained_variance.back() > runs[best].trace.explained_variance.back()) best = i;

  ModKMeansFit fit;
  fit.best_restart = best;
  for (const auto& r : runs) fit.restarts.push_back(r.trace);
  MicrostateModel model;
  for (Eigen::Index s = 0; s < runs[best].maps.cols(); ++s) model.maps.emplace_back(runs[best].maps.col(s));
  model.labels = state_letters(opts.k);
  model.fit_seed = opts.seed;
  model.n_init = opts.n_init;
  model.converged_iterations = runs[best].trace.iterations;
  fit.model = order_maps(model, samples);
  return fit;
}

MicrostateModel mod_kmeans(const Eigen::MatrixXd& samples, const ModKMeansOptions& opts) {
  return mod_kmeans_fit(samples, opts).model;
}

Eigen::MatrixXd gather_samples(const EegRecording& rec, const std::vector<Eigen::Index>& indices) {
  Eigen::MatrixXd out(rec.channels(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = rec.data.col(indices[i]);
  return out;
}

MicrostateModel order_maps(const MicrostateModel& model, const Eigen::MatrixXd& data) {
  const auto seq = backfit(data, model, 1.0);
  const auto report = gev(data, model, seq.labels);
  std::vector<std::size_t> order(model.k());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.per_state[a] > report.per_state[b]; });

  MicrostateModel out = model;
  out.labels = state_letters(model.k());
  out.maps.clear();
  for (const std::size_t s : order) {
    const auto& m = model.maps[s];
    Eigen::Index arg = 0;
    m.weights().cwiseAbs().maxCoeff(&arg);
    out.maps.push_back(m.weights()[arg] < 0.0 ? m.negated() : m);
  }
  out.gev_total = std::clamp(report.total, 0.0, 1.0);
  return out;
}

MicrostateModel order_maps(const MicrostateModel& model, const EegRecording& rec) {
  auto out = order_maps(model, rec.data);
  out.channel_labels = rec.channel_labels;
  return out;
}

}  // namespace mstool
