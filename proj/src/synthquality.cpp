#include "mstool/synthquality.hpp"

#include "mstool/error.hpp"
#include "mstool/random.hpp"
#include "mstool/text.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace mstool {

void Table::validate() const {
  if (columns.empty()) throw Error("table has no columns");
  const auto n = rows();
  for (const auto& c : columns) {
    if (c.size() != n) throw Error("table is not rectangular (column '" + c.name + "')");
    if (c.kind == ColumnKind::numeric)
      for (std::size_t r = 0; r < n; ++r)
        if (!std::isfinite(c.numeric[r]))
          throw Error("non-finite value in column '" + c.name + "', row " + std::to_string(r + 1));
  }
}

bool Table::same_schema(const Table& other) const {
  if (columns.size() != other.columns.size()) return false;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name != other.columns[i].name || columns[i].kind != other.columns[i].kind) return false;
  return true;
}

Table read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty table file");
  strip_cr(line);
  Table t;
  for (const auto& cell : split(line, ',')) {
    const auto pos = cell.rfind(':');
    if (pos == std::string::npos)
      throw ParseError(path.string() + ": header cell '" + cell + "' needs a :numeric or :categorical suffix");
    Column c;
    c.name = trim(cell.substr(0, pos));
    const auto kind = to_lower(trim(cell.substr(pos + 1)));
    if (kind == "numeric" || kind == "num")
      c.kind = ColumnKind::numeric;
    else if (kind == "categorical" || kind == "cat")
      c.kind = ColumnKind::categorical;
    else
      throw ParseError(path.string() + ": unknown column kind '" + kind + "'");
    t.columns.push_back(std::move(c));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size())
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(t.columns.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto& c = t.columns[i];
      if (c.kind == ColumnKind::numeric) {
        double v = 0.0;
        if (!parse_double(cells[i], v) || !std::isfinite(v))
          throw ParseError(path.string() + ": line " + std::to_string(line_no) + ", column '" + c.name +
                           "': not a finite number");
        c.numeric.push_back(v);
      } else {
        c.categorical.push_back(trim(cells[i]));
      }
    }
  }
  t.validate();
  return t;
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i].name + (t.columns[i].kind == ColumnKind::numeric ? ":numeric" : ":categorical");
  }
  out += '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ',';
      const auto& c = t.columns[i];
      out += c.kind == ColumnKind::numeric ? format_roundtrip(c.numeric[r]) : c.categorical[r];
    }
    out += '\n';
  }
  return out;
}

double js_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error("distributions have different supports");
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = (p[i] + q[i]) / 2.0;
    if (p[i] > 0.0) kl_p += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) kl_q += q[i] * std::log2(q[i] / m);
  }
  const double jsd = 0.5 * kl_p + 0.5 * kl_q;
  return std::sqrt(std::clamp(jsd, 0.0, 1.0));
}

double js_distance(const Column& a, const Column& b, int bins) {
  if (a.kind != b.kind) throw Error("cannot compare a numeric column with a categorical one");
  if (a.size() == 0 || b.size() == 0) throw Error("cannot compare empty columns");
  std::vector<double> p, q;
  if (a.kind == ColumnKind::categorical) {
    std::map<std::string, std::pair<double, double>> freq;
    for (const auto& v : a.categorical) freq[v].first += 1.0;
    for (const auto& v : b.categorical) freq[v].second += 1.0;
    for (const auto& [_, f] : freq) {
      p.push_back(f.first / static_cast<double>(a.size()));
      q.push_back(f.second / static_cast<double>(b.size()));
    }
    return js_distance(p, q);
  }
  if (bins < 2) throw Error("numeric columns need at least 2 bins");
  const auto [amin, amax] = std::minmax_element(a.numeric.begin(), a.numeric.end());
  const auto [bmin, bmax] = std::minmax_element(b.numeric.begin(), b.numeric.end());
  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  if (!(hi > lo)) return 0.0;
  const double width = (hi - lo) / bins;
  const auto histogram = [&](const std::vector<double>& xs) {
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    for (const double x : xs) {
      auto idx = static_cast<long long>(std::floor((x - lo) / width));
      idx = std::clamp<long long>(idx, 0, bins - 1);
      h[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (auto& v : h) v /= static_cast<double>(xs.size());
    return h;
  };
  return js_distance(histogram(a.numeric), histogram(b.numeric));
}

namespace {

void require_comparable(const Table& orig, const Table& synth) {
  orig.validate();
  synth.validate();
  if (!orig.same_schema(synth)) throw Error("original and synthetic tables have different schemas");
  if (orig.rows() == 0 || synth.rows() == 0) throw Error("tables must be non-empty");
}

// Rows sorted lexicographically so that every floating-point reduction
// below sees the same order whatever the input row order.
Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
    return false;
  });
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return out;
}

bool is_constant(const Eigen::VectorXd& v) { return v.size() == 0 || v.minCoeff() == v.maxCoeff(); }

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double r = da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
  return std::clamp(r, -1.0, 1.0);
}

double normal_quantile(double u) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, u);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::vector<Eigen::MatrixXd> encode_tables(const std::vector<const Table*>& tables) {
  if (tables.empty()) return {};
  const auto& schema = *tables.front();
  std::vector<Eigen::MatrixXd> out;
  for (const auto* t : tables) out.emplace_back(static_cast<Eigen::Index>(t->rows()), static_cast<Eigen::Index>(schema.columns.size()));
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    std::map<std::string, double> rank;
    if (schema.columns[c].kind == ColumnKind::categorical) {
      std::set<std::string> all;
      for (const auto* t : tables) all.insert(t->columns[c].categorical.begin(), t->columns[c].categorical.end());
      double r = 0.0;
      for (const auto& v : all) rank[v] = r++;
    }
    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
      const auto& col = tables[ti]->columns[c];
      for (std::size_t r = 0; r < col.size(); ++r)
        out[ti](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            col.kind == ColumnKind::numeric ? col.numeric[r] : rank.at(col.categorical[r]);
    }
  }
  return out;
}

double field_distribution_stability(const Table& orig, const Table& synth, int bins) {
  require_comparable(orig, synth);
  double sum = 0.0;
  for (std::size_t c = 0; c < orig.columns.size(); ++c) sum += js_distance(orig.columns[c], synth.columns[c], bins);
  return 100.0 * (1.0 - sum / static_cast<double>(orig.columns.size()));
}

CorrelationStability field_correlation_stability(const Table& orig, const Table& synth) {
  require_comparable(orig, synth);
  if (orig.columns.size() < 2) throw Error("correlation stability needs at least 2 fields");
  const auto enc = encode_tables({&orig, &synth});
  const Eigen::MatrixXd xo = canonical_rows(enc[0]);
  const Eigen::MatrixXd xs = canonical_rows(enc[1]);
  CorrelationStability out;
  double diff_sum = 0.0;
  for (Eigen::Index i = 0; i < xo.cols(); ++i)
    for (Eigen::Index j = i + 1; j < xo.cols(); ++j) {
      if (is_constant(xo.col(i)) || is_constant(xo.col(j)) || is_constant(xs.col(i)) || is_constant(xs.col(j))) {
        ++out.pairs_skipped;
        continue;
      }
      diff_sum += std::abs(pearson(xo.col(i), xo.col(j)) - pearson(xs.col(i), xs.col(j))) / 2.0;
      ++out.pairs_used;
    }
  if (out.pairs_used == 0) throw DegenerateInputError("every field pair involves a constant column");
  out.score = 100.0 * (1.0 - diff_sum / static_cast<double>(out.pairs_used));
  return out;
}

StructureStability deep_structure_stability(const Table& orig, const Table& synth, double variance_threshold, int bins) {
  require_comparable(orig, synth);
  if (orig.columns.size() < 2) throw Error("deep structure stability needs at least 2 fields");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) throw Error("variance threshold must lie in (0, 1]");
  const auto enc = encode_tables({&orig, &synth});
  const Eigen::MatrixXd xo = canonical_rows(enc[0]);
  const Eigen::MatrixXd xs = canonical_rows(enc[1]);

  StructureStability out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < xo.cols(); ++c) {
    if (is_constant(xo.col(c)))
      ++out.dropped_columns;
    else
      keep.push_back(c);
  }
  if (keep.empty()) throw DegenerateInputError("every field of the original table is constant");
  const auto p = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd zo(xo.rows(), p), zs(xs.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd col = xo.col(keep[static_cast<std::size_t>(j)]);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    zo.col(j) = (col.array() - mean) / sd;
    zs.col(j) = (xs.col(keep[static_cast<std::size_t>(j)]).array() - mean) / sd;
  }
  const Eigen::MatrixXd cov = zo.transpose() * zo / static_cast<double>(zo.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double top = values[0];
  double total = 0.0;
  Eigen::Index usable = 0;
  for (Eigen::Index i = 0; i < values.size() && values[i] > 1e-12 * top; ++i) {
    total += values[i];
    ++usable;
  }
  Eigen::Index m = 0;
  for (double cum = 0.0; m < usable;) {
    cum += values[m++];
    if (cum / total >= variance_threshold) break;
  }
  out.components = static_cast<std::size_t>(m);

  double dist = 0.0;
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::VectorXd v = vectors.col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    Column po{"pc", ColumnKind::numeric, {}, {}}, ps{"pc", ColumnKind::numeric, {}, {}};
    const Eigen::VectorXd so = zo * v, ss = zs * v;
    po.numeric.assign(so.data(), so.data() + so.size());
    ps.numeric.assign(ss.data(), ss.data() + ss.size());
    dist += js_distance(po, ps, bins);
  }
  out.score = 100.0 * (1.0 - dist / static_cast<double>(m));
  return out;
}

double composite_score(const std::array<double, 3>& components, const std::array<double, 3>& weights) {
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw Error("composite weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("composite weights must sum to 1");
  return components[0] * weights[0] + components[1] * weights[1] + components[2] * weights[2];
}

void QualityOptions::validate() const {
  if (bins < 2) throw Error("bins must be >= 2");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) throw Error("variance threshold must lie in (0, 1]");
  (void)composite_score({0, 0, 0}, weights);
}

QualityReport score_quality(const Table& orig, const Table& synth, const QualityOptions& opts) {
  opts.validate();
  QualityReport r;
  r.field_distribution_stability = field_distribution_stability(orig, synth, opts.bins);
  const auto corr = field_correlation_stability(orig, synth);
  r.field_correlation_stability = corr.score;
  r.correlation_pairs_skipped = corr.pairs_skipped;
  const auto deep = deep_structure_stability(orig, synth, opts.variance_threshold, opts.bins);
  r.deep_structure_stability = deep.score;
  r.principal_components = deep.components;
  r.weights = opts.weights;
  r.composite = composite_score({r.field_distribution_stability, r.field_correlation_stability, r.deep_structure_stability},
                                opts.weights);
  return r;
}

nlohmann::ordered_json to_json(const QualityReport& r) {
  nlohmann::ordered_json j;
  j["field_distribution_stability"] = r.field_distribution_stability;
  j["field_correlation_stability"] = r.field_correlation_stability;
  j["deep_structure_stability"] = r.deep_structure_stability;
  j["composite"] = r.composite;
  j["composite_display"] = static_cast<long long>(std::llround(r.composite));
  j["weights"] = r.weights;
  j["correlation_pairs_skipped"] = r.correlation_pairs_skipped;
  j["principal_components"] = r.principal_components;
  return j;
}

Table baseline_synthesize(const Table& orig, std::size_t n, std::uint64_t seed, std::string* warning) {
  orig.validate();
  if (orig.rows() == 0) throw Error("cannot synthesize from an empty table");
  if (n < 1) throw Error("number of synthetic rows must be >= 1");
  const auto rows = static_cast<Eigen::Index>(orig.rows());
  const auto cols = static_cast<Eigen::Index>(orig.columns.size());
  const Eigen::MatrixXd enc = encode_tables({&orig}).front();

  // marginals: sorted values per column (categoricals as category ranks)
  std::vector<std::vector<double>> sorted(static_cast<std::size_t>(cols));
  std::vector<std::vector<std::string>> categories(static_cast<std::size_t>(cols));
  for (Eigen::Index c = 0; c < cols; ++c) {
    auto& s = sorted[static_cast<std::size_t>(c)];
    s.assign(enc.col(c).data(), enc.col(c).data() + rows);
    std::sort(s.begin(), s.end());
    const auto& col = orig.columns[static_cast<std::size_t>(c)];
    if (col.kind == ColumnKind::categorical) {
      std::set<std::string> all(col.categorical.begin(), col.categorical.end());
      categories[static_cast<std::size_t>(c)].assign(all.begin(), all.end());
    }
  }

  // correlation of normal scores (mid-ranks mapped through the probit)
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(cols, cols);
  if (rows >= 2) {
    Eigen::MatrixXd scores(rows, cols);
    std::vector<bool> constant(static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& s = sorted[static_cast<std::size_t>(c)];
      constant[static_cast<std::size_t>(c)] = s.front() == s.back();
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double v = enc(r, c);
        const auto lo = std::lower_bound(s.begin(), s.end(), v) - s.begin();
        const auto hi = std::upper_bound(s.begin(), s.end(), v) - s.begin();
        const double mid_rank = (static_cast<double>(lo + hi) + 1.0) / 2.0;
        scores(r, c) = normal_quantile(mid_rank / static_cast<double>(rows + 1));
      }
    }
    for (Eigen::Index i = 0; i < cols; ++i)
      for (Eigen::Index j = i + 1; j < cols; ++j)
        if (!constant[static_cast<std::size_t>(i)] && !constant[static_cast<std::size_t>(j)])
          corr(i, j) = corr(j, i) = pearson(scores.col(i), scores.col(j));
  } else if (warning) {
    *warning = "single-row input: copula undefined, sampling marginals independently";
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd factor = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Table out;
  for (const auto& c : orig.columns) out.columns.push_back({c.name, c.kind, {}, {}});
  Eigen::VectorXd eps(cols);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) eps[c] = normal(rng);
    const Eigen::VectorXd z = factor * eps;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double u = std::clamp(normal_cdf(z[c]), 0.0, 1.0);
      const auto& s = sorted[static_cast<std::size_t>(c)];
      auto& col = out.columns[static_cast<std::size_t>(c)];
      if (col.kind == ColumnKind::numeric) {
        const double h = u * static_cast<double>(s.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(h), s.size() - 1);
        const auto j = std::min(i + 1, s.size() - 1);
        col.numeric.push_back(s[i] + (h - static_cast<double>(i)) * (s[j] - s[i]));
      } else {
        // category whose cumulative frequency first reaches u
        auto idx = static_cast<std::size_t>(std::ceil(u * static_cast<double>(s.size())));
        idx = std::clamp<std::size_t>(idx, 1, s.size()) - 1;
        col.categorical.push_back(categories[static_cast<std::size_t>(c)][static_cast<std::size_t>(s[idx])]);
      }
    }
  }
  return out;
}

}  // namespace mstool
