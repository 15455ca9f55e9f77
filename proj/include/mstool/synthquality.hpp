#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mstool {

enum class ColumnKind { numeric, categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<double> numeric;          // when kind == numeric
  std::vector<std::string> categorical;  // when kind == categorical

  std::size_t size() const { return kind == ColumnKind::numeric ? numeric.size() : categorical.size(); }
};

// Column-major table; every column has the same row count.
struct Table {
  std::vector<Column> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  void validate() const;
  bool same_schema(const Table& other) const;
};

// CSV whose header cells are `name:numeric` or `name:categorical`.
Table read_table_csv(const std::filesystem::path& path);
std::string table_csv(const Table& t);

// Square root of the base-2 Jensen-Shannon divergence between the two
// empirical distributions. Numeric columns are histogrammed into `bins`
// equal-width bins over their combined range.
double js_distance(const Column& a, const Column& b, int bins = 20);

// Probability vectors must have equal length and each sum to 1.
double js_distance(const std::vector<double>& p, const std::vector<double>& q);

double field_distribution_stability(const Table& orig, const Table& synth, int bins = 20);

struct CorrelationStability {
  double score = 0.0;  // percent
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;  // a column was constant in either table
};
CorrelationStability field_correlation_stability(const Table& orig, const Table& synth);

struct StructureStability {
  double score = 0.0;  // percent
  std::size_t components = 0;
  std::size_t dropped_columns = 0;  // zero variance in the original table
};
StructureStability deep_structure_stability(const Table& orig, const Table& synth, double variance_threshold = 0.95,
                                            int bins = 20);

// Weighted mean; weights must be non-negative and sum to 1.
double composite_score(const std::array<double, 3>& components, const std::array<double, 3>& weights);

struct QualityOptions {
  int bins = 20;
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double variance_threshold = 0.95;

  void validate() const;
};

struct QualityReport {
  double field_distribution_stability = 0.0;
  double field_correlation_stability = 0.0;
  double deep_structure_stability = 0.0;
  double composite = 0.0;
  std::array<double, 3> weights{};
  std::size_t correlation_pairs_skipped = 0;
  std::size_t principal_components = 0;
};

QualityReport score_quality(const Table& orig, const Table& synth, const QualityOptions& opts = {});
nlohmann::ordered_json to_json(const QualityReport& r);

// Gaussian-copula sampler: empirical marginals joined through the
// correlation of normal scores. A single-row table falls back to independent
// marginals and sets *warning.
Table baseline_synthesize(const Table& orig, std::size_t n, std::uint64_t seed, std::string* warning = nullptr);

// Numeric-compatible encoding: categoricals become the rank of their value in
// the sorted union of categories from every table passed. rows x columns.
std::vector<Eigen::MatrixXd> encode_tables(const std::vector<const Table*>& tables);

}  // namespace mstool
