#include "mstool/evalmetrics.hpp"

#include "mstool/error.hpp"
#include "mstool/promptgen.hpp"
#include "mstool/text.hpp"

#include <fstream>

namespace mstool {

ConfusionCounts confusion(const std::vector<Condition>& predictions, const std::vector<Condition>& truth,
                          Condition positive) {
  if (predictions.size() != truth.size())
    throw Error("prediction count " + std::to_string(predictions.size()) + " does not match truth count " +
                std::to_string(truth.size()));
  if (truth.empty()) throw Error("no predictions to evaluate");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred_pos = predictions[i] == positive;
    const bool true_pos = truth[i] == positive;
    if (pred_pos && true_pos)
      ++c.tp;
    else if (pred_pos)
      ++c.fp;
    else if (true_pos)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

namespace {

std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error("confusion counts are all zero");
  MetricsReport r;
  r.accuracy = percent(c.tp + c.tn, c.total());
  r.mrate = 100.0 - *r.accuracy;
  r.tpr = percent(c.tp, c.tp + c.fn);
  r.fpr = percent(c.fp, c.fp + c.tn);
  if (r.fpr) r.tnr = 100.0 - *r.fpr;
  r.recall = r.tpr;
  r.precision = percent(c.tp, c.tp + c.fp);
  if (r.precision && r.recall) {
    const double p = *r.precision, q = *r.recall;
    r.fscore = p + q > 0.0 ? std::optional<double>(2.0 * p * q / (p + q)) : std::nullopt;
  }
  return r;
}

namespace {

std::vector<std::pair<const char*, std::optional<double>>> fields(const MetricsReport& r) {
  return {{"accuracy", r.accuracy}, {"mrate", r.mrate},   {"tpr", r.tpr},         {"fpr", r.fpr},
          {"tnr", r.tnr},           {"recall", r.recall}, {"precision", r.precision}, {"fscore", r.fscore}};
}

nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); }

}  // namespace

std::vector<MetricDelta> compare_reports(const MetricsReport& before, const MetricsReport& after) {
  const auto b = fields(before);
  const auto a = fields(after);
  std::vector<MetricDelta> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    MetricDelta d{b[i].first, b[i].second, a[i].second, std::nullopt, std::nullopt};
    if (d.before && d.after) {
      d.difference = *d.after - *d.before;
      if (*d.before != 0.0) d.ratio = *d.after / *d.before;
    }
    out.push_back(d);
  }
  return out;
}

nlohmann::ordered_json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"total", c.total()}};
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, v] : fields(r)) j[name] = opt(v);
  return j;
}

nlohmann::ordered_json to_json(const std::vector<MetricDelta>& deltas) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& d : deltas)
    j[d.name] = {{"before", opt(d.before)}, {"after", opt(d.after)}, {"difference", opt(d.difference)}, {"ratio", opt(d.ratio)}};
  return j;
}

Condition parse_prediction_label(const std::string& s) {
  const auto t = trim(s);
  if (t == kRestAnswer) return Condition::Rest;
  if (t == kLoadAnswer) return Condition::Load;
  const auto lower = to_lower(t);
  if (lower == "rest") return Condition::Rest;
  if (lower == "load") return Condition::Load;
  throw Error("unknown class label '" + s + "' (expected Rest or Load)");
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 'subject_id,label'");
    const auto id = trim(line.substr(0, comma));
    const auto label = line.substr(comma + 1);
    if (line_no == 1 && id == "subject_id") continue;
    try {
      out.push_back({id, parse_prediction_label(label)});
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mstool
