#include "mstool/config.hpp"

#include "mstool/error.hpp"
#include "mstool/eeg_io.hpp"
#include "mstool/microstate.hpp"
#include "mstool/text.hpp"

#include <set>

namespace mstool {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  if (!obj.is_object()) throw Error("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.contains(key)) throw Error("config: unknown key '" + where + "." + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

template <typename T>
void read_opt(const json& obj, const char* key, std::optional<T>& dst) {
  if (obj.contains(key) && !obj.at(key).is_null()) dst = obj.at(key).get<T>();
}

template <typename T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void PipelineConfig::validate() const {
  const auto& f = preprocess.filter;
  if (f.order < 1) throw Error("config: preprocess.order must be >= 1");
  if (!(f.low_hz > 0.0 && f.high_hz > f.low_hz)) throw Error("config: preprocess needs 0 < low_hz < high_hz");
  (void)Reference::parse(preprocess.reference);
  (void)state_letters(segment.k);
  if (segment.n_init < 1 || segment.max_iter < 1) throw Error("config: segment.n_init and max_iter must be >= 1");
  if (!(segment.tol >= 0.0)) throw Error("config: segment.tol must be >= 0");
  if (!(segment.min_peak_distance_ms >= 0.0)) throw Error("config: segment.min_peak_distance_ms must be >= 0");
  if (!(backfit.min_duration_ms >= 0.0)) throw Error("config: backfit.min_duration_ms must be >= 0");
  if (!(prompts.train_fraction > 0.0 && prompts.train_fraction < 1.0))
    throw Error("config: prompts.train_fraction must lie strictly between 0 and 1");
  synth.quality.validate();
  if (synth.n < 1) throw Error("config: synth.n must be >= 1");
  (void)parse_condition(eval.positive_class);
  if (!(plot.duration_s > 0.0) || plot.start_s < 0.0) throw Error("config: plot window must have start >= 0, duration > 0");
  if (!(plot.min_peak_distance_ms >= 0.0)) throw Error("config: plot.min_peak_distance_ms must be >= 0");
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j, "<root>", {"preprocess", "segment", "backfit", "prompts", "synth", "eval", "plot"});
    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      reject_unknown(p, "preprocess", {"low_hz", "high_hz", "order", "reference"});
      read(p, "low_hz", c.preprocess.filter.low_hz);
      read(p, "high_hz", c.preprocess.filter.high_hz);
      read(p, "order", c.preprocess.filter.order);
      read(p, "reference", c.preprocess.reference);
    }
    if (j.contains("segment")) {
      const auto& s = j["segment"];
      reject_unknown(s, "segment", {"k", "n_init", "max_iter", "tol", "seed", "min_peak_distance_ms", "use_full_signal"});
      read(s, "k", c.segment.k);
      read(s, "n_init", c.segment.n_init);
      read(s, "max_iter", c.segment.max_iter);
      read(s, "tol", c.segment.tol);
      read_opt(s, "seed", c.segment.seed);
      read(s, "min_peak_distance_ms", c.segment.min_peak_distance_ms);
      read(s, "use_full_signal", c.segment.use_full_signal);
    }
    if (j.contains("backfit")) {
      const auto& b = j["backfit"];
      reject_unknown(b, "backfit", {"min_duration_ms"});
      read(b, "min_duration_ms", c.backfit.min_duration_ms);
    }
    if (j.contains("prompts")) {
      const auto& p = j["prompts"];
      reject_unknown(p, "prompts", {"train_fraction", "seed", "stratify"});
      read(p, "train_fraction", c.prompts.train_fraction);
      read_opt(p, "seed", c.prompts.seed);
      read(p, "stratify", c.prompts.stratify);
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      reject_unknown(s, "synth", {"bins", "weights", "variance_threshold", "n", "seed"});
      read(s, "bins", c.synth.quality.bins);
      read(s, "weights", c.synth.quality.weights);
      read(s, "variance_threshold", c.synth.quality.variance_threshold);
      read(s, "n", c.synth.n);
      read_opt(s, "seed", c.synth.seed);
    }
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      reject_unknown(e, "eval", {"positive_class"});
      read(e, "positive_class", c.eval.positive_class);
    }
    if (j.contains("plot")) {
      const auto& p = j["plot"];
      reject_unknown(p, "plot", {"start_s", "duration_s", "min_peak_distance_ms"});
      read(p, "start_s", c.plot.start_s);
      read(p, "duration_s", c.plot.duration_s);
      read(p, "min_peak_distance_ms", c.plot.min_peak_distance_ms);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["preprocess"] = {{"low_hz", c.preprocess.filter.low_hz},
                     {"high_hz", c.preprocess.filter.high_hz},
                     {"order", c.preprocess.filter.order},
                     {"reference", c.preprocess.reference}};
  j["segment"] = {{"k", c.segment.k},
                  {"n_init", c.segment.n_init},
                  {"max_iter", c.segment.max_iter},
                  {"tol", c.segment.tol},
                  {"seed", opt(c.segment.seed)},
                  {"min_peak_distance_ms", c.segment.min_peak_distance_ms},
                  {"use_full_signal", c.segment.use_full_signal}};
  j["backfit"] = {{"min_duration_ms", c.backfit.min_duration_ms}};
  j["prompts"] = {{"train_fraction", c.prompts.train_fraction}, {"seed", opt(c.prompts.seed)}, {"stratify", c.prompts.stratify}};
  j["synth"] = {{"bins", c.synth.quality.bins},
                {"weights", c.synth.quality.weights},
                {"variance_threshold", c.synth.quality.variance_threshold},
                {"n", c.synth.n},
                {"seed", opt(c.synth.seed)}};
  j["eval"] = {{"positive_class", c.eval.positive_class}};
  j["plot"] = {{"start_s", c.plot.start_s}, {"duration_s", c.plot.duration_s}, {"min_peak_distance_ms", c.plot.min_peak_distance_ms}};
  return j;
}

}  // namespace mstool
