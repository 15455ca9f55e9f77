#include "mstool/pipeline_io.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"

#include <cstdio>
#include <fstream>

namespace mstool {

nlohmann::ordered_json to_json(const MicrostateModel& model) {
  nlohmann::ordered_json j;
  j["k"] = model.k();
  j["labels"] = model.labels;
  j["channel_labels"] = model.channel_labels;
  j["gev_total"] = model.gev_total;
  j["fit_seed"] = model.fit_seed;
  j["n_init"] = model.n_init;
  j["converged_iterations"] = model.converged_iterations;
  auto& maps = j["maps"];
  maps = nlohmann::ordered_json::array();
  for (const auto& m : model.maps) maps.push_back(std::vector<double>(m.weights().data(), m.weights().data() + m.size()));
  return j;
}

MicrostateModel model_from_json(const nlohmann::json& j) {
  MicrostateModel m;
  try {
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.channel_labels = j.value("channel_labels", std::vector<std::string>{});
    m.gev_total = j.at("gev_total").get<double>();
    m.fit_seed = j.value("fit_seed", std::uint64_t{0});
    m.n_init = j.value("n_init", 0);
    m.converged_iterations = j.value("converged_iterations", 0);
    for (const auto& w : j.at("maps")) {
      const auto v = w.get<std::vector<double>>();
      m.maps.push_back(TopographicMap::from_unit(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
    }
    m.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
  return m;
}

MicrostateModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string labels_csv(const LabelSequence& seq, const MicrostateModel& model) {
  std::string out = "sample_index,label_letter,abs_corr\n";
  for (std::size_t t = 0; t < seq.size(); ++t)
    out += std::to_string(t) + ',' + model.labels[static_cast<std::size_t>(seq.labels[t])] + ',' + format_roundtrip(seq.corr[t]) + '\n';
  return out;
}

LabelSequence load_labels_csv(const std::filesystem::path& path, const MicrostateModel& model, double sampling_rate_hz) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  LabelSequence seq;
  seq.sampling_rate_hz = sampling_rate_hz;
  std::string line;
  std::getline(in, line);
  strip_cr(line);
  if (trim(line) != "sample_index,label_letter,abs_corr")
    throw ParseError(path.string() + ": expected header sample_index,label_letter,abs_corr");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    long long index = 0;
    double corr = 0.0;
    if (cells.size() != 3 || !parse_int(cells[0], index) || !parse_double(cells[2], corr) ||
        index != static_cast<long long>(seq.size()))
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed label row");
    const auto letter = trim(cells[1]);
    int state = -1;
    for (std::size_t s = 0; s < model.labels.size(); ++s)
      if (model.labels[s] == letter) state = static_cast<int>(s);
    if (state < 0) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown state '" + letter + "'");
    seq.labels.push_back(state);
    seq.corr.push_back(corr);
  }
  seq.validate(model.k());
  return seq;
}

nlohmann::ordered_json to_json(const GevReport& report, const MicrostateModel& model) {
  nlohmann::ordered_json j;
  auto& per = j["per_state"];
  per = nlohmann::ordered_json::object();
  for (std::size_t s = 0; s < report.per_state.size(); ++s) per[model.labels[s]] = report.per_state[s];
  j["total"] = report.total;
  return j;
}

std::string file_checksum(const std::filesystem::path& path) {
  const auto bytes = read_text_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mstool
