#include "mstool/eeg_io.hpp"

#include "mstool/error.hpp"
#include "mstool/text.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mstool {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kRawMagic[4] = {'E', 'E', 'G', 'R'};

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  v = byteswap_if_big(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw ParseError(path.string() + ": truncated raw_f64 file");
  return byteswap_if_big(v);
}

struct Sidecar {
  SubjectMeta meta;
  double sampling_rate_hz = 0.0;
  std::vector<std::string> channel_labels;  // optional for csv
};

Sidecar read_sidecar(const fs::path& data_path) {
  const auto path = sidecar_path(data_path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metadata sidecar " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  Sidecar s;
  try {
    s.meta.subject_id = j.at("subject_id").get<std::string>();
    s.meta.age = j.at("age").get<int>();
    s.meta.gender = parse_gender(j.at("gender").get<std::string>());
    s.meta.arithmetic_score = j.at("arithmetic_score").get<int>();
    s.meta.condition = parse_condition(j.at("condition").get<std::string>());
    s.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    if (j.contains("channel_labels")) s.channel_labels = j.at("channel_labels").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return s;
}

void write_sidecar(const EegRecording& rec, const fs::path& data_path) {
  json j = json::object();
  j["subject_id"] = rec.meta.subject_id;
  j["age"] = rec.meta.age;
  j["gender"] = to_string(rec.meta.gender);
  j["arithmetic_score"] = rec.meta.arithmetic_score;
  j["condition"] = to_string(rec.meta.condition);
  j["sampling_rate_hz"] = rec.sampling_rate_hz;
  j["channel_labels"] = rec.channel_labels;
  const auto path = sidecar_path(data_path);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

EegRecording load_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, expected a header row");
  strip_cr(line);
  EegRecording rec;
  rec.channel_labels = split(line, ',');
  for (std::size_t c = 0; c < rec.channel_labels.size(); ++c) {
    rec.channel_labels[c] = trim(rec.channel_labels[c]);
    if (rec.channel_labels[c].empty())
      throw ParseError(path.string() + ": malformed header, empty label in column " + std::to_string(c + 1));
  }
  const std::size_t n_channels = rec.channel_labels.size();

  std::vector<double> values;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != n_channels)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " values, header has " + std::to_string(n_channels) + " channels");
    for (std::size_t c = 0; c < n_channels; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v))
        throw ParseError(path.string() + ": cannot parse value at row " + std::to_string(row + 1) + ", column " +
                         std::to_string(c + 1) + " ('" + cells[c] + "')");
      if (!std::isfinite(v))
        throw ParseError(path.string() + ": non-finite value at row " + std::to_string(row + 1) + ", column " +
                         std::to_string(c + 1) + " (" + rec.channel_labels[c] + ")");
      values.push_back(v);
    }
    ++row;
  }
  // values are sample-major on disk
  rec.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                 values.data(), static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(n_channels))
                 .transpose();
  return rec;
}

EegRecording load_raw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kRawMagic, 4) != 0)
    throw ParseError(path.string() + ": bad magic, expected EEGR");
  const auto n_channels = read_le<std::uint32_t>(in, path);
  const auto n_samples = read_le<std::uint64_t>(in, path);
  EegRecording rec;
  rec.data.resize(n_channels, static_cast<Eigen::Index>(n_samples));
  for (std::uint32_t c = 0; c < n_channels; ++c)
    for (std::uint64_t t = 0; t < n_samples; ++t) {
      const auto bits = read_le<std::uint64_t>(in, path);
      rec.data(c, static_cast<Eigen::Index>(t)) = std::bit_cast<double>(bits);
    }
  return rec;
}

}  // namespace

std::string to_string(Gender g) { return g == Gender::male ? "male" : "female"; }
std::string to_string(Condition c) { return c == Condition::Rest ? "Rest" : "Load"; }

Gender parse_gender(const std::string& s) {
  const auto v = to_lower(trim(s));
  if (v == "male") return Gender::male;
  if (v == "female") return Gender::female;
  throw Error("unknown gender '" + s + "' (expected male or female)");
}

Condition parse_condition(const std::string& s) {
  const auto v = to_lower(trim(s));
  if (v == "rest") return Condition::Rest;
  if (v == "load") return Condition::Load;
  throw Error("unknown condition '" + s + "' (expected Rest or Load)");
}

void SubjectMeta::validate() const {
  if (subject_id.empty()) throw Error("subject_id must be non-empty");
  if (age <= 0) throw Error("age must be positive, got " + std::to_string(age));
  if (arithmetic_score < 0) throw Error("arithmetic_score must be >= 0, got " + std::to_string(arithmetic_score));
}

Eigen::Index EegRecording::channel_index(const std::string& label) const {
  for (std::size_t i = 0; i < channel_labels.size(); ++i)
    if (channel_labels[i] == label) return static_cast<Eigen::Index>(i);
  return -1;
}

void EegRecording::validate() const {
  if (static_cast<Eigen::Index>(channel_labels.size()) != data.rows())
    throw Error("channel label count " + std::to_string(channel_labels.size()) + " does not match " +
                std::to_string(data.rows()) + " data rows");
  if (data.rows() < 2) throw Error("a recording needs at least 2 channels");
  if (data.cols() < 2) throw Error("a recording needs at least 2 samples");
  if (!(sampling_rate_hz > 0.0) || !std::isfinite(sampling_rate_hz))
    throw Error("sampling_rate_hz must be positive");
  for (Eigen::Index t = 0; t < data.cols(); ++t)
    for (Eigen::Index c = 0; c < data.rows(); ++c)
      if (!std::isfinite(data(c, t)))
        throw Error("non-finite value at channel " + std::to_string(c + 1) + " (" + channel_labels[c] +
                    "), sample " + std::to_string(t + 1));
  meta.validate();
}

RecordingFormat parse_format(const std::string& s) {
  if (s == "csv") return RecordingFormat::csv;
  if (s == "raw_f64" || s == "raw") return RecordingFormat::raw_f64;
  throw Error("unknown recording format '" + s + "' (expected csv or raw_f64)");
}

RecordingFormat format_from_extension(const fs::path& path) {
  return to_lower(path.extension().string()) == ".csv" ? RecordingFormat::csv : RecordingFormat::raw_f64;
}

fs::path sidecar_path(const fs::path& data_path) {
  auto p = data_path;
  p.replace_extension(".meta.json");
  return p;
}

EegRecording load_recording(const fs::path& path, RecordingFormat format) {
  if (path.empty()) throw IoError("empty recording path");
  EegRecording rec = format == RecordingFormat::csv ? load_csv(path) : load_raw(path);
  const Sidecar side = read_sidecar(path);
  rec.meta = side.meta;
  rec.sampling_rate_hz = side.sampling_rate_hz;
  if (format == RecordingFormat::raw_f64) {
    if (side.channel_labels.empty())
      throw ParseError(sidecar_path(path).string() + ": raw_f64 recordings need channel_labels in the sidecar");
    rec.channel_labels = side.channel_labels;
  } else if (!side.channel_labels.empty() && side.channel_labels != rec.channel_labels) {
    throw ParseError(path.string() + ": CSV header labels disagree with the sidecar's channel_labels");
  }
  rec.validate();
  return rec;
}

EegRecording load_recording(const fs::path& path) { return load_recording(path, format_from_extension(path)); }

void save_recording(const EegRecording& rec, const fs::path& path, RecordingFormat format) {
  if (path.empty()) throw IoError("empty output path");
  rec.validate();
  if (format == RecordingFormat::csv) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << join(rec.channel_labels, ",") << '\n';
    std::string row;
    for (Eigen::Index t = 0; t < rec.samples(); ++t) {
      row.clear();
      for (Eigen::Index c = 0; c < rec.channels(); ++c) {
        if (c) row += ',';
        row += format_roundtrip(rec.data(c, t));
      }
      out << row << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kRawMagic, 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rec.channels()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(rec.samples()));
    for (Eigen::Index c = 0; c < rec.channels(); ++c)
      for (Eigen::Index t = 0; t < rec.samples(); ++t) write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(rec.data(c, t)));
    if (!out) throw IoError("write failed for " + path.string());
  }
  write_sidecar(rec, path);
}

}  // namespace mstool
