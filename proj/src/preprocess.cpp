#include "mstool/preprocess.hpp"

#include "mstool/error.hpp"
#include "mstool/parallel.hpp"
#include "mstool/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mstool {

using cplx = std::complex<double>;

Reference Reference::parse(const std::string& s) {
  const auto v = trim(s);
  if (v.empty()) throw Error("empty reference");
  const auto lower = to_lower(v);
  if (lower == "avg" || lower == "average" || lower == "common_average") return common_average();
  if (lower == "fz") return channel("Fz");
  return channel(v);
}

std::string Reference::describe() const { return kind == Kind::common_average ? "common_average" : "channel:" + label; }

EegRecording rereference(const EegRecording& rec, const Reference& ref) {
  EegRecording out = rec;
  if (ref.kind == Reference::Kind::common_average) {
    const Eigen::RowVectorXd mean = rec.data.colwise().mean();
    out.data.rowwise() -= mean;
    return out;
  }
  const auto idx = rec.channel_index(ref.label);
  if (idx < 0) throw Error("unknown reference channel '" + ref.label + "'");
  const Eigen::RowVectorXd reference = rec.data.row(idx);
  out.data.rowwise() -= reference;
  return out;
}

void FilterSpec::validate(double fs) const {
  if (order < 1) throw Error("filter order must be >= 1");
  if (!(low_hz > 0.0)) throw Error("low cutoff must be positive");
  if (!(high_hz > low_hz)) throw Error("high cutoff must exceed low cutoff");
  if (!(high_hz < fs / 2.0))
    throw Error("high cutoff " + format_roundtrip(high_hz) + " Hz must be below Nyquist (" + format_roundtrip(fs / 2.0) +
                " Hz)");
}

std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec, double fs) {
  spec.validate(fs);
  const int n = spec.order;
  const double k2fs = 2.0 * fs;
  const double w_lo = k2fs * std::tan(std::numbers::pi * spec.low_hz / fs);
  const double w_hi = k2fs * std::tan(std::numbers::pi * spec.high_hz / fs);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  // Analog prototype poles on the left half of the unit circle, each mapped to
  // two bandpass poles, then to z through the bilinear transform.
  std::vector<cplx> complex_poles;
  std::vector<double> real_poles;
  for (int k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n);
    const cplx proto = std::polar(1.0, theta);
    const cplx half = proto * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0_sq);
    for (const cplx s : {half + root, half - root}) {
      const cplx z = (k2fs + s) / (k2fs - s);
      if (std::abs(z.imag()) <= 1e-12 * std::abs(z))
        real_poles.push_back(z.real());
      else if (z.imag() > 0)
        complex_poles.push_back(z);
    }
  }
  std::sort(real_poles.begin(), real_poles.end());
  if (real_poles.size() % 2 != 0 || complex_poles.size() + real_poles.size() / 2 != static_cast<std::size_t>(n))
    throw Error("internal error: unexpected pole layout in Butterworth design");

  // Every section gets one zero at z = +1 and one at z = -1.
  std::vector<Biquad> sos;
  for (const cplx p : complex_poles) sos.push_back({1.0, 0.0, -1.0, -2.0 * p.real(), std::norm(p)});
  for (std::size_t i = 0; i < real_poles.size(); i += 2)
    sos.push_back({1.0, 0.0, -1.0, -(real_poles[i] + real_poles[i + 1]), real_poles[i] * real_poles[i + 1]});

  const double f0 = std::atan(std::sqrt(w0_sq) / k2fs) * fs / std::numbers::pi;
  const double gain = std::abs(frequency_response(sos, f0, fs));
  const double per_section = std::pow(gain, -1.0 / n);
  for (auto& s : sos) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return sos;
}

cplx frequency_response(std::span<const Biquad> sos, double freq_hz, double fs) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  const cplx zinv2 = zinv * zinv;
  cplx h = 1.0;
  for (const auto& s : sos) h *= (s.b0 + s.b1 * zinv + s.b2 * zinv2) / (1.0 + s.a1 * zinv + s.a2 * zinv2);
  return h;
}

namespace {

struct SectionState {
  double z1 = 0, z2 = 0;
};

// Steady-state DF2T states for a unit step entering the cascade.
std::vector<SectionState> step_steady_state(std::span<const Biquad> sos) {
  std::vector<SectionState> zi(sos.size());
  double input_level = 1.0;
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const auto& s = sos[i];
    const double h_dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y = h_dc * input_level;
    zi[i].z2 = s.b2 * input_level - s.a2 * y;
    zi[i].z1 = y - s.b0 * input_level;
    input_level = y;
  }
  return zi;
}

void run_cascade(std::span<const Biquad> sos, std::vector<SectionState> state, std::vector<double>& x) {
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const auto& s = sos[i];
    double z1 = state[i].z1, z2 = state[i].z2;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

std::vector<SectionState> scaled(const std::vector<SectionState>& zi, double level) {
  auto out = zi;
  for (auto& z : out) {
    z.z1 *= level;
    z.z2 *= level;
  }
  return out;
}

}  // namespace

std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_cascade(sos, std::vector<SectionState>(sos.size()), y);
  return y;
}

std::vector<double> filtfilt(std::span<const Biquad> sos, std::span<const double> x, std::size_t pad) {
  const std::size_t n = x.size();
  if (n <= pad)
    throw Error("signal of " + std::to_string(n) + " samples is too short for filtering (needs more than " +
                std::to_string(pad) + ")");
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = step_steady_state(sos);
  run_cascade(sos, scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sos, scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

EegRecording bandpass(const EegRecording& rec, const FilterSpec& spec, int jobs) {
  spec.validate(rec.sampling_rate_hz);
  const std::size_t pad = padding_length(spec.order);
  if (static_cast<std::size_t>(rec.samples()) <= pad)
    throw Error("recording has " + std::to_string(rec.samples()) + " samples; bandpass of order " +
                std::to_string(spec.order) + " needs more than " + std::to_string(pad));
  const auto sos = design_butterworth_bandpass(spec, rec.sampling_rate_hz);
  EegRecording out = rec;
  parallel_for(static_cast<std::size_t>(rec.channels()), jobs, [&](std::size_t c) {
    const Eigen::VectorXd row = rec.data.row(static_cast<Eigen::Index>(c));
    const auto y = filtfilt(sos, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), pad);
    out.data.row(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  });
  return out;
}

}  // namespace mstool
