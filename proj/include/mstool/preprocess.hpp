#pragma once

#include "mstool/eeg_io.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace mstool {

struct Reference {
  enum class Kind { channel, common_average };
  Kind kind = Kind::common_average;
  std::string label;  // only for Kind::channel

  static Reference channel(std::string label) { return {Kind::channel, std::move(label)}; }
  static Reference common_average() { return {Kind::common_average, {}}; }
  // "avg" -> common average, "fz" -> channel Fz, anything else -> that label.
  static Reference parse(const std::string& s);
  std::string describe() const;
};

EegRecording rereference(const EegRecording& rec, const Reference& ref);

struct FilterSpec {
  double low_hz = 1.0;
  double high_hz = 40.0;
  int order = 4;  // Butterworth prototype order; the bandpass has 2*order poles

  // 0 < low < high < fs/2, order >= 1.
  void validate(double sampling_rate_hz) const;
};

// One second-order section in direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

// Digital Butterworth bandpass (bilinear transform with prewarped edges) as
// `order` cascaded sections, unit gain at the geometric centre frequency.
std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec, double sampling_rate_hz);

std::complex<double> frequency_response(std::span<const Biquad> sos, double freq_hz, double sampling_rate_hz);

// Single causal pass over x, starting from zero state.
std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x);

// Zero-phase forward-backward filtering. The signal is extended by odd
// reflection of `pad` samples at each end and each pass starts from the
// steady-state response to the first sample. Requires x.size() > pad.
std::vector<double> filtfilt(std::span<const Biquad> sos, std::span<const double> x, std::size_t pad);

// Shortest recording bandpass() accepts is padding_length(order) + 1 samples.
constexpr std::size_t padding_length(int order) { return 3 * static_cast<std::size_t>(order); }

EegRecording bandpass(const EegRecording& rec, const FilterSpec& spec, int jobs = 1);

}  // namespace mstool
