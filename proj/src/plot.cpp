#include "mstool/plot.hpp"

#include "mstool/error.hpp"

#include <cmath>
#include <cstdio>

namespace mstool {

namespace {

constexpr double kWidth = 1000.0;
constexpr double kHeight = 300.0;
constexpr double kMargin = 40.0;
const char* const kStateColours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Frame {
  Eigen::Index first, count;
  double vmax;

  double x(Eigen::Index t) const {
    const double span = count > 1 ? static_cast<double>(count - 1) : 1.0;
    return kMargin + static_cast<double>(t - first) * (kWidth - 2 * kMargin) / span;
  }
  double y(double v) const { return kHeight - kMargin - v / vmax * (kHeight - 2 * kMargin); }
};

Frame make_frame(const GfpSeries& series, const PlotWindow& window) {
  const auto [first, count] = window_samples(series, window);
  double vmax = series.values.segment(first, count).maxCoeff();
  if (!(vmax > 0.0)) vmax = 1.0;
  return {first, count, vmax};
}

std::string header(const std::string& title, const Frame& f, double fs) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kMargin) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" + num(kWidth - kMargin) + "\" y2=\"" +
       num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kHeight - 12) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
       num(static_cast<double>(f.first) / fs) + " s</text>\n";
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kHeight - 12) +
       "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
       num(static_cast<double>(f.first + f.count - 1) / fs) + " s</text>\n";
  return s;
}

std::string trace(const GfpSeries& series, const Frame& f) {
  std::string s = "<polyline class=\"gfp\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
  for (Eigen::Index t = f.first; t < f.first + f.count; ++t) {
    if (t != f.first) s += ' ';
    s += num(f.x(t)) + ',' + num(f.y(series.values[t]));
  }
  return s + "\"/>\n";
}

}  // namespace

std::pair<Eigen::Index, Eigen::Index> window_samples(const GfpSeries& series, const PlotWindow& window) {
  const double fs = series.sampling_rate_hz;
  if (!(window.duration_s > 0.0) || window.start_s < 0.0) throw Error("plot window must have start >= 0 and positive duration");
  const auto first = static_cast<Eigen::Index>(std::llround(window.start_s * fs));
  const auto count = static_cast<Eigen::Index>(std::llround(window.duration_s * fs));
  if (count < 1 || first + count > series.values.size())
    throw Error("plot window [" + num(window.start_s) + " s, " + num(window.start_s + window.duration_s) +
                " s) lies outside the recording");
  return {first, count};
}

std::string gfp_svg(const GfpSeries& series, const std::vector<Eigen::Index>& peaks, const PlotWindow& window) {
  const Frame f = make_frame(series, window);
  std::string s = header("Global field power", f, series.sampling_rate_hz);
  s += trace(series, f);
  for (const auto p : peaks)
    if (p >= f.first && p < f.first + f.count)
      s += "<circle class=\"peak\" cx=\"" + num(f.x(p)) + "\" cy=\"" + num(f.y(series.values[p])) +
           "\" r=\"3\" fill=\"red\"/>\n";
  return s + "</svg>\n";
}

std::string segmentation_svg(const GfpSeries& series, const LabelSequence& seq, const std::vector<std::string>& state_labels,
                             const PlotWindow& window) {
  if (static_cast<Eigen::Index>(seq.size()) != series.values.size()) throw Error("label sequence length differs from the GFP series");
  const Frame f = make_frame(series, window);
  std::string s = header("Microstate segmentation", f, series.sampling_rate_hz);
  const double base = f.y(0.0);
  Eigen::Index t = f.first;
  const Eigen::Index end = f.first + f.count;
  while (t < end) {
    const int state = seq.labels[static_cast<std::size_t>(t)];
    Eigen::Index u = t;
    while (u < end && seq.labels[static_cast<std::size_t>(u)] == state) ++u;
    // the fill reaches the next run's first sample so adjacent runs touch
    const Eigen::Index last = std::min(u, end - 1);
    const char* colour = state >= 0 && state < 4 ? kStateColours[state] : "#7f7f7f";
    s += "<polygon class=\"state\" fill=\"" + std::string(colour) + "\" stroke=\"none\" points=\"" + num(f.x(t)) + ',' + num(base);
    for (Eigen::Index i = t; i <= last; ++i) s += ' ' + num(f.x(i)) + ',' + num(f.y(series.values[i]));
    s += ' ' + num(f.x(last)) + ',' + num(base) + "\"/>\n";
    t = u;
  }
  s += trace(series, f);
  for (std::size_t i = 0; i < state_labels.size() && i < 4; ++i)
    s += "<text x=\"" + num(kWidth - kMargin - 120 + 30 * static_cast<double>(i)) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" +
         kStateColours[i] + "\">" + state_labels[i] + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace mstool
