#pragma once

#include "mstool/backfit.hpp"
#include "mstool/microstate.hpp"

#include <string>
#include <vector>

namespace mstool {

struct PlotWindow {
  double start_s = 0.0;
  double duration_s = 1.0;
};

// Sample range [first, first + count) covered by the window; throws if the
// window leaves the series.
std::pair<Eigen::Index, Eigen::Index> window_samples(const GfpSeries& series, const PlotWindow& window);

// GFP trace as a polyline with one point per sample, plus a circle per peak
// inside the window.
std::string gfp_svg(const GfpSeries& series, const std::vector<Eigen::Index>& peaks, const PlotWindow& window);

// GFP trace with the area under it filled by state colour (A-D fixed, others grey).
std::string segmentation_svg(const GfpSeries& series, const LabelSequence& seq, const std::vector<std::string>& state_labels,
                             const PlotWindow& window);

}  // namespace mstool
