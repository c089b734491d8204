#pragma once
// Self-contained SVG plot emission: line plots, space-time heatmaps with a
// fixed diverging colormap, and 2-D projections of a latent trajectory.
// Output is plain deterministic text (fixed precision, no timestamps), so
// re-runs of the same data are byte-identical.

#include <string>
#include <vector>

#include "latentflow/core.hpp"
#include "latentflow/fourier.hpp"
#include "latentflow/trajectory.hpp"

namespace latentflow {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series);

// One panel per matrix, shared symmetric color scale (blue-white-red around
// zero). `values` is time-major: column i is the snapshot at times[i].
std::string heatmap_svg(const std::string& title, const std::vector<double>& times,
                        const PeriodicGrid& grid, const Matrix& values);
std::string heatmap_pair_svg(const std::string& title, const std::vector<double>& times,
                             const PeriodicGrid& grid, const Matrix& left,
                             const std::string& left_label, const Matrix& right,
                             const std::string& right_label);

// The coordinate-pair projections of the trajectory (all pairs for d <= 3),
// start marked green, end marked red; a 1-D trajectory plots against time.
std::string trajectory_views_svg(const std::string& title, const LatentTrajectory& traj);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace latentflow
