#pragma once
// Quantitative comparison machinery: reconstruction/pointwise errors against
// the full-order dataset, the Fourier two-mode projection baseline, latent
// change-point alignment diagnostics, trajectory geometry measures used by
// the benchmark suite, and CSV export of all of it.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "latentflow/dataset.hpp"
#include "latentflow/deeponet.hpp"
#include "latentflow/nif.hpp"
#include "latentflow/trajectory.hpp"

namespace latentflow {

struct ErrorReport {
    double relative_error_percent = 0.0;  // 100 * ||pred - truth||_F / ||truth||_F
    Matrix pointwise_error;               // pred - truth, dataset shape
    std::vector<double> per_time_error;   // row-wise ||diff|| / ||truth|| ratios
};

// Throws on shape mismatch and on identically-zero truth.
ErrorReport reconstruction_error(const Matrix& pred, const Matrix& truth);

// Projects the dataset on its two dominant wavenumbers k1, k2 (time-averaged
// spectral energy, k >= 1): coordinates (Re a_k1, Im a_k1, Re a_k2) per
// snapshot. A dataset with no spatial structure has no modes to project onto
// and is rejected.
LatentTrajectory fourier_latent(const SnapshotDataset& ds);

// Model evaluated on every (x_j, t_i) of the dataset grid; bit-identical to
// the corresponding pointwise eval calls.
Matrix model_predictions(const NIFModel& model, const SnapshotDataset& ds);
Matrix model_predictions(const DeepONetModel& model, const SnapshotDataset& ds);

// Change points of a series: indices i where |s[i+1] - s[i]| exceeds the 90th
// percentile of all step magnitudes, consecutive exceedances collapsed to the
// steepest step. A constant or uniformly-drifting series has none.
std::vector<int> series_transitions(const std::vector<double>& series);

// Change points of the dataset's own dynamics: series_transitions applied to
// the per-time energy of its dominant spatial mode.
std::vector<int> dataset_transitions(const SnapshotDataset& ds);

// Fraction of dataset transitions matched by a transition in any latent
// coordinate within +-2 snapshot intervals. Empty when the dataset itself has
// no transitions (score undefined).
std::optional<double> transition_alignment(const LatentTrajectory& latent,
                                           const SnapshotDataset& ds);

// Deterministic 2-means split of the trajectory points (farthest-pair
// initialization, Lloyd iterations to a fixed point). `separation` is the
// center-to-center distance over the sum of the clusters' 90th-percentile
// radii: above 1 the two cores do not overlap along the center line.
struct ClusterSplit {
    Matrix centers;  // 2 x d
    std::array<int, 2> sizes{};
    double separation = 0.0;
};

ClusterSplit two_means(const Matrix& coords);

// Separated cores, each holding at least 5% of the points.
bool well_separated(const ClusterSplit& split);

// Fraction of trajectory points with a later point (at least min_gap rows
// ahead) within radius_fraction of the trajectory diameter. Near 1 for
// quasi-periodic orbits, low for wandering ones. The default gap is 5% of
// the default 501-snapshot window, mirroring the spatial tolerance, so mere
// temporal adjacency cannot masquerade as a return.
double recurrence_fraction(const LatentTrajectory& traj, double radius_fraction = 0.05,
                           int min_gap = 25);

// CSV exports (headers documented in the files themselves; %.17g values so
// re-runs are byte-comparable).
void write_trajectory_csv(const LatentTrajectory& traj, const std::string& path);
void write_field_csv(const std::vector<double>& times, const PeriodicGrid& grid,
                     const Matrix& values, const std::string& path);
void write_error_csv(const std::vector<double>& times, const ErrorReport& report,
                     const std::string& path);

}  // namespace latentflow
