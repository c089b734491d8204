#include "latentflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "latentflow/fourier.hpp"

namespace latentflow {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double sq_distance(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

// Index-based percentile of the sorted magnitudes, no interpolation.
double percentile_90(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(0.9 * (v.size() - 1))];
}

std::ofstream open_csv(const std::string& path, const char* who) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(std::string(who) + ": cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

ErrorReport reconstruction_error(const Matrix& pred, const Matrix& truth) {
    if (pred.rows != truth.rows || pred.cols != truth.cols) {
        throw std::invalid_argument("reconstruction_error: shape mismatch (" +
                                    std::to_string(pred.rows) + "x" + std::to_string(pred.cols) +
                                    " vs " + std::to_string(truth.rows) + "x" +
                                    std::to_string(truth.cols) + ")");
    }
    ErrorReport rep;
    rep.pointwise_error = pred - truth;
    rep.per_time_error.resize(truth.rows);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < truth.rows; ++i) {
        double row_num = 0.0, row_den = 0.0;
        for (int j = 0; j < truth.cols; ++j) {
            const double d = rep.pointwise_error(i, j);
            row_num += d * d;
            row_den += truth(i, j) * truth(i, j);
        }
        rep.per_time_error[i] = std::sqrt(row_num) / std::sqrt(row_den);
        num += row_num;
        den += row_den;
    }
    if (den == 0.0) throw std::invalid_argument("reconstruction_error: truth is identically zero");
    rep.relative_error_percent = 100.0 * std::sqrt(num) / std::sqrt(den);
    return rep;
}

LatentTrajectory fourier_latent(const SnapshotDataset& ds) {
    if (ds.times.empty() || ds.values.rows == 0) {
        throw std::invalid_argument("fourier_latent: empty dataset");
    }
    // A spatially flat dataset carries no energy in any k >= 1 mode, so there
    // is nothing to rank; anything with structure yields two wavenumbers (the
    // second may sit at rounding level, which just flattens the third axis).
    double mode_energy = 0.0, mean_sq = 0.0;
    const std::vector<DominantMode> modes = dominant_modes(ds.values, ds.grid, 2);
    for (const Complex& a : modes[0].amplitude) mode_energy += std::norm(a);
    for (double v : ds.values.data) mean_sq += v * v;
    mean_sq /= static_cast<double>(ds.values.size());
    if (mode_energy <= 1e-20 * std::max(1.0, mean_sq) * static_cast<double>(ds.times.size())) {
        throw std::invalid_argument(
            "fourier_latent: fewer than two energetic modes (spatially flat data)");
    }

    LatentTrajectory traj;
    traj.times = ds.times;
    traj.source = LatentSource::fourier;
    const int nt = static_cast<int>(ds.times.size());
    traj.coords = Matrix(nt, 3);
    for (int i = 0; i < nt; ++i) {
        traj.coords(i, 0) = modes[0].amplitude[i].real();
        traj.coords(i, 1) = modes[0].amplitude[i].imag();
        traj.coords(i, 2) = modes[1].amplitude[i].real();
    }
    const std::string k1 = std::to_string(modes[0].wavenumber);
    const std::string k2 = std::to_string(modes[1].wavenumber);
    traj.labels = {"Re a_" + k1, "Im a_" + k1, "Re a_" + k2};
    return traj;
}

Matrix model_predictions(const NIFModel& model, const SnapshotDataset& ds) {
    const int nt = static_cast<int>(ds.times.size());
    Matrix out(nt, ds.grid.n_points);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < ds.grid.n_points; ++j) {
            out(i, j) = nif_eval(model, ds.grid.node(j), ds.times[i]).u;
        }
    }
    return out;
}

Matrix model_predictions(const DeepONetModel& model, const SnapshotDataset& ds) {
    const int nt = static_cast<int>(ds.times.size());
    Matrix out(nt, ds.grid.n_points);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < ds.grid.n_points; ++j) {
            out(i, j) = deeponet_eval(model, ds.grid.node(j), ds.times[i]);
        }
    }
    return out;
}

std::vector<int> series_transitions(const std::vector<double>& series) {
    std::vector<int> events;
    if (series.size() < 2) return events;
    std::vector<double> steps(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) steps[i] = std::abs(series[i + 1] - series[i]);
    const double threshold = percentile_90(steps);
    // Strict comparison: a constant or uniformly-stepping series never fires.
    std::size_t i = 0;
    while (i < steps.size()) {
        if (steps[i] <= threshold) {
            ++i;
            continue;
        }
        std::size_t best = i;
        while (i < steps.size() && steps[i] > threshold) {
            if (steps[i] > steps[best]) best = i;
            ++i;
        }
        events.push_back(static_cast<int>(best));
    }
    return events;
}

std::vector<int> dataset_transitions(const SnapshotDataset& ds) {
    const std::vector<DominantMode> modes = dominant_modes(ds.values, ds.grid, 1);
    std::vector<double> energy(modes[0].amplitude.size());
    for (std::size_t i = 0; i < energy.size(); ++i) energy[i] = std::norm(modes[0].amplitude[i]);
    return series_transitions(energy);
}

std::optional<double> transition_alignment(const LatentTrajectory& latent,
                                           const SnapshotDataset& ds) {
    if (latent.coords.rows != static_cast<int>(ds.times.size())) {
        throw std::invalid_argument("transition_alignment: latent has " +
                                    std::to_string(latent.coords.rows) + " rows for " +
                                    std::to_string(ds.times.size()) + " snapshots");
    }
    const std::vector<int> truth = dataset_transitions(ds);
    if (truth.empty()) return std::nullopt;

    std::vector<int> found;
    std::vector<double> column(latent.coords.rows);
    for (int k = 0; k < latent.coords.cols; ++k) {
        for (int i = 0; i < latent.coords.rows; ++i) column[i] = latent.coords(i, k);
        const std::vector<int> ev = series_transitions(column);
        found.insert(found.end(), ev.begin(), ev.end());
    }

    int matched = 0;
    for (int t : truth) {
        const bool hit = std::any_of(found.begin(), found.end(),
                                     [t](int f) { return std::abs(f - t) <= 2; });
        matched += hit ? 1 : 0;
    }
    return static_cast<double>(matched) / static_cast<double>(truth.size());
}

ClusterSplit two_means(const Matrix& coords) {
    const int n = coords.rows, d = coords.cols;
    if (n < 2) throw std::invalid_argument("two_means: need at least 2 points");

    // Farthest pair seeds the centers; ties resolve to the first pair found.
    int seed_a = 0, seed_b = 1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double s = sq_distance(coords.row(i), coords.row(j), d);
            if (s > best) {
                best = s;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    ClusterSplit split;
    split.centers = Matrix(2, d);
    for (int k = 0; k < d; ++k) {
        split.centers(0, k) = coords(seed_a, k);
        split.centers(1, k) = coords(seed_b, k);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const double d0 = sq_distance(coords.row(i), split.centers.row(0), d);
            const double d1 = sq_distance(coords.row(i), split.centers.row(1), d);
            const int who = d1 < d0 ? 1 : 0;
            if (who != assign[i]) changed = true;
            assign[i] = who;
        }
        if (!changed && iter > 0) break;
        Matrix sums(2, d);
        int counts[2] = {0, 0};
        for (int i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (int k = 0; k < d; ++k) sums(assign[i], k) += coords(i, k);
        }
        for (int c = 0; c < 2; ++c) {
            if (counts[c] == 0) continue;  // keep the previous center alive
            for (int k = 0; k < d; ++k) split.centers(c, k) = sums(c, k) / counts[c];
        }
    }

    std::vector<double> radii[2];
    for (int i = 0; i < n; ++i) {
        radii[assign[i]].push_back(
            std::sqrt(sq_distance(coords.row(i), split.centers.row(assign[i]), d)));
    }
    split.sizes = {static_cast<int>(radii[0].size()), static_cast<int>(radii[1].size())};

    const double gap = std::sqrt(sq_distance(split.centers.row(0), split.centers.row(1), d));
    double core = 0.0;
    for (auto& r : radii) {
        if (!r.empty()) core += percentile_90(std::move(r));
    }
    if (core == 0.0) {
        split.separation = gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        split.separation = gap / core;
    }
    return split;
}

bool well_separated(const ClusterSplit& split) {
    const int n = split.sizes[0] + split.sizes[1];
    const int floor_size = std::max(1, n / 20);
    return split.separation > 1.0 && split.sizes[0] >= floor_size && split.sizes[1] >= floor_size;
}

double recurrence_fraction(const LatentTrajectory& traj, double radius_fraction, int min_gap) {
    const int n = traj.coords.rows, d = traj.coords.cols;
    if (n < 2) throw std::invalid_argument("recurrence_fraction: need at least 2 points");
    double diam_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            diam_sq = std::max(diam_sq, sq_distance(traj.coords.row(i), traj.coords.row(j), d));
        }
    }
    const double radius_sq = radius_fraction * radius_fraction * diam_sq;
    int recurrent = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + min_gap; j < n; ++j) {
            if (sq_distance(traj.coords.row(i), traj.coords.row(j), d) <= radius_sq) {
                ++recurrent;
                break;
            }
        }
    }
    return static_cast<double>(recurrent) / static_cast<double>(n);
}

void write_trajectory_csv(const LatentTrajectory& traj, const std::string& path) {
    std::ofstream out = open_csv(path, "write_trajectory_csv");
    out << "t";
    for (int k = 0; k < traj.coords.cols; ++k) {
        out << "," << (k < static_cast<int>(traj.labels.size()) ? traj.labels[k]
                                                                : "z" + std::to_string(k + 1));
    }
    out << "\n";
    for (int i = 0; i < traj.coords.rows; ++i) {
        out << fmt(traj.times[i]);
        for (int k = 0; k < traj.coords.cols; ++k) out << "," << fmt(traj.coords(i, k));
        out << "\n";
    }
}

void write_field_csv(const std::vector<double>& times, const PeriodicGrid& grid,
                     const Matrix& values, const std::string& path) {
    if (values.rows != static_cast<int>(times.size()) || values.cols != grid.n_points) {
        throw std::invalid_argument("write_field_csv: " + std::to_string(values.rows) + "x" +
                                    std::to_string(values.cols) + " values for " +
                                    std::to_string(times.size()) + " times x " +
                                    std::to_string(grid.n_points) + " points");
    }
    std::ofstream out = open_csv(path, "write_field_csv");
    out << "t";
    for (int j = 0; j < grid.n_points; ++j) out << ",x=" << fmt(grid.node(j));
    out << "\n";
    for (int i = 0; i < values.rows; ++i) {
        out << fmt(times[i]);
        for (int j = 0; j < values.cols; ++j) out << "," << fmt(values(i, j));
        out << "\n";
    }
}

void write_error_csv(const std::vector<double>& times, const ErrorReport& report,
                     const std::string& path) {
    if (report.per_time_error.size() != times.size()) {
        throw std::invalid_argument("write_error_csv: " +
                                    std::to_string(report.per_time_error.size()) +
                                    " error rows for " + std::to_string(times.size()) + " times");
    }
    std::ofstream out = open_csv(path, "write_error_csv");
    out << "t,relative_row_error\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << fmt(times[i]) << "," << fmt(report.per_time_error[i]) << "\n";
    }
}

}  // namespace latentflow
