#pragma once
// Dataset generation and persistence: run one of the model equations from
// the standard initial profile, discard the transient, and keep a uniformly
// sampled window of snapshots on the attractor.  Datasets round-trip through
// a small self-describing file (text header + raw little-endian doubles) and
// can be exported as long-format CSV.

#include <string>
#include <vector>

#include "latentflow/core.hpp"
#include "latentflow/pde_models.hpp"

namespace latentflow {

enum class Equation { fkdv, ks, sg };

std::string equation_name(Equation eq);
Equation parse_equation(const std::string& name);

struct SimulationConfig {
    int n_points = 64;
    double transient_cutoff = 300.0;  // T: data collection starts here
    double window_length = 100.0;
    double snapshot_interval = 0.2;
    double rel_tol = 1e-6;
    double abs_tol = 1e-6;
    FkdvParams fkdv;
    KsParams ks;
};

// Snapshots of u(x, t) over [T, T + window], one row per time.  For the
// two-field sine-Gordon system only the displacement u is retained.  The
// embedded configuration is full provenance: regenerating from it reproduces
// the values bit for bit.
struct SnapshotDataset {
    Equation equation = Equation::ks;
    SimulationConfig config;
    InitialCondition ic;
    PeriodicGrid grid;
    std::vector<double> times;
    Matrix values;  // times.size() x grid.n_points
};

// Integrates from t = 0 (fKdV/KS with the integrating-factor pair, SG with
// ETDRK4), drops everything before the transient cutoff and samples the
// window. Integration failures propagate as IntegrationError with the phase
// named in the message.
SnapshotDataset generate_dataset(Equation eq, const SimulationConfig& cfg,
                                 const InitialCondition& ic);

// Affine maps taking t and x onto [-1, 1] and u to zero mean / unit standard
// deviation over the dataset.  normalized = (raw - shift) / scale.
struct CoordNormalizer {
    double t_shift = 0.0, t_scale = 1.0;
    double x_shift = 0.0, x_scale = 1.0;
    double u_shift = 0.0, u_scale = 1.0;

    double norm_t(double t) const { return (t - t_shift) / t_scale; }
    double norm_x(double x) const { return (x - x_shift) / x_scale; }
    double norm_u(double u) const { return (u - u_shift) / u_scale; }
    double denorm_t(double t) const { return t * t_scale + t_shift; }
    double denorm_x(double x) const { return x * x_scale + x_shift; }
    double denorm_u(double u) const { return u * u_scale + u_shift; }
};

// Degenerate ranges (single snapshot, constant field) fall back to scale 1
// with a warning on stderr.
CoordNormalizer fit_normalizer(const SnapshotDataset& ds);

void save_dataset(const SnapshotDataset& ds, const std::string& path);
SnapshotDataset load_dataset(const std::string& path);

// Long-format CSV export: header "t,x,u", one row per (time, node) pair.
void export_dataset_csv(const SnapshotDataset& ds, const std::string& path);

}  // namespace latentflow
