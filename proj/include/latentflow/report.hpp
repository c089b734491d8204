#pragma once
// File bundles around one analysis: the four plots with their CSV siblings,
// the training loss/summary files, and the cross-experiment summary table.

#include <string>
#include <vector>

#include "latentflow/analysis.hpp"
#include "latentflow/dataset.hpp"
#include "latentflow/trajectory.hpp"

namespace latentflow {

struct AnalysisBundle {
    double relative_error_percent = 0.0;
    std::vector<std::string> files;  // everything written, in emission order
};

// Writes into out_dir (created if missing):
//   latent_profile.svg/.csv        latent coordinates over time
//   pointwise_error.svg            prediction - truth heatmap
//   pointwise_error.csv            the same matrix
//   prediction_vs_truth.svg        side-by-side field heatmaps
//   predictions.csv                the predicted field
//   latent_trajectory.svg          coordinate-pair projections
//   per_time_error.csv             row-wise relative error series
AnalysisBundle write_analysis_bundle(const std::string& out_dir, const SnapshotDataset& ds,
                                     const LatentTrajectory& latent, const Matrix& predictions);

// The Fourier-projection counterpart trajectory (plot + CSV), for comparing
// model latents against the data's own two-mode coordinates.
std::vector<std::string> write_fourier_bundle(const std::string& out_dir,
                                              const SnapshotDataset& ds);

void write_loss_csv(const std::vector<double>& loss_history, const std::string& path);

// Machine-readable key-value training summary (kind, latent_dim, epochs,
// seed, final_loss, relative_error_percent).
void write_train_summary(const std::string& path, const std::string& kind, int latent_dim,
                         int epochs, std::uint64_t seed, double final_loss,
                         double relative_error_percent);

struct SummaryRow {
    std::string equation;
    std::string model;
    int latent_dim = 0;
    double error_percent = 0.0;
    bool ok = true;
    std::string note;  // failure reason when !ok
};

// CSV with header "equation,model,latent_dim,error_percent,status"; failed
// cells carry the note in place of a number.
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

// The same table formatted for the console.
std::string format_summary_table(const std::vector<SummaryRow>& rows);

}  // namespace latentflow
