#include "latentflow/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "latentflow/svg.hpp"

namespace latentflow {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

AnalysisBundle write_analysis_bundle(const std::string& out_dir, const SnapshotDataset& ds,
                                     const LatentTrajectory& latent, const Matrix& predictions) {
    std::filesystem::create_directories(out_dir);
    const ErrorReport report = reconstruction_error(predictions, ds.values);
    AnalysisBundle bundle;
    bundle.relative_error_percent = report.relative_error_percent;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = join(out_dir, name);
        write_text_file(path, content);
        bundle.files.push_back(path);
    };

    std::vector<PlotSeries> profile;
    for (int k = 0; k < latent.coords.cols; ++k) {
        PlotSeries s;
        s.label = k < static_cast<int>(latent.labels.size()) ? latent.labels[k]
                                                             : "z" + std::to_string(k + 1);
        s.x = latent.times;
        s.y.resize(latent.coords.rows);
        for (int i = 0; i < latent.coords.rows; ++i) s.y[i] = latent.coords(i, k);
        profile.push_back(std::move(s));
    }
    emit("latent_profile.svg", line_plot_svg("Latent coordinates over time", "t", "z", profile));
    write_trajectory_csv(latent, join(out_dir, "latent_profile.csv"));
    bundle.files.push_back(join(out_dir, "latent_profile.csv"));

    emit("pointwise_error.svg",
         heatmap_svg("Pointwise error (prediction - truth)", ds.times, ds.grid,
                     report.pointwise_error));
    write_field_csv(ds.times, ds.grid, report.pointwise_error, join(out_dir, "pointwise_error.csv"));
    bundle.files.push_back(join(out_dir, "pointwise_error.csv"));

    emit("prediction_vs_truth.svg",
         heatmap_pair_svg("Predicted and true fields", ds.times, ds.grid, predictions,
                          "prediction", ds.values, "truth"));
    write_field_csv(ds.times, ds.grid, predictions, join(out_dir, "predictions.csv"));
    bundle.files.push_back(join(out_dir, "predictions.csv"));

    emit("latent_trajectory.svg", trajectory_views_svg("Latent trajectory", latent));
    write_error_csv(ds.times, report, join(out_dir, "per_time_error.csv"));
    bundle.files.push_back(join(out_dir, "per_time_error.csv"));
    return bundle;
}

std::vector<std::string> write_fourier_bundle(const std::string& out_dir,
                                              const SnapshotDataset& ds) {
    std::filesystem::create_directories(out_dir);
    const LatentTrajectory traj = fourier_latent(ds);
    const std::string svg_path = join(out_dir, "fourier_trajectory.svg");
    const std::string csv_path = join(out_dir, "fourier_trajectory.csv");
    write_text_file(svg_path, trajectory_views_svg("Fourier two-mode projection", traj));
    write_trajectory_csv(traj, csv_path);
    return {svg_path, csv_path};
}

void write_loss_csv(const std::vector<double>& loss_history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loss_csv: cannot open '" + path + "' for writing");
    out << "epoch,mse\n";
    for (std::size_t i = 0; i < loss_history.size(); ++i) {
        out << (i + 1) << "," << fmt(loss_history[i]) << "\n";
    }
}

void write_train_summary(const std::string& path, const std::string& kind, int latent_dim,
                         int epochs, std::uint64_t seed, double final_loss,
                         double relative_error_percent) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_train_summary: cannot open '" + path + "' for writing");
    }
    out << "kind " << kind << "\n"
        << "latent_dim " << latent_dim << "\n"
        << "epochs " << epochs << "\n"
        << "seed " << seed << "\n"
        << "final_loss " << fmt(final_loss) << "\n"
        << "relative_error_percent " << fmt(relative_error_percent) << "\n";
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_summary_csv: cannot open '" + path + "' for writing");
    out << "equation,model,latent_dim,error_percent,status\n";
    for (const SummaryRow& r : rows) {
        out << r.equation << "," << r.model << "," << r.latent_dim << ",";
        if (r.ok) out << fmt(r.error_percent) << ",ok";
        else out << ",failed: " << r.note;
        out << "\n";
    }
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
    std::string text = "equation  model     latent_dim  error%\n";
    for (const SummaryRow& r : rows) {
        char line[160];
        if (r.ok) {
            std::snprintf(line, sizeof line, "%-8s  %-8s  %10d  %.4g\n", r.equation.c_str(),
                          r.model.c_str(), r.latent_dim, r.error_percent);
        } else {
            std::snprintf(line, sizeof line, "%-8s  %-8s  %10d  failed: %s\n", r.equation.c_str(),
                          r.model.c_str(), r.latent_dim, r.note.c_str());
        }
        text += line;
    }
    return text;
}

}  // namespace latentflow
