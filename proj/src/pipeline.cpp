#include "latentflow/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "latentflow/analysis.hpp"
#include "latentflow/deeponet.hpp"
#include "latentflow/nif.hpp"
#include "latentflow/report.hpp"

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

[[noreturn]] void bad_value(const std::string& context, const std::string& key,
                            const std::string& value) {
    throw std::invalid_argument(context + ": invalid value '" + value + "' for '" + key + "'");
}

double to_double(const std::string& context, const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) bad_value(context, key, value);
        return v;
    } catch (const std::invalid_argument&) {
        bad_value(context, key, value);
    } catch (const std::out_of_range&) {
        bad_value(context, key, value);
    }
}

int to_int(const std::string& context, const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) bad_value(context, key, value);
        return v;
    } catch (const std::invalid_argument&) {
        bad_value(context, key, value);
    } catch (const std::out_of_range&) {
        bad_value(context, key, value);
    }
}

std::uint64_t to_seed(const std::string& context, const std::string& key,
                      const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) bad_value(context, key, value);
        return v;
    } catch (const std::invalid_argument&) {
        bad_value(context, key, value);
    } catch (const std::out_of_range&) {
        bad_value(context, key, value);
    }
}

bool to_bool(const std::string& context, const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    bad_value(context, key, value);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> to_int_list(const std::string& context, const std::string& key,
                             const std::string& value) {
    std::vector<int> out;
    for (const std::string& item : split_list(value)) out.push_back(to_int(context, key, item));
    if (out.empty()) bad_value(context, key, value);
    return out;
}

void check_model_name(const std::string& context, const std::string& name) {
    if (name != "nif" && name != "deeponet") {
        throw std::invalid_argument(context + ": unknown model '" + name +
                                    "' (expected nif or deeponet)");
    }
}

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// --- shared command plumbing -----------------------------------------------

SnapshotDataset load_dataset_checked(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("no dataset at '" + path + "' (run simulate first)");
    }
    return load_dataset(path);
}

std::string checkpoint_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    return ckpt::require(ckpt::read_header(in, path), "kind");
}

std::string describe_window(const CoordNormalizer& n) {
    return "t in [" + fmt(n.t_shift - n.t_scale) + ", " + fmt(n.t_shift + n.t_scale) +
           "], x in [" + fmt(n.x_shift - n.x_scale) + ", " + fmt(n.x_shift + n.x_scale) + "]";
}

void check_normalizer_match(const CoordNormalizer& model, const SnapshotDataset& ds) {
    const CoordNormalizer data = fit_normalizer(ds);
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1.0});
    };
    if (!close(model.t_shift, data.t_shift) || !close(model.t_scale, data.t_scale) ||
        !close(model.x_shift, data.x_shift) || !close(model.x_scale, data.x_scale)) {
        throw std::invalid_argument("analyze: checkpoint was fit to " + describe_window(model) +
                                    " but the dataset spans " + describe_window(data));
    }
}

struct TrainedModel {
    std::string kind;
    LatentTrajectory latent;
    Matrix predictions;
};

TrainedModel evaluate_checkpoint(const std::string& path, const SnapshotDataset& ds) {
    TrainedModel out;
    out.kind = checkpoint_kind(path);
    if (out.kind == "nif") {
        const NIFModel model = load_nif(path);
        check_normalizer_match(model.normalizer, ds);
        out.latent = nif_latent_series(model, ds.times);
        out.predictions = model_predictions(model, ds);
    } else {
        const DeepONetModel model = load_deeponet(path);
        check_normalizer_match(model.normalizer, ds);
        out.latent = deeponet_latent_series(model, ds.times);
        out.predictions = model_predictions(model, ds);
    }
    return out;
}

// Mean drift across snapshots: the fKdV/KS integrators conserve the spatial
// mean, so this doubles as an integration borne-out check.
double mean_drift(const Matrix& values) {
    double first = 0.0, drift = 0.0;
    for (int i = 0; i < values.rows; ++i) {
        double mean = 0.0;
        for (int j = 0; j < values.cols; ++j) mean += values(i, j);
        mean /= values.cols;
        if (i == 0) first = mean;
        else drift = std::max(drift, std::abs(mean - first));
    }
    return drift;
}

double max_abs(const Matrix& values) {
    double m = 0.0;
    for (double v : values.data) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

std::string ExperimentConfig::resolved_data_path() const {
    if (!data_path.empty()) return data_path;
    return join(out_dir, "dataset_" + equation_name(equation) + ".lfd");
}

std::string ExperimentConfig::resolved_checkpoint_path() const {
    if (!checkpoint_path.empty()) return checkpoint_path;
    return join(out_dir, model + ".ckpt");
}

void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                     const std::string& context) {
    try {
        if (key == "equation") cfg.equation = parse_equation(value);
        else if (key == "model") { check_model_name(context, value); cfg.model = value; }
        else if (key == "n_points") cfg.sim.n_points = to_int(context, key, value);
        else if (key == "transient") cfg.sim.transient_cutoff = to_double(context, key, value);
        else if (key == "window") cfg.sim.window_length = to_double(context, key, value);
        else if (key == "snapshot_interval") cfg.sim.snapshot_interval = to_double(context, key, value);
        else if (key == "rel_tol") cfg.sim.rel_tol = to_double(context, key, value);
        else if (key == "abs_tol") cfg.sim.abs_tol = to_double(context, key, value);
        else if (key == "froude") cfg.sim.fkdv.froude = to_double(context, key, value);
        else if (key == "viscosity") cfg.sim.ks.viscosity = to_double(context, key, value);
        else if (key == "ic_amplitude") cfg.ic.amplitude = to_double(context, key, value);
        else if (key == "ic_wavenumber") cfg.ic.wavenumber = to_int(context, key, value);
        else if (key == "ic_phase") cfg.ic.phase = to_double(context, key, value);
        else if (key == "latent_dim") cfg.train.latent_dim = to_int(context, key, value);
        else if (key == "epochs") cfg.train.epochs = to_int(context, key, value);
        else if (key == "learning_rate") cfg.train.learning_rate = to_double(context, key, value);
        else if (key == "batch_size") cfg.train.batch_size = to_int(context, key, value);
        else if (key == "seed") cfg.train.seed = to_seed(context, key, value);
        else if (key == "hidden_widths") cfg.train.hidden_widths = to_int_list(context, key, value);
        else if (key == "activation") cfg.train.activation = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "data") cfg.data_path = value;
        else if (key == "checkpoint") cfg.checkpoint_path = value;
        else if (key == "fourier") cfg.fourier = to_bool(context, key, value);
        else if (key == "equations") {
            cfg.equations.clear();
            for (const std::string& name : split_list(value)) {
                cfg.equations.push_back(parse_equation(name));
            }
            if (cfg.equations.empty()) bad_value(context, key, value);
        } else if (key == "models") {
            cfg.models = split_list(value);
            for (const std::string& name : cfg.models) check_model_name(context, name);
            if (cfg.models.empty()) bad_value(context, key, value);
        } else {
            throw std::invalid_argument(context + ": unknown key '" + key + "'");
        }
    } catch (const std::invalid_argument& ex) {
        // parse_equation and friends throw without file context; add it.
        const std::string what = ex.what();
        if (what.rfind(context, 0) == 0) throw;
        throw std::invalid_argument(context + ": " + what);
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    static const std::vector<std::string> kSections = {"experiment", "simulate", "train",
                                                       "analyze", "pipeline"};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string context = path + ":" + std::to_string(line_no);
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw std::invalid_argument(context + ": unterminated section header '" + text + "'");
            }
            const std::string section = text.substr(1, text.size() - 2);
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                throw std::invalid_argument(context + ": unknown section '" + section + "'");
            }
            continue;
        }
        const std::size_t sp = text.find_first_of(" \t");
        if (sp == std::string::npos) {
            throw std::invalid_argument(context + ": expected 'key value', got '" + text + "'");
        }
        apply_config_kv(cfg, text.substr(0, sp), trim(text.substr(sp + 1)), context);
    }
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
    const SnapshotDataset ds = generate_dataset(cfg.equation, cfg.sim, cfg.ic);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.resolved_data_path();
    save_dataset(ds, path);
    out << "equation " << equation_name(ds.equation) << "\n"
        << "shape " << ds.times.size() << "x" << ds.grid.n_points << "\n";
    if (cfg.equation == Equation::sg) {
        out << "max_abs_u " << fmt(max_abs(ds.values)) << "\n";
    } else {
        out << "mean_drift " << fmt(mean_drift(ds.values)) << "\n";
    }
    out << "dataset " << path << "\n";
}

void cmd_train(const ExperimentConfig& cfg, std::ostream& out) {
    const SnapshotDataset ds = load_dataset_checked(cfg.resolved_data_path());
    std::filesystem::create_directories(cfg.out_dir);
    const std::string ckpt_path = cfg.resolved_checkpoint_path();
    const std::string loss_path = join(cfg.out_dir, "loss.csv");

    std::vector<double> history;
    Matrix predictions;
    try {
        if (cfg.model == "nif") {
            NifTraining trained = train_nif(ds, cfg.train);
            history = std::move(trained.loss_history);
            save_nif(trained.model, ckpt_path);
            predictions = model_predictions(trained.model, ds);
        } else if (cfg.model == "deeponet") {
            DeepONetTraining trained = train_deeponet(ds, cfg.train);
            history = std::move(trained.loss_history);
            save_deeponet(trained.model, ckpt_path);
            predictions = model_predictions(trained.model, ds);
        } else {
            check_model_name("train", cfg.model);
        }
    } catch (const TrainingError& ex) {
        write_loss_csv(ex.partial_loss_history(), loss_path);
        out << "loss_csv " << loss_path << " (partial, " << ex.partial_loss_history().size()
            << " epochs)\n";
        throw;
    }

    write_loss_csv(history, loss_path);
    const double error =
        reconstruction_error(predictions, ds.values).relative_error_percent;
    const double final_loss = history.empty() ? 0.0 : history.back();
    write_train_summary(join(cfg.out_dir, "train_summary.txt"), cfg.model, cfg.train.latent_dim,
                        cfg.train.epochs, cfg.train.seed, final_loss, error);
    out << "model " << cfg.model << "\n"
        << "final_loss " << fmt(final_loss) << "\n"
        << "relative_error_percent " << fmt(error) << "\n"
        << "checkpoint " << ckpt_path << "\n"
        << "loss_csv " << loss_path << "\n";
}

void cmd_analyze(const ExperimentConfig& cfg, std::ostream& out) {
    const SnapshotDataset ds = load_dataset_checked(cfg.resolved_data_path());
    const std::string ckpt_path = cfg.resolved_checkpoint_path();
    if (!std::filesystem::exists(ckpt_path)) {
        throw std::runtime_error("no checkpoint at '" + ckpt_path + "' (run train first)");
    }
    const TrainedModel model = evaluate_checkpoint(ckpt_path, ds);
    AnalysisBundle bundle = write_analysis_bundle(cfg.out_dir, ds, model.latent, model.predictions);
    if (cfg.fourier) {
        for (std::string& f : write_fourier_bundle(cfg.out_dir, ds)) {
            bundle.files.push_back(std::move(f));
        }
    }
    out << "model " << model.kind << "\n"
        << "relative_error_percent " << fmt(bundle.relative_error_percent) << "\n";
    for (const std::string& f : bundle.files) out << "wrote " << f << "\n";
}

int cmd_pipeline(const ExperimentConfig& cfg, std::ostream& out) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<SummaryRow> rows;
    for (Equation eq : cfg.equations) {
        // One dataset per equation, shared by both model cells.
        ExperimentConfig sim_cfg = cfg;
        sim_cfg.equation = eq;
        sim_cfg.data_path = join(cfg.out_dir, "dataset_" + equation_name(eq) + ".lfd");
        bool have_data = false;
        std::string sim_failure;
        try {
            cmd_simulate(sim_cfg, out);
            have_data = true;
        } catch (const std::exception& ex) {
            sim_failure = ex.what();
        }

        for (const std::string& model : cfg.models) {
            SummaryRow row;
            row.equation = equation_name(eq);
            row.model = model;
            row.latent_dim = cfg.train.latent_dim;
            const std::string cell = join(cfg.out_dir, row.equation + "_" + model);
            out << "--- " << row.equation << " / " << model << " -> " << cell << "\n";
            try {
                if (!have_data) throw std::runtime_error("simulate failed: " + sim_failure);
                ExperimentConfig cell_cfg = cfg;
                cell_cfg.equation = eq;
                cell_cfg.model = model;
                cell_cfg.out_dir = cell;
                cell_cfg.data_path = sim_cfg.data_path;
                cell_cfg.checkpoint_path = join(cell, model + ".ckpt");
                cmd_train(cell_cfg, out);
                cmd_analyze(cell_cfg, out);
                std::ifstream summary(join(cell, "train_summary.txt"));
                std::string line;
                while (std::getline(summary, line)) {
                    const std::string key = "relative_error_percent ";
                    if (line.rfind(key, 0) == 0) row.error_percent = std::stod(line.substr(key.size()));
                }
            } catch (const std::exception& ex) {
                row.ok = false;
                row.note = ex.what();
            }
            rows.push_back(std::move(row));
        }
    }
    write_summary_csv(rows, join(cfg.out_dir, "summary.csv"));
    out << format_summary_table(rows);
    int failures = 0;
    for (const SummaryRow& r : rows) failures += r.ok ? 0 : 1;
    return failures;
}

}  // namespace latentflow
