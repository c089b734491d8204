#include "latentflow/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "latentflow/integrators.hpp"

namespace latentflow {
namespace {

constexpr const char* kMagic = "latentflow-dataset";
constexpr int kVersion = 1;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("load_dataset: corrupt header: bad value '" + text + "' for " +
                                 key);
    }
}

IntegrationConfig window_config(const SimulationConfig& cfg, double t0, double t1,
                                double interval) {
    IntegrationConfig icfg;
    icfg.rel_tol = cfg.rel_tol;
    icfg.abs_tol = cfg.abs_tol;
    icfg.t_start = t0;
    icfg.t_end = t1;
    icfg.snapshot_interval = interval;
    icfg.initial_step = 1e-3;
    return icfg;
}

}  // namespace

std::string equation_name(Equation eq) {
    switch (eq) {
        case Equation::fkdv: return "fkdv";
        case Equation::ks: return "ks";
        case Equation::sg: return "sg";
    }
    throw std::logic_error("equation_name: bad enum value");
}

Equation parse_equation(const std::string& name) {
    if (name == "fkdv") return Equation::fkdv;
    if (name == "ks") return Equation::ks;
    if (name == "sg") return Equation::sg;
    throw std::invalid_argument("unknown equation '" + name + "' (expected fkdv, ks, or sg)");
}

SnapshotDataset generate_dataset(Equation eq, const SimulationConfig& cfg,
                                 const InitialCondition& ic) {
    if (cfg.transient_cutoff < 0.0)
        throw std::invalid_argument("generate_dataset: transient_cutoff must be >= 0");
    if (cfg.window_length < 0.0)
        throw std::invalid_argument("generate_dataset: window_length must be >= 0");
    const PeriodicGrid grid = make_grid(cfg.n_points);
    const Field u0 = make_initial_condition(grid, ic);

    SemiLinearSystem sys;
    switch (eq) {
        case Equation::fkdv: sys = fkdv_system(cfg.fkdv, grid); break;
        case Equation::ks: sys = ks_system(cfg.ks, grid); break;
        case Equation::sg: sys = sg_system(grid); break;
    }
    const bool wave = (eq == Equation::sg);
    auto integrate = wave ? &integrate_etdrk4 : &integrate_if_rk45;

    // State at the transient cutoff (initial velocity zero for the wave
    // system), then the sampled window from there.
    std::vector<double> state(static_cast<std::size_t>(sys.state_dim) * grid.n_points, 0.0);
    std::copy(u0.values.begin(), u0.values.end(), state.begin());
    const double T = cfg.transient_cutoff;
    if (T > 0.0) {
        try {
            const Trajectory warm = integrate(sys, state, window_config(cfg, 0.0, T, T));
            const int last = warm.states.rows - 1;
            for (int j = 0; j < warm.states.cols; ++j) state[j] = warm.states(last, j);
        } catch (const IntegrationError& e) {
            throw IntegrationError("generate_dataset(" + equation_name(eq) +
                                       "): blow-up before the transient cutoff: " + e.what(),
                                   e.partial(), e.failure_time());
        }
    }

    SnapshotDataset ds;
    ds.equation = eq;
    ds.config = cfg;
    ds.ic = ic;
    ds.grid = grid;

    if (cfg.window_length == 0.0) {
        ds.times = {T};
        ds.values = Matrix{1, grid.n_points,
                           std::vector<double>(state.begin(), state.begin() + grid.n_points)};
        return ds;
    }

    Trajectory traj;
    try {
        traj = integrate(sys, state,
                         window_config(cfg, T, T + cfg.window_length, cfg.snapshot_interval));
    } catch (const IntegrationError& e) {
        throw IntegrationError("generate_dataset(" + equation_name(eq) +
                                   "): sampling window failed: " + e.what(),
                               e.partial(), e.failure_time());
    }

    ds.times = traj.times;
    const int rows = traj.states.rows;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(rows) * grid.n_points);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < grid.n_points; ++j) vals.push_back(traj.states(i, j));
    ds.values = Matrix(rows, grid.n_points, std::move(vals));
    return ds;
}

CoordNormalizer fit_normalizer(const SnapshotDataset& ds) {
    if (ds.times.empty() || ds.values.data.empty())
        throw std::invalid_argument("fit_normalizer: empty dataset");
    CoordNormalizer nz;

    const double t0 = ds.times.front(), t1 = ds.times.back();
    if (t1 > t0) {
        nz.t_shift = 0.5 * (t0 + t1);
        nz.t_scale = 0.5 * (t1 - t0);
    } else {
        std::cerr << "fit_normalizer: warning: degenerate time range, scale set to 1\n";
        nz.t_shift = t0;
        nz.t_scale = 1.0;
    }

    nz.x_shift = 0.5 * (ds.grid.x_min + ds.grid.x_max);
    nz.x_scale = 0.5 * (ds.grid.x_max - ds.grid.x_min);

    double mean = 0.0;
    for (double v : ds.values.data) mean += v;
    mean /= static_cast<double>(ds.values.data.size());
    double var = 0.0;
    for (double v : ds.values.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ds.values.data.size());
    nz.u_shift = mean;
    if (var > 0.0) {
        nz.u_scale = std::sqrt(var);
    } else {
        std::cerr << "fit_normalizer: warning: zero-variance values, scale set to 1\n";
        nz.u_scale = 1.0;
    }
    return nz;
}

void save_dataset(const SnapshotDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dataset: cannot open '" + path + "' for writing");
    out << kMagic << " v" << kVersion << "\n"
        << "equation " << equation_name(ds.equation) << "\n"
        << "n_points " << ds.grid.n_points << "\n"
        << "x_min " << fmt(ds.grid.x_min) << "\n"
        << "x_max " << fmt(ds.grid.x_max) << "\n"
        << "froude " << fmt(ds.config.fkdv.froude) << "\n"
        << "viscosity " << fmt(ds.config.ks.viscosity) << "\n"
        << "ic_amplitude " << fmt(ds.ic.amplitude) << "\n"
        << "ic_wavenumber " << ds.ic.wavenumber << "\n"
        << "ic_phase " << fmt(ds.ic.phase) << "\n"
        << "transient_cutoff " << fmt(ds.config.transient_cutoff) << "\n"
        << "window_length " << fmt(ds.config.window_length) << "\n"
        << "snapshot_interval " << fmt(ds.config.snapshot_interval) << "\n"
        << "rel_tol " << fmt(ds.config.rel_tol) << "\n"
        << "abs_tol " << fmt(ds.config.abs_tol) << "\n"
        << "rows " << ds.values.rows << "\n"
        << "cols " << ds.values.cols << "\n"
        << "binary\n";
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(ds.values.data.data()),
              static_cast<std::streamsize>(ds.values.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_dataset: write to '" + path + "' failed");
}

SnapshotDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_dataset: corrupt file: empty '" + path + "'");
    {
        std::istringstream head(line);
        std::string magic, ver;
        head >> magic >> ver;
        if (magic != kMagic)
            throw std::runtime_error("load_dataset: corrupt file: bad magic in '" + path + "'");
        if (ver != "v" + std::to_string(kVersion))
            throw std::runtime_error("load_dataset: unsupported schema version '" + ver +
                                     "' in '" + path + "' (expected v" +
                                     std::to_string(kVersion) + ")");
    }

    SnapshotDataset ds;
    int n_points = 0, rows = -1, cols = -1;
    double x_min = 0.0, x_max = 0.0;
    bool saw_binary = false;
    while (std::getline(in, line)) {
        if (line == "binary") {
            saw_binary = true;
            break;
        }
        std::istringstream ls(line);
        std::string key, value;
        ls >> key >> value;
        if (key.empty() || value.empty())
            throw std::runtime_error("load_dataset: corrupt header line '" + line + "'");
        if (key == "equation") ds.equation = parse_equation(value);
        else if (key == "n_points") n_points = static_cast<int>(parse_double(key, value));
        else if (key == "x_min") x_min = parse_double(key, value);
        else if (key == "x_max") x_max = parse_double(key, value);
        else if (key == "froude") ds.config.fkdv.froude = parse_double(key, value);
        else if (key == "viscosity") ds.config.ks.viscosity = parse_double(key, value);
        else if (key == "ic_amplitude") ds.ic.amplitude = parse_double(key, value);
        else if (key == "ic_wavenumber") ds.ic.wavenumber = static_cast<int>(parse_double(key, value));
        else if (key == "ic_phase") ds.ic.phase = parse_double(key, value);
        else if (key == "transient_cutoff") ds.config.transient_cutoff = parse_double(key, value);
        else if (key == "window_length") ds.config.window_length = parse_double(key, value);
        else if (key == "snapshot_interval") ds.config.snapshot_interval = parse_double(key, value);
        else if (key == "rel_tol") ds.config.rel_tol = parse_double(key, value);
        else if (key == "abs_tol") ds.config.abs_tol = parse_double(key, value);
        else if (key == "rows") rows = static_cast<int>(parse_double(key, value));
        else if (key == "cols") cols = static_cast<int>(parse_double(key, value));
        else throw std::runtime_error("load_dataset: corrupt header: unknown key '" + key + "'");
    }
    if (!saw_binary)
        throw std::runtime_error("load_dataset: corrupt file: missing binary marker in '" + path +
                                 "'");
    if (rows < 1 || cols < 1 || n_points != cols)
        throw std::runtime_error("load_dataset: shape inconsistency: rows=" +
                                 std::to_string(rows) + " cols=" + std::to_string(cols) +
                                 " n_points=" + std::to_string(n_points));

    ds.config.n_points = n_points;
    ds.grid = make_grid(n_points, x_min, x_max);
    ds.values = Matrix{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols)};
    in.read(reinterpret_cast<char*>(ds.values.data.data()),
            static_cast<std::streamsize>(ds.values.data.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != ds.values.data.size() * sizeof(double))
        throw std::runtime_error("load_dataset: shape inconsistency: matrix truncated in '" +
                                 path + "' (expected " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + ")");
    for (double v : ds.values.data)
        if (!std::isfinite(v))
            throw std::runtime_error("load_dataset: corrupt file: non-finite value in '" + path +
                                     "'");

    ds.times.resize(rows);
    for (int i = 0; i < rows; ++i)
        ds.times[i] = ds.config.transient_cutoff + i * ds.config.snapshot_interval;
    return ds;
}

void export_dataset_csv(const SnapshotDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_dataset_csv: cannot open '" + path + "'");
    out << "t,x,u\n";
    for (std::size_t i = 0; i < ds.times.size(); ++i)
        for (int j = 0; j < ds.grid.n_points; ++j)
            out << fmt(ds.times[i]) << ',' << fmt(ds.grid.node(j)) << ','
                << fmt(ds.values(static_cast<int>(i), j)) << "\n";
    if (!out) throw std::runtime_error("export_dataset_csv: write to '" + path + "' failed");
}

}  // namespace latentflow
