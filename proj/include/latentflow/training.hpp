#pragma once
// Shared machinery for the two model trainers: the training configuration,
// the divergence exception, dataset flattening into (x, t, u) samples, the
// seeded minibatch Adam loop (gradients accumulated through the deterministic
// batch kernels), and the checkpoint file primitives.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latentflow/dataset.hpp"
#include "latentflow/kernels.hpp"
#include "latentflow/nn.hpp"
#include "latentflow/rng.hpp"

namespace latentflow {

struct TrainConfig {
    int latent_dim = 3;
    int epochs = 5000;
    double learning_rate = 0.0;      // 0 = the model's default rate
    int batch_size = 1024;
    std::uint64_t seed = 0;
    std::vector<int> hidden_widths;  // empty = the model's default stack
    std::string activation;          // empty = the model's default
};

// Thrown when a training run produces non-finite losses or gradients; carries
// the epoch losses completed before the failure.
class TrainingError : public std::runtime_error {
  public:
    TrainingError(const std::string& what, int epoch, std::vector<double> history)
        : std::runtime_error(what), epoch_(epoch), partial_loss_history_(std::move(history)) {}

    int epoch() const { return epoch_; }
    const std::vector<double>& partial_loss_history() const { return partial_loss_history_; }

  private:
    int epoch_;
    std::vector<double> partial_loss_history_;
};

struct SamplePoint {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;
};

// Row-major flattening of the dataset grid into training triples.
inline std::vector<SamplePoint> dataset_samples(const SnapshotDataset& ds) {
    std::vector<SamplePoint> samples;
    samples.reserve(ds.times.size() * static_cast<std::size_t>(ds.grid.n_points));
    for (std::size_t i = 0; i < ds.times.size(); ++i) {
        for (int j = 0; j < ds.grid.n_points; ++j) {
            samples.push_back({ds.grid.node(j), ds.times[i], ds.values(static_cast<int>(i), j)});
        }
    }
    return samples;
}

// One minibatch-Adam training run over a flat parameter vector.
//
// `make_worker(order, base)` must return a kernel worker whose sample call
// (s, acc) accumulates sample order[base + s]'s MSE-gradient contribution
// (d/dparams of squared residual) into acc[0 .. n_params) and its squared
// residual into acc[n_params]; a worker deferring work across samples
// supplies a flush (see BatchWorker).  Gradients are averaged over the
// minibatch, one Adam step is taken per batch, and `after_step` runs after
// each update so the caller can sync the flat vector back into its model
// structures.  `prepare_batch`, when set, may reorder order[base .. base+len)
// before the batch runs (batch membership is already fixed by the shuffle;
// trainers use this to group samples that share expensive intermediate
// state).  Every epoch is a full seeded-shuffle pass; the returned history
// holds one mean-squared-error entry per epoch.
inline std::vector<double> run_minibatch_adam(
    std::size_t n_samples, std::size_t n_params, std::vector<double>& flat_params, int epochs,
    double learning_rate, int batch_size, std::uint64_t seed,
    const std::function<BatchWorker(const std::vector<std::size_t>& order, std::size_t base)>&
        make_worker,
    const std::function<void()>& after_step,
    const std::function<void(std::vector<std::size_t>& order, std::size_t base, std::size_t len)>&
        prepare_batch = {}) {
    if (n_samples == 0) throw std::invalid_argument("training requires a nonempty dataset");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
    if (flat_params.size() != n_params)
        throw std::invalid_argument("flat parameter vector has the wrong length");

    Rng rng((RngSeed{seed}));
    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;

    AdamState adam = make_adam_state(n_params);
    std::vector<double> acc(n_params + 1);
    std::vector<double> grads(n_params);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(epochs));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_sq_sum = 0.0;
        for (std::size_t base = 0; base < n_samples; base += static_cast<std::size_t>(batch_size)) {
            const std::size_t len =
                std::min(n_samples - base, static_cast<std::size_t>(batch_size));
            if (prepare_batch) prepare_batch(order, base, len);
            kernels::batch_accumulate(len, n_params + 1, acc.data(),
                                      [&]() { return make_worker(order, base); });
            for (std::size_t k = 0; k < n_params; ++k) grads[k] = acc[k] / static_cast<double>(len);
            epoch_sq_sum += acc[n_params];
            try {
                adam_step(flat_params.data(), grads.data(), n_params, adam, learning_rate);
            } catch (const std::exception& ex) {
                throw TrainingError(
                    "training diverged at epoch " + std::to_string(epoch) + ": " + ex.what(),
                    epoch, history);
            }
            after_step();
        }
        const double mse = epoch_sq_sum / static_cast<double>(n_samples);
        if (!std::isfinite(mse)) {
            throw TrainingError(
                "training diverged at epoch " + std::to_string(epoch) + ": non-finite loss",
                epoch, history);
        }
        history.push_back(mse);
    }
    return history;
}

// ---------------------------------------------------------------------------
// Checkpoint file primitives (shared by both model formats): a text header of
// "key value" lines between a magic line and a "binary" sentinel, followed by
// a raw little-endian float64 blob.

namespace ckpt {

inline constexpr const char* kMagic = "latentflow-checkpoint";
inline constexpr int kVersion = 1;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_ints(const std::vector<int>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        out << v[i];
    }
    return out.str();
}

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("load checkpoint: corrupt header: bad value '" + text +
                                 "' for " + key);
    }
}

inline std::vector<int> parse_ints(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    std::vector<int> out;
    long long v = 0;
    while (in >> v) out.push_back(static_cast<int>(v));
    if (!in.eof() || out.empty()) {
        throw std::runtime_error("load checkpoint: corrupt header: bad value '" + text +
                                 "' for " + key);
    }
    return out;
}

// Key-value lines from after the magic line down to the "binary" sentinel.
inline std::map<std::string, std::string> read_header(std::istream& in, const std::string& path) {
    std::string magic;
    if (!std::getline(in, magic) || magic != kMagic) {
        throw std::runtime_error("load checkpoint: '" + path + "' is not a checkpoint file (bad magic)");
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line == "binary") return kv;
        const std::size_t sp = line.find(' ');
        if (sp == std::string::npos || sp == 0) {
            throw std::runtime_error("load checkpoint: corrupt header line '" + line + "'");
        }
        kv[line.substr(0, sp)] = line.substr(sp + 1);
    }
    throw std::runtime_error("load checkpoint: missing binary section in '" + path + "'");
}

inline const std::string& require(const std::map<std::string, std::string>& kv,
                                  const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("load checkpoint: missing header key '" + key + "'");
    return it->second;
}

inline void write_normalizer(std::ostream& out, const CoordNormalizer& n) {
    out << "norm_t " << fmt(n.t_shift) << ' ' << fmt(n.t_scale) << '\n';
    out << "norm_x " << fmt(n.x_shift) << ' ' << fmt(n.x_scale) << '\n';
    out << "norm_u " << fmt(n.u_shift) << ' ' << fmt(n.u_scale) << '\n';
}

inline CoordNormalizer read_normalizer(const std::map<std::string, std::string>& kv) {
    CoordNormalizer n;
    double* slots[3][2] = {{&n.t_shift, &n.t_scale}, {&n.x_shift, &n.x_scale},
                           {&n.u_shift, &n.u_scale}};
    const char* keys[3] = {"norm_t", "norm_x", "norm_u"};
    for (int i = 0; i < 3; ++i) {
        std::istringstream in(require(kv, keys[i]));
        std::string shift, scale, extra;
        if (!(in >> shift >> scale) || (in >> extra)) {
            throw std::runtime_error(std::string("load checkpoint: corrupt header: bad value for ") +
                                     keys[i]);
        }
        *slots[i][0] = parse_double(keys[i], shift);
        *slots[i][1] = parse_double(keys[i], scale);
    }
    return n;
}

inline void write_blob(std::ostream& out, const std::vector<double>& blob) {
    static_assert(sizeof(double) == 8, "checkpoint blobs assume 64-bit doubles");
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * sizeof(double)));
}

inline std::vector<double> read_blob(std::istream& in, std::size_t count, const std::string& path) {
    std::vector<double> blob(count);
    in.read(reinterpret_cast<char*>(blob.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
        throw std::runtime_error("load checkpoint: truncated parameter blob in '" + path + "'");
    }
    return blob;
}

}  // namespace ckpt

}  // namespace latentflow
