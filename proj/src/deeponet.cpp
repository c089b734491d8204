#include "latentflow/deeponet.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace latentflow {
namespace {

// Per-worker scratch.  The trunk pass is cached per grid point: consecutive
// samples sharing an x reuse it, which is what makes x-grouped batches cheap.
// Trunk gradients defer the same way — the trunk's output gradient sums
// across a run of equal x, and flush() backpropagates it once per run (the
// pass is linear in that gradient).  Flush points — a changed x or the end
// of a kernel block — depend only on the sample order, keeping the reduction
// deterministic.  The branch side works per sample; its input t rarely
// repeats within a batch.
struct DonWorker {
    const DeepONetModel* model;
    ForwardTape tape_b, tape_t;
    std::vector<double> in_b = {0.0}, in_t = {0.0};
    std::vector<double> og_b, og_sum;
    std::size_t n_branch, n_trunk;
    double cached_x = 0.0;
    bool has_cache = false;
    bool group_open = false;  // og_sum holds deferred trunk gradients for cached_x

    explicit DonWorker(const DeepONetModel& m)
        : model(&m),
          og_sum(static_cast<std::size_t>(m.latent_dim), 0.0),
          n_branch(param_count(m.branch)),
          n_trunk(param_count(m.trunk)) {}

    // Trunk pass for this x (cached); the gradient path must flush the open
    // group before x changes, because the deferred pass reads this tape.
    void prepare(double x) {
        if (has_cache && cached_x == x) return;
        in_t[0] = model->normalizer.norm_x(x);
        mlp_forward_into(model->trunk, in_t, tape_t);
        cached_x = x;
        has_cache = true;
    }

    // Backpropagates the deferred trunk gradient into its acc slots.
    void flush(double* acc) {
        if (!group_open) return;
        mlp_backward_acc(model->trunk, tape_t, og_sum, acc + n_branch);
        std::fill(og_sum.begin(), og_sum.end(), 0.0);
        group_open = false;
    }

    // acc layout: [branch grads | trunk grads | bias grad | squared residual]
    void accumulate(const SamplePoint& s, double* acc) {
        const DeepONetModel& m = *model;
        if (group_open && s.x != cached_x) flush(acc);
        prepare(s.x);
        in_b[0] = m.normalizer.norm_t(s.t);
        mlp_forward_into(m.branch, in_b, tape_b);
        const std::vector<double>& b = tape_b.post.back();
        const std::vector<double>& tr = tape_t.post.back();

        double pred = m.output_bias;
        for (int k = 0; k < m.latent_dim; ++k) pred += b[k] * tr[k];
        const double resid = pred - s.u;
        const double w = 2.0 * resid;

        og_b.resize(b.size());
        for (int k = 0; k < m.latent_dim; ++k) {
            og_b[k] = w * tr[k];
            og_sum[k] += w * b[k];
        }
        group_open = true;
        mlp_backward_acc(m.branch, tape_b, og_b, acc);
        acc[n_branch + n_trunk] += w;                  // d(resid^2)/d(output_bias)
        acc[n_branch + n_trunk + 1] += resid * resid;  // loss slot
    }
};

std::vector<int> net_dims(const std::vector<int>& hidden, int latent_dim) {
    std::vector<int> dims = {1};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(latent_dim);
    return dims;
}

}  // namespace

double deeponet_eval(const DeepONetModel& model, double x, double t) {
    const std::vector<double> b = mlp_forward(model.branch, {model.normalizer.norm_t(t)});
    const std::vector<double> tr = mlp_forward(model.trunk, {model.normalizer.norm_x(x)});
    double u = model.output_bias;
    for (int k = 0; k < model.latent_dim; ++k) u += b[k] * tr[k];
    return u;
}

std::size_t deeponet_param_count(const DeepONetModel& model) {
    return param_count(model.branch) + param_count(model.trunk) + 1;
}

void deeponet_params_to(const DeepONetModel& model, double* out) {
    copy_params_to(model.branch, out);
    out += param_count(model.branch);
    copy_params_to(model.trunk, out);
    out += param_count(model.trunk);
    *out = model.output_bias;
}

void deeponet_params_from(DeepONetModel& model, const double* in) {
    copy_params_from(model.branch, in);
    in += param_count(model.branch);
    copy_params_from(model.trunk, in);
    in += param_count(model.trunk);
    model.output_bias = *in;
}

double deeponet_loss_gradient(const DeepONetModel& model, const std::vector<SamplePoint>& samples,
                              std::vector<double>& grad_out) {
    if (samples.empty()) throw std::invalid_argument("deeponet_loss_gradient: no samples");
    if (model.branch.output_dim() != model.latent_dim ||
        model.trunk.output_dim() != model.latent_dim) {
        throw std::invalid_argument("deeponet_loss_gradient: net output dims do not match latent_dim");
    }
    const std::size_t n_params = deeponet_param_count(model);
    std::vector<double> acc(n_params + 1);
    serial_ref::batch_accumulate(samples.size(), n_params + 1, acc.data(), [&]() -> BatchWorker {
        auto worker = std::make_shared<DonWorker>(model);
        return {[worker, &samples](std::size_t i, double* a) { worker->accumulate(samples[i], a); },
                [worker](double* a) { worker->flush(a); }};
    });
    grad_out.resize(n_params);
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (std::size_t k = 0; k < n_params; ++k) grad_out[k] = acc[k] * inv_n;
    return acc[n_params] * inv_n;
}

DeepONetTraining train_deeponet(const SnapshotDataset& ds, const TrainConfig& cfg) {
    if (ds.times.empty() || ds.grid.n_points <= 0)
        throw std::invalid_argument("train_deeponet: empty dataset");
    if (cfg.latent_dim <= 0) throw std::invalid_argument("train_deeponet: latent_dim must be positive");

    const std::vector<int> hidden =
        cfg.hidden_widths.empty() ? std::vector<int>{20, 20, 20} : cfg.hidden_widths;
    const Activation act =
        cfg.activation.empty() ? Activation::sine : parse_activation(cfg.activation);
    const double lr = cfg.learning_rate > 0.0 ? cfg.learning_rate : 1e-3;

    DeepONetTraining result;
    DeepONetModel& model = result.model;
    model.latent_dim = cfg.latent_dim;
    model.normalizer = fit_normalizer(ds);
    // The nets fit the raw field: eval stays the bare inner product + bias and
    // predictions compare against the dataset without a denormalization step.
    model.normalizer.u_shift = 0.0;
    model.normalizer.u_scale = 1.0;
    const std::vector<int> dims = net_dims(hidden, cfg.latent_dim);
    model.branch = init_mlp(dims, act, RngSeed{split_seed(cfg.seed, 1)});
    model.trunk = init_mlp(dims, act, RngSeed{split_seed(cfg.seed, 2)});
    model.output_bias = 0.0;

    const std::vector<SamplePoint> samples = dataset_samples(ds);
    const std::size_t n_params = deeponet_param_count(model);
    std::vector<double> flat(n_params);
    deeponet_params_to(model, flat.data());

    result.loss_history = run_minibatch_adam(
        samples.size(), n_params, flat, cfg.epochs, lr, cfg.batch_size, split_seed(cfg.seed, 0),
        [&](const std::vector<std::size_t>& order, std::size_t base) -> BatchWorker {
            auto worker = std::make_shared<DonWorker>(model);
            return {[worker, &samples, &order, base](std::size_t s, double* acc) {
                        worker->accumulate(samples[order[base + s]], acc);
                    },
                    [worker](double* acc) { worker->flush(acc); }};
        },
        [&]() { deeponet_params_from(model, flat.data()); },
        [&samples](std::vector<std::size_t>& order, std::size_t base, std::size_t len) {
            // Group each batch by grid point so one trunk pass serves every
            // t drawn at the same x.
            std::sort(order.begin() + static_cast<std::ptrdiff_t>(base),
                      order.begin() + static_cast<std::ptrdiff_t>(base + len),
                      [&samples](std::size_t a, std::size_t b) {
                          if (samples[a].x != samples[b].x) return samples[a].x < samples[b].x;
                          return a < b;
                      });
        });
    return result;
}

LatentTrajectory deeponet_latent_series(const DeepONetModel& model,
                                        const std::vector<double>& times) {
    LatentTrajectory traj;
    traj.times = times;
    traj.source = LatentSource::deeponet;
    traj.coords = Matrix(static_cast<int>(times.size()), model.latent_dim);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::vector<double> b = mlp_forward(model.branch, {model.normalizer.norm_t(times[i])});
        for (int k = 0; k < model.latent_dim; ++k) traj.coords(static_cast<int>(i), k) = b[k];
    }
    for (int k = 1; k <= model.latent_dim; ++k) traj.labels.push_back("z" + std::to_string(k));
    return traj;
}

void save_deeponet(const DeepONetModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_deeponet: cannot open '" + path + "' for writing");

    std::vector<int> branch_dims = {model.branch.input_dim()};
    for (const LayerParams& l : model.branch.layers) branch_dims.push_back(l.out_dim());
    std::vector<int> trunk_dims = {model.trunk.input_dim()};
    for (const LayerParams& l : model.trunk.layers) trunk_dims.push_back(l.out_dim());

    std::vector<double> blob(deeponet_param_count(model));
    deeponet_params_to(model, blob.data());

    out << ckpt::kMagic << '\n';
    out << "version " << ckpt::kVersion << '\n';
    out << "kind deeponet\n";
    out << "latent_dim " << model.latent_dim << '\n';
    out << "activation " << activation_name(model.branch.activation) << '\n';
    out << "sine_omega0 " << ckpt::fmt(model.branch.sine_omega0) << '\n';
    out << "branch_dims " << ckpt::fmt_ints(branch_dims) << '\n';
    out << "trunk_dims " << ckpt::fmt_ints(trunk_dims) << '\n';
    ckpt::write_normalizer(out, model.normalizer);
    out << "params " << blob.size() << '\n';
    out << "binary\n";
    ckpt::write_blob(out, blob);
    if (!out) throw std::runtime_error("save_deeponet: write to '" + path + "' failed");
}

DeepONetModel load_deeponet(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_deeponet: cannot open '" + path + "'");
    const auto kv = ckpt::read_header(in, path);

    if (ckpt::parse_double("version", ckpt::require(kv, "version")) != ckpt::kVersion) {
        throw std::runtime_error("load_deeponet: unsupported checkpoint version " +
                                 ckpt::require(kv, "version"));
    }
    if (ckpt::require(kv, "kind") != "deeponet") {
        throw std::runtime_error("load_deeponet: '" + path + "' holds a '" +
                                 ckpt::require(kv, "kind") + "' checkpoint, not deeponet");
    }

    DeepONetModel model;
    model.latent_dim =
        static_cast<int>(ckpt::parse_double("latent_dim", ckpt::require(kv, "latent_dim")));
    const Activation act = parse_activation(ckpt::require(kv, "activation"));
    const double omega0 = ckpt::parse_double("sine_omega0", ckpt::require(kv, "sine_omega0"));
    const std::vector<int> branch_dims = ckpt::parse_ints("branch_dims", ckpt::require(kv, "branch_dims"));
    const std::vector<int> trunk_dims = ckpt::parse_ints("trunk_dims", ckpt::require(kv, "trunk_dims"));
    model.normalizer = ckpt::read_normalizer(kv);

    model.branch = init_mlp(branch_dims, act, RngSeed{0});
    model.trunk = init_mlp(trunk_dims, act, RngSeed{0});
    model.branch.sine_omega0 = omega0;
    model.trunk.sine_omega0 = omega0;
    if (model.branch.output_dim() != model.latent_dim ||
        model.trunk.output_dim() != model.latent_dim) {
        throw std::runtime_error("load_deeponet: net dims do not match latent_dim in '" + path + "'");
    }

    const std::size_t n_params =
        static_cast<std::size_t>(ckpt::parse_double("params", ckpt::require(kv, "params")));
    if (n_params != deeponet_param_count(model)) {
        throw std::runtime_error("load_deeponet: parameter count mismatch in '" + path + "'");
    }
    const std::vector<double> blob = ckpt::read_blob(in, n_params, path);
    deeponet_params_from(model, blob.data());
    return model;
}

}  // namespace latentflow
