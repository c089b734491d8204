#include "latentflow/nif.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace latentflow {
namespace {

// Per-worker scratch.  The ParameterNet pass and the generated ShapeNet are
// cached per time value: consecutive samples sharing a t reuse them, which is
// what makes snapshot-grouped batches cheap.  The backward pass defers the
// expansion/ParameterNet chain the same way: ShapeNet gradients accumulate
// into dtheta across a run of equal t, and flush() applies the chain (which
// is linear in dtheta) once per run, so the full-width accumulator is touched
// per run instead of per sample.  Flush points — a changed t or the end of a
// kernel block — depend only on the sample order, keeping the reduction
// deterministic.
struct NifWorker {
    const NIFModel* model;
    MLPParams shape;
    ForwardTape tape_p, tape_s;
    std::vector<double> in_t = {0.0}, in_x = {0.0};
    std::vector<double> theta, dtheta, dz;
    std::vector<double> og_s = {0.0};
    std::size_t n_pn;     // ParameterNet slot count at the front of acc
    std::size_t n_total;  // all trainable parameters; acc[n_total] is the loss slot
    double cached_t = 0.0;
    bool has_cache = false;
    bool group_open = false;  // dtheta holds deferred gradients for cached_t

    explicit NifWorker(const NIFModel& m)
        : model(&m),
          shape(make_shape_net(m.shape_arch, m.expansion_biases.data())),
          theta(m.expansion_biases.size()),
          dtheta(m.expansion_biases.size(), 0.0),
          dz(static_cast<std::size_t>(m.latent_dim)),
          n_pn(param_count(m.parameter_net)),
          n_total(nif_param_count(m)) {}

    // ParameterNet pass + expansion for this t (cached).  Callers on the
    // gradient path must flush the open group before t changes, because the
    // deferred chain reads this tape.
    void prepare(double t) {
        if (has_cache && cached_t == t) return;
        const NIFModel& m = *model;
        in_t[0] = m.normalizer.norm_t(t);
        mlp_forward_into(m.parameter_net, in_t, tape_p);
        const std::vector<double>& z = tape_p.post.back();
        const std::size_t n_shape = theta.size();
        for (std::size_t i = 0; i < n_shape; ++i) {
            double acc = m.expansion_biases[i];
            const double* w_row = m.expansion_weights.data.data() + i * static_cast<std::size_t>(m.latent_dim);
            for (int k = 0; k < m.latent_dim; ++k) acc += w_row[k] * z[static_cast<std::size_t>(k)];
            theta[i] = acc;
        }
        copy_params_from(shape, theta.data());
        cached_t = t;
        has_cache = true;
    }

    // ShapeNet pass at x using the prepared weights; keeps the tape.
    double forward(double x, double t) {
        prepare(t);
        in_x[0] = model->normalizer.norm_x(x);
        mlp_forward_into(shape, in_x, tape_s);
        return tape_s.post.back()[0];
    }

    // Defers d(dldu * u)/d(theta) into the open group.  Requires a preceding
    // forward() for this sample and a begin_sample() before that.
    void defer_backward(double dldu) {
        og_s[0] = dldu;
        mlp_backward_acc(shape, tape_s, og_s, dtheta.data());
        group_open = true;
    }

    // Ends the open group when this sample's t differs; call before forward().
    void begin_sample(double t, double* acc) {
        if (group_open && t != cached_t) flush(acc);
    }

    // Applies the deferred chain: dz = E^T dtheta, expansion grads
    // (dtheta z^T into the weight slots, dtheta into the bias slots), and the
    // ParameterNet backward pass, all into acc[0 .. nif_param_count).
    void flush(double* acc) {
        if (!group_open) return;
        const NIFModel& m = *model;
        const std::size_t n_shape = dtheta.size();
        const int r = m.latent_dim;
        const std::vector<double>& z = tape_p.post.back();
        double* acc_w = acc + n_pn;
        double* acc_b = acc_w + n_shape * static_cast<std::size_t>(r);
        std::fill(dz.begin(), dz.end(), 0.0);
        for (std::size_t row = 0; row < n_shape; ++row) {
            const double d = dtheta[row];
            const double* w_row = m.expansion_weights.data.data() + row * static_cast<std::size_t>(r);
            double* g_row = acc_w + row * static_cast<std::size_t>(r);
            for (int k = 0; k < r; ++k) {
                dz[static_cast<std::size_t>(k)] += w_row[k] * d;
                g_row[k] += d * z[static_cast<std::size_t>(k)];
            }
            acc_b[row] += d;
        }
        mlp_backward_acc(m.parameter_net, tape_p, dz, acc);
        std::fill(dtheta.begin(), dtheta.end(), 0.0);
        group_open = false;
    }

    // MSE contribution: gradient of the squared residual plus the loss slot.
    void accumulate_sample(const SamplePoint& s, double* acc) {
        begin_sample(s.t, acc);
        const double resid = forward(s.x, s.t) - s.u;
        defer_backward(2.0 * resid);
        acc[n_total] += resid * resid;
    }
};

void validate_model(const NIFModel& m, const char* who) {
    const int n_shape = shape_param_count(m.shape_arch);
    if (m.latent_dim <= 0) throw std::invalid_argument(std::string(who) + ": latent_dim must be positive");
    if (m.parameter_net.output_dim() != m.latent_dim)
        throw std::invalid_argument(std::string(who) + ": parameter_net output dim != latent_dim");
    if (m.expansion_weights.rows != n_shape || m.expansion_weights.cols != m.latent_dim)
        throw std::invalid_argument(std::string(who) + ": expansion weight shape mismatch");
    if (m.expansion_biases.size() != static_cast<std::size_t>(n_shape))
        throw std::invalid_argument(std::string(who) + ": expansion bias length mismatch");
}

}  // namespace

std::vector<int> shape_net_dims(const ShapeNetArch& arch) {
    std::vector<int> dims = {arch.input_dim};
    dims.insert(dims.end(), arch.hidden.begin(), arch.hidden.end());
    dims.push_back(arch.output_dim);
    return dims;
}

int shape_param_count(const ShapeNetArch& arch) {
    const std::vector<int> dims = shape_net_dims(arch);
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("shape_param_count: dims must be positive");
    }
    int n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
    return n;
}

MLPParams make_shape_net(const ShapeNetArch& arch, const double* theta) {
    MLPParams net;
    net.activation = arch.activation;
    const std::vector<int> dims = shape_net_dims(arch);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        net.layers.push_back(
            {Matrix(dims[l + 1], dims[l]), std::vector<double>(static_cast<std::size_t>(dims[l + 1]))});
    }
    copy_params_from(net, theta);
    return net;
}

NIFModel init_nif(const ShapeNetArch& arch, const std::vector<int>& param_hidden, int latent_dim,
                  RngSeed seed) {
    if (latent_dim <= 0) throw std::invalid_argument("init_nif: latent_dim must be positive");
    NIFModel m;
    m.shape_arch = arch;
    m.latent_dim = latent_dim;

    std::vector<int> param_dims = {1};
    param_dims.insert(param_dims.end(), param_hidden.begin(), param_hidden.end());
    param_dims.push_back(latent_dim);
    m.parameter_net = init_mlp(param_dims, arch.activation, RngSeed{split_seed(seed.seed, 1)});

    const int n_shape = shape_param_count(arch);
    // Static decoder start: biases carry a conventionally initialized
    // ShapeNet; the near-zero weights let the latent coupling grow gradually.
    const MLPParams shape0 =
        init_mlp(shape_net_dims(arch), arch.activation, RngSeed{split_seed(seed.seed, 2)});
    m.expansion_biases.resize(static_cast<std::size_t>(n_shape));
    copy_params_to(shape0, m.expansion_biases.data());

    Rng rng((RngSeed{split_seed(seed.seed, 3)}));
    m.expansion_weights = Matrix(n_shape, latent_dim);
    for (double& w : m.expansion_weights.data) w = rng.uniform(-1e-3, 1e-3);
    return m;
}

NifEval nif_eval(const NIFModel& model, double x, double t) {
    validate_model(model, "nif_eval");
    NifWorker worker(model);
    NifEval out;
    out.u = worker.forward(x, t);
    out.latent = worker.tape_p.post.back();
    return out;
}

std::size_t nif_param_count(const NIFModel& model) {
    return param_count(model.parameter_net) + model.expansion_weights.data.size() +
           model.expansion_biases.size();
}

void nif_params_to(const NIFModel& model, double* out) {
    copy_params_to(model.parameter_net, out);
    out += param_count(model.parameter_net);
    for (double w : model.expansion_weights.data) *out++ = w;
    for (double b : model.expansion_biases) *out++ = b;
}

void nif_params_from(NIFModel& model, const double* in) {
    copy_params_from(model.parameter_net, in);
    in += param_count(model.parameter_net);
    for (double& w : model.expansion_weights.data) w = *in++;
    for (double& b : model.expansion_biases) b = *in++;
}

NifGradients nif_backward(const NIFModel& model, const std::vector<SamplePoint>& batch,
                          const std::vector<double>& loss_grads) {
    validate_model(model, "nif_backward");
    if (batch.size() != loss_grads.size())
        throw std::invalid_argument("nif_backward: batch and loss_grads lengths differ");

    const std::size_t n_params = nif_param_count(model);
    std::vector<double> acc(n_params, 0.0);
    NifWorker worker(model);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        worker.begin_sample(batch[i].t, acc.data());
        worker.forward(batch[i].x, batch[i].t);
        worker.defer_backward(loss_grads[i]);
    }
    worker.flush(acc.data());

    NifGradients grads;
    grads.parameter_net = model.parameter_net;  // copy for shape, then overwrite
    copy_params_from(grads.parameter_net, acc.data());
    const double* p = acc.data() + param_count(model.parameter_net);
    grads.expansion_weights = Matrix(model.expansion_weights.rows, model.expansion_weights.cols);
    for (double& w : grads.expansion_weights.data) w = *p++;
    grads.expansion_biases.resize(model.expansion_biases.size());
    for (double& b : grads.expansion_biases) b = *p++;
    return grads;
}

double nif_loss_gradient(const NIFModel& model, const std::vector<SamplePoint>& samples,
                         std::vector<double>& grad_out) {
    validate_model(model, "nif_loss_gradient");
    if (samples.empty()) throw std::invalid_argument("nif_loss_gradient: no samples");

    const std::size_t n_params = nif_param_count(model);
    std::vector<double> acc(n_params + 1);
    serial_ref::batch_accumulate(samples.size(), n_params + 1, acc.data(), [&]() -> BatchWorker {
        auto worker = std::make_shared<NifWorker>(model);
        return {[worker, &samples](std::size_t i, double* a) {
                    worker->accumulate_sample(samples[i], a);
                },
                [worker](double* a) { worker->flush(a); }};
    });
    grad_out.resize(n_params);
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (std::size_t k = 0; k < n_params; ++k) grad_out[k] = acc[k] * inv_n;
    return acc[n_params] * inv_n;
}

NifTraining train_nif(const SnapshotDataset& ds, const TrainConfig& cfg) {
    if (ds.times.empty() || ds.grid.n_points <= 0)
        throw std::invalid_argument("train_nif: empty dataset");
    if (cfg.latent_dim <= 0) throw std::invalid_argument("train_nif: latent_dim must be positive");

    const std::vector<int> hidden =
        cfg.hidden_widths.empty() ? std::vector<int>{30, 30} : cfg.hidden_widths;
    ShapeNetArch arch;
    arch.hidden = hidden;
    arch.activation = cfg.activation.empty() ? Activation::swish : parse_activation(cfg.activation);
    const double lr = cfg.learning_rate > 0.0 ? cfg.learning_rate : 5e-3;

    NifTraining result;
    NIFModel& model = result.model;
    model = init_nif(arch, hidden, cfg.latent_dim, RngSeed{cfg.seed});
    model.normalizer = fit_normalizer(ds);
    // The nets fit the raw field: predictions compare against the dataset
    // without a denormalization step.
    model.normalizer.u_shift = 0.0;
    model.normalizer.u_scale = 1.0;

    const std::vector<SamplePoint> samples = dataset_samples(ds);
    const std::size_t n_params = nif_param_count(model);
    std::vector<double> flat(n_params);
    nif_params_to(model, flat.data());

    result.loss_history = run_minibatch_adam(
        samples.size(), n_params, flat, cfg.epochs, lr, cfg.batch_size, split_seed(cfg.seed, 0),
        [&](const std::vector<std::size_t>& order, std::size_t base) -> BatchWorker {
            auto worker = std::make_shared<NifWorker>(model);
            return {[worker, &samples, &order, base](std::size_t s, double* acc) {
                        worker->accumulate_sample(samples[order[base + s]], acc);
                    },
                    [worker](double* acc) { worker->flush(acc); }};
        },
        [&]() { nif_params_from(model, flat.data()); },
        [](std::vector<std::size_t>& order, std::size_t base, std::size_t len) {
            // Group each batch by snapshot so one ParameterNet pass and one
            // expansion serve every x drawn from the same time.
            std::sort(order.begin() + static_cast<std::ptrdiff_t>(base),
                      order.begin() + static_cast<std::ptrdiff_t>(base + len));
        });
    return result;
}

LatentTrajectory nif_latent_series(const NIFModel& model, const std::vector<double>& times) {
    LatentTrajectory traj;
    traj.times = times;
    traj.source = LatentSource::nif;
    traj.coords = Matrix(static_cast<int>(times.size()), model.latent_dim);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::vector<double> z =
            mlp_forward(model.parameter_net, {model.normalizer.norm_t(times[i])});
        for (int k = 0; k < model.latent_dim; ++k) traj.coords(static_cast<int>(i), k) = z[k];
    }
    for (int k = 1; k <= model.latent_dim; ++k) traj.labels.push_back("z" + std::to_string(k));
    return traj;
}

void save_nif(const NIFModel& model, const std::string& path) {
    validate_model(model, "save_nif");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_nif: cannot open '" + path + "' for writing");

    std::vector<int> param_dims = {model.parameter_net.input_dim()};
    for (const LayerParams& l : model.parameter_net.layers) param_dims.push_back(l.out_dim());

    std::vector<double> blob(nif_param_count(model));
    nif_params_to(model, blob.data());

    out << ckpt::kMagic << '\n';
    out << "version " << ckpt::kVersion << '\n';
    out << "kind nif\n";
    out << "latent_dim " << model.latent_dim << '\n';
    out << "activation " << activation_name(model.shape_arch.activation) << '\n';
    out << "sine_omega0 " << ckpt::fmt(model.parameter_net.sine_omega0) << '\n';
    out << "param_net_dims " << ckpt::fmt_ints(param_dims) << '\n';
    out << "shape_dims " << ckpt::fmt_ints(shape_net_dims(model.shape_arch)) << '\n';
    ckpt::write_normalizer(out, model.normalizer);
    out << "params " << blob.size() << '\n';
    out << "binary\n";
    ckpt::write_blob(out, blob);
    if (!out) throw std::runtime_error("save_nif: write to '" + path + "' failed");
}

NIFModel load_nif(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_nif: cannot open '" + path + "'");
    const auto kv = ckpt::read_header(in, path);

    if (ckpt::parse_double("version", ckpt::require(kv, "version")) != ckpt::kVersion) {
        throw std::runtime_error("load_nif: unsupported checkpoint version " +
                                 ckpt::require(kv, "version"));
    }
    if (ckpt::require(kv, "kind") != "nif") {
        throw std::runtime_error("load_nif: '" + path + "' holds a '" + ckpt::require(kv, "kind") +
                                 "' checkpoint, not nif");
    }

    const int latent_dim =
        static_cast<int>(ckpt::parse_double("latent_dim", ckpt::require(kv, "latent_dim")));
    const Activation act = parse_activation(ckpt::require(kv, "activation"));
    const double omega0 = ckpt::parse_double("sine_omega0", ckpt::require(kv, "sine_omega0"));
    const std::vector<int> param_dims =
        ckpt::parse_ints("param_net_dims", ckpt::require(kv, "param_net_dims"));
    const std::vector<int> shape_dims_v = ckpt::parse_ints("shape_dims", ckpt::require(kv, "shape_dims"));
    if (shape_dims_v.size() < 2) {
        throw std::runtime_error("load_nif: shape_dims needs at least input and output entries");
    }

    NIFModel model;
    model.latent_dim = latent_dim;
    model.shape_arch.input_dim = shape_dims_v.front();
    model.shape_arch.hidden.assign(shape_dims_v.begin() + 1, shape_dims_v.end() - 1);
    model.shape_arch.output_dim = shape_dims_v.back();
    model.shape_arch.activation = act;
    model.parameter_net = init_mlp(param_dims, act, RngSeed{0});
    model.parameter_net.sine_omega0 = omega0;
    model.normalizer = ckpt::read_normalizer(kv);

    const int n_shape = shape_param_count(model.shape_arch);
    model.expansion_weights = Matrix(n_shape, latent_dim);
    model.expansion_biases.resize(static_cast<std::size_t>(n_shape));
    validate_model(model, "load_nif");

    const std::size_t n_params =
        static_cast<std::size_t>(ckpt::parse_double("params", ckpt::require(kv, "params")));
    if (n_params != nif_param_count(model)) {
        throw std::runtime_error("load_nif: parameter count mismatch in '" + path + "'");
    }
    const std::vector<double> blob = ckpt::read_blob(in, n_params, path);
    nif_params_from(model, blob.data());
    return model;
}

}  // namespace latentflow
