#include "latentflow/nn.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace latentflow {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_vector_dim(const char* what, std::size_t got, std::size_t want) {
    if (got != want) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s has length %zu, expected %zu", what, got, want);
        throw std::invalid_argument(buf);
    }
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::swish: return "swish";
        case Activation::sine: return "sine";
        case Activation::tanh_fn: return "tanh";
        case Activation::identity: return "identity";
    }
    throw std::logic_error("unknown activation enum value");
}

Activation parse_activation(const std::string& name) {
    if (name == "swish") return Activation::swish;
    if (name == "sine") return Activation::sine;
    if (name == "tanh") return Activation::tanh_fn;
    if (name == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + name +
                                "' (expected swish, sine, tanh, or identity)");
}

double activation_eval(Activation kind, double z, double omega) {
    switch (kind) {
        case Activation::swish: return z * sigmoid(z);
        case Activation::sine: return std::sin(omega * z);
        case Activation::tanh_fn: return std::tanh(z);
        case Activation::identity: return z;
    }
    throw std::logic_error("unknown activation enum value");
}

double activation_grad(Activation kind, double z, double omega) {
    switch (kind) {
        case Activation::swish: {
            double s = sigmoid(z);
            return s * (1.0 + z * (1.0 - s));
        }
        case Activation::sine: return omega * std::cos(omega * z);
        case Activation::tanh_fn: {
            double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::identity: return 1.0;
    }
    throw std::logic_error("unknown activation enum value");
}

void mlp_forward_into(const MLPParams& params, const std::vector<double>& input,
                      ForwardTape& tape) {
    if (params.layers.empty()) throw std::invalid_argument("network has no layers");
    check_vector_dim("network input", input.size(), static_cast<std::size_t>(params.input_dim()));

    tape.input = input;
    // resize (not assign) so the inner vectors keep their capacity when a
    // tape is reused across samples.
    const std::size_t n_layers = params.layers.size();
    tape.pre.resize(n_layers);
    tape.post.resize(n_layers);
    tape.act_grad.resize(n_layers);

    const std::vector<double>* cur = &tape.input;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const LayerParams& layer = params.layers[l];
        if (static_cast<std::size_t>(layer.in_dim()) != cur->size()) {
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        " input width does not match previous layer");
        }
        const int out_dim = layer.out_dim();
        std::vector<double>& z = tape.pre[l];
        z.resize(static_cast<std::size_t>(out_dim));
        for (int r = 0; r < out_dim; ++r) {
            double acc = layer.biases[static_cast<std::size_t>(r)];
            const double* w_row = layer.weights.data.data() +
                                  static_cast<std::size_t>(r) * layer.weights.cols;
            for (int c = 0; c < layer.weights.cols; ++c) {
                acc += w_row[c] * (*cur)[static_cast<std::size_t>(c)];
            }
            z[static_cast<std::size_t>(r)] = acc;
        }

        std::vector<double>& a = tape.post[l];
        std::vector<double>& g = tape.act_grad[l];
        const bool last = (l + 1 == n_layers);
        if (!last && params.activation != Activation::identity) {
            // Value and slope in one sweep; each unit pays for its
            // transcendental once and backward reuses the recorded slope.
            const double omega = params.omega_at(l);
            a.resize(static_cast<std::size_t>(out_dim));
            g.resize(static_cast<std::size_t>(out_dim));
            switch (params.activation) {
                case Activation::swish:
                    for (int r = 0; r < out_dim; ++r) {
                        const double zr = z[static_cast<std::size_t>(r)];
                        const double s = sigmoid(zr);
                        a[static_cast<std::size_t>(r)] = zr * s;
                        g[static_cast<std::size_t>(r)] = s * (1.0 + zr * (1.0 - s));
                    }
                    break;
                case Activation::sine:
                    for (int r = 0; r < out_dim; ++r) {
                        double sv, cv;
                        ::sincos(omega * z[static_cast<std::size_t>(r)], &sv, &cv);
                        a[static_cast<std::size_t>(r)] = sv;
                        g[static_cast<std::size_t>(r)] = omega * cv;
                    }
                    break;
                case Activation::tanh_fn:
                    for (int r = 0; r < out_dim; ++r) {
                        const double t = std::tanh(z[static_cast<std::size_t>(r)]);
                        a[static_cast<std::size_t>(r)] = t;
                        g[static_cast<std::size_t>(r)] = 1.0 - t * t;
                    }
                    break;
                case Activation::identity: break;  // excluded above
            }
        } else {
            a = z;
            g.clear();
        }
        cur = &a;
    }
}

std::vector<double> mlp_forward(const MLPParams& params, const std::vector<double>& input,
                                ForwardTape* tape) {
    if (tape) {
        mlp_forward_into(params, input, *tape);
        return tape->post.back();
    }
    ForwardTape scratch;
    mlp_forward_into(params, input, scratch);
    return std::move(scratch.post.back());
}

void mlp_backward(const MLPParams& params, const ForwardTape& tape,
                  const std::vector<double>& output_grad, BackwardResult& result) {
    const std::size_t n_layers = params.layers.size();
    if (tape.pre.size() != n_layers || tape.post.size() != n_layers ||
        tape.act_grad.size() != n_layers) {
        throw std::invalid_argument("forward tape does not match network depth");
    }
    check_vector_dim("output gradient", output_grad.size(),
                     static_cast<std::size_t>(params.output_dim()));

    result.param_grads.activation = params.activation;
    result.param_grads.sine_omega0 = params.sine_omega0;
    result.param_grads.layers.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const LayerParams& layer = params.layers[l];
        LayerParams& grad = result.param_grads.layers[l];
        if (grad.weights.rows != layer.out_dim() || grad.weights.cols != layer.in_dim()) {
            grad.weights = Matrix(layer.out_dim(), layer.in_dim());
        }
        grad.biases.resize(static_cast<std::size_t>(layer.out_dim()));
    }

    // delta = d(loss)/d(pre-activation of layer l), walked backwards.
    std::vector<double> delta = output_grad;
    std::vector<double> prev_delta;
    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerParams& layer = params.layers[l];
        const std::vector<double>& slope = tape.act_grad[l];
        for (std::size_t r = 0; r < slope.size(); ++r) delta[r] *= slope[r];

        const std::vector<double>& below = (l == 0) ? tape.input : tape.post[l - 1];
        LayerParams& grad = result.param_grads.layers[l];
        for (int r = 0; r < layer.out_dim(); ++r) {
            const double d = delta[static_cast<std::size_t>(r)];
            grad.biases[static_cast<std::size_t>(r)] = d;
            double* g_row = grad.weights.data.data() +
                            static_cast<std::size_t>(r) * grad.weights.cols;
            for (int c = 0; c < layer.in_dim(); ++c) g_row[c] = d * below[static_cast<std::size_t>(c)];
        }

        // Propagate to the layer below: prev_delta = W^T delta.
        prev_delta.assign(static_cast<std::size_t>(layer.in_dim()), 0.0);
        for (int r = 0; r < layer.out_dim(); ++r) {
            const double d = delta[static_cast<std::size_t>(r)];
            const double* w_row = layer.weights.data.data() +
                                  static_cast<std::size_t>(r) * layer.weights.cols;
            for (int c = 0; c < layer.in_dim(); ++c) prev_delta[static_cast<std::size_t>(c)] += w_row[c] * d;
        }
        delta.swap(prev_delta);
    }
    result.input_grad = std::move(delta);
}

BackwardResult mlp_backward(const MLPParams& params, const ForwardTape& tape,
                            const std::vector<double>& output_grad) {
    BackwardResult result;
    mlp_backward(params, tape, output_grad, result);
    return result;
}

namespace {

template <bool Accumulate>
void backward_flat(const MLPParams& params, const ForwardTape& tape,
                   const std::vector<double>& output_grad, double* out) {
    const std::size_t n_layers = params.layers.size();
    if (tape.pre.size() != n_layers || tape.post.size() != n_layers ||
        tape.act_grad.size() != n_layers) {
        throw std::invalid_argument("forward tape does not match network depth");
    }
    check_vector_dim("output gradient", output_grad.size(),
                     static_cast<std::size_t>(params.output_dim()));

    std::vector<double> delta = output_grad;
    std::vector<double> prev_delta;
    std::size_t layer_end = param_count(params);
    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerParams& layer = params.layers[l];
        const std::vector<double>& slope = tape.act_grad[l];
        for (std::size_t r = 0; r < slope.size(); ++r) delta[r] *= slope[r];

        const std::vector<double>& below = (l == 0) ? tape.input : tape.post[l - 1];
        const std::size_t n_here = layer.weights.data.size() + layer.biases.size();
        double* w_out = out + (layer_end - n_here);
        double* b_out = w_out + layer.weights.data.size();
        layer_end -= n_here;
        for (int r = 0; r < layer.out_dim(); ++r) {
            const double d = delta[static_cast<std::size_t>(r)];
            if (Accumulate) b_out[r] += d; else b_out[r] = d;
            double* g_row = w_out + static_cast<std::size_t>(r) * layer.weights.cols;
            for (int c = 0; c < layer.in_dim(); ++c) {
                const double g = d * below[static_cast<std::size_t>(c)];
                if (Accumulate) g_row[c] += g; else g_row[c] = g;
            }
        }

        if (l == 0) break;  // the input gradient is not needed
        prev_delta.assign(static_cast<std::size_t>(layer.in_dim()), 0.0);
        for (int r = 0; r < layer.out_dim(); ++r) {
            const double d = delta[static_cast<std::size_t>(r)];
            const double* w_row = layer.weights.data.data() +
                                  static_cast<std::size_t>(r) * layer.weights.cols;
            for (int c = 0; c < layer.in_dim(); ++c) prev_delta[static_cast<std::size_t>(c)] += w_row[c] * d;
        }
        delta.swap(prev_delta);
    }
}

}  // namespace

void mlp_backward_into(const MLPParams& params, const ForwardTape& tape,
                       const std::vector<double>& output_grad, double* out) {
    backward_flat<false>(params, tape, output_grad, out);
}

void mlp_backward_acc(const MLPParams& params, const ForwardTape& tape,
                      const std::vector<double>& output_grad, double* out) {
    backward_flat<true>(params, tape, output_grad, out);
}

MLPParams init_mlp(const std::vector<int>& dims, Activation act, RngSeed seed) {
    if (dims.size() < 2) throw std::invalid_argument("init_mlp needs at least input and output dims");
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("init_mlp dims must be positive");
    }

    Rng rng(seed);
    MLPParams params;
    params.activation = act;
    params.layers.resize(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l];
        const int out = dims[l + 1];
        LayerParams& layer = params.layers[l];
        layer.weights = Matrix(out, in);
        layer.biases.assign(static_cast<std::size_t>(out), 0.0);

        double w_bound;
        if (act == Activation::sine) {
            // Periodic-representation scheme: the first layer stays narrow so
            // omega0 sets the frequency scale, deeper layers widen by
            // sqrt(6/in) and biases spread the phases.
            w_bound = (l == 0) ? 1.0 / in : std::sqrt(6.0 / in);
        } else {
            w_bound = std::sqrt(6.0 / (in + out));  // Glorot uniform
        }
        for (double& w : layer.weights.data) w = rng.uniform(-w_bound, w_bound);
        if (act == Activation::sine) {
            const double b_bound = 1.0 / std::sqrt(static_cast<double>(in));
            for (double& b : layer.biases) b = rng.uniform(-b_bound, b_bound);
        }
    }
    return params;
}

std::size_t param_count(const MLPParams& params) {
    std::size_t n = 0;
    for (const LayerParams& layer : params.layers) {
        n += layer.weights.data.size() + layer.biases.size();
    }
    return n;
}

void copy_params_to(const MLPParams& params, double* out) {
    for (const LayerParams& layer : params.layers) {
        for (double w : layer.weights.data) *out++ = w;
        for (double b : layer.biases) *out++ = b;
    }
}

void copy_params_from(MLPParams& params, const double* in) {
    for (LayerParams& layer : params.layers) {
        for (double& w : layer.weights.data) w = *in++;
        for (double& b : layer.biases) b = *in++;
    }
}

AdamState make_adam_state(std::size_t n_params) {
    AdamState state;
    state.first_moment.assign(n_params, 0.0);
    state.second_moment.assign(n_params, 0.0);
    return state;
}

void adam_step(double* params, const double* grads, std::size_t n, AdamState& state,
               double learning_rate) {
    check_vector_dim("Adam first-moment buffer", state.first_moment.size(), n);
    check_vector_dim("Adam second-moment buffer", state.second_moment.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grads[i])) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "non-finite gradient at parameter %zu: %g", i,
                          grads[i]);
            throw std::runtime_error(buf);
        }
    }

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
        v = state.beta2 * v + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

}  // namespace latentflow
