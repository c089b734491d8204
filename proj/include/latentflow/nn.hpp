#pragma once
// Dense-network substrate: parameter containers, activations, tape-based
// forward/backward passes, Adam, and seeded initialization.  Networks here
// are tiny (tens of units); everything is double precision and every random
// draw goes through the project Rng so training runs are bit-reproducible.

#include <cstddef>
#include <string>
#include <vector>

#include "latentflow/core.hpp"
#include "latentflow/rng.hpp"

namespace latentflow {

enum class Activation { swish, sine, tanh_fn, identity };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

// sine uses sin(omega * z); other kinds ignore omega.
double activation_eval(Activation kind, double z, double omega = 1.0);
double activation_grad(Activation kind, double z, double omega = 1.0);

struct LayerParams {
    Matrix weights;              // out_dim x in_dim
    std::vector<double> biases;  // out_dim

    int in_dim() const { return weights.cols; }
    int out_dim() const { return weights.rows; }
};

// A multilayer perceptron with one hidden activation kind; the final layer is
// always linear.  For sine networks the first layer runs at frequency
// sine_omega0 and deeper layers at 1 (the usual periodic-representation
// convention).
struct MLPParams {
    std::vector<LayerParams> layers;
    Activation activation = Activation::swish;
    double sine_omega0 = 30.0;

    int input_dim() const { return layers.front().in_dim(); }
    int output_dim() const { return layers.back().out_dim(); }
    // Activation frequency applied after layer l (identity for the last).
    double omega_at(std::size_t l) const {
        return (activation == Activation::sine && l == 0) ? sine_omega0 : 1.0;
    }
};

// Pre- and post-activation values of one forward pass, consumed by backward.
// The activation slope is recorded alongside the value because the two share
// one transcendental evaluation; backward then multiplies instead of calling
// exp/cos again.
struct ForwardTape {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;       // z_l = W_l a_{l-1} + b_l
    std::vector<std::vector<double>> post;      // a_l = act(z_l); back() is the output
    std::vector<std::vector<double>> act_grad;  // act'(z_l); empty where act is skipped
};

// Evaluates the network; fills `tape` when non-null.
std::vector<double> mlp_forward(const MLPParams& params, const std::vector<double>& input,
                                ForwardTape* tape = nullptr);

// Allocation-free variant for hot loops: runs the forward pass entirely in
// the tape's buffers; the output is tape.post.back().
void mlp_forward_into(const MLPParams& params, const std::vector<double>& input,
                      ForwardTape& tape);

// Reverse-mode gradients of the scalar contraction <output, output_grad>.
// Returns parameter gradients in an MLPParams of matching shape plus the
// gradient with respect to the input.
struct BackwardResult {
    MLPParams param_grads;
    std::vector<double> input_grad;
};
BackwardResult mlp_backward(const MLPParams& params, const ForwardTape& tape,
                            const std::vector<double>& output_grad);

// Allocation-free variant for hot loops: shapes `result` to match `params` on
// first use and reuses its storage afterwards.
void mlp_backward(const MLPParams& params, const ForwardTape& tape,
                  const std::vector<double>& output_grad, BackwardResult& result);

// Batched-trainer variants: parameter gradients go directly into
// out[0 .. param_count) in flat copy_params_to order, with no staging
// matrices.  _into assigns, _acc adds.  The input gradient is not formed.
void mlp_backward_into(const MLPParams& params, const ForwardTape& tape,
                       const std::vector<double>& output_grad, double* out);
void mlp_backward_acc(const MLPParams& params, const ForwardTape& tape,
                      const std::vector<double>& output_grad, double* out);

// dims = {in, hidden..., out}.  Glorot-uniform weights and zero biases for
// swish/tanh/identity; sine networks use the periodic-representation scheme:
// first layer U(-1/in, 1/in), deeper layers U(+-sqrt(6/in)), biases
// U(+-1/sqrt(in)).
MLPParams init_mlp(const std::vector<int>& dims, Activation act, RngSeed seed);

// Flat parameter order: per layer, weights row-major then biases.
std::size_t param_count(const MLPParams& params);
void copy_params_to(const MLPParams& params, double* out);
void copy_params_from(MLPParams& params, const double* in);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam_state(std::size_t n_params);

// One bias-corrected Adam update of `params` in place.  Non-finite gradient
// entries are rejected with the offending index in the message.
void adam_step(double* params, const double* grads, std::size_t n, AdamState& state,
               double learning_rate);

}  // namespace latentflow
