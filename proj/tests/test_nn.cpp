#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "latentflow/nn.hpp"
#include "latentflow/rng.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

// Independent straight-line evaluation of a network, written against the
// documented semantics rather than sharing code with mlp_forward.
std::vector<double> naive_forward(const MLPParams& p, std::vector<double> a) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const LayerParams& layer = p.layers[l];
        std::vector<double> z(layer.biases);
        for (int r = 0; r < layer.out_dim(); ++r) {
            for (int c = 0; c < layer.in_dim(); ++c) z[r] += layer.weights(r, c) * a[c];
        }
        if (l + 1 < p.layers.size()) {
            const double omega = p.omega_at(l);
            for (double& v : z) v = activation_eval(p.activation, v, omega);
        }
        a = z;
    }
    return a;
}

std::vector<double> flatten(const MLPParams& p) {
    std::vector<double> flat(param_count(p));
    copy_params_to(p, flat.data());
    return flat;
}

// Checks every parameter gradient and every input gradient of the contraction
// sum_k coeffs[k] * output[k] against central differences.
void check_gradients(MLPParams& net, std::vector<double>& input,
                     const std::vector<double>& coeffs, double h, double tol) {
    auto eval = [&]() {
        std::vector<double> out = mlp_forward(net, input);
        double acc = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) acc += coeffs[k] * out[k];
        return acc;
    };

    ForwardTape tape;
    mlp_forward(net, input, &tape);
    BackwardResult back = mlp_backward(net, tape, coeffs);

    std::vector<double> analytic = flatten(back.param_grads);
    std::vector<double> theta = flatten(net);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        copy_params_from(net, theta.data());
        const double fp = eval();
        theta[i] = saved - h;
        copy_params_from(net, theta.data());
        const double fm = eval();
        theta[i] = saved;
        copy_params_from(net, theta.data());
        const double fd = (fp - fm) / (2.0 * h);
        const double scale = std::max(std::abs(analytic[i]), 1.0);
        CHECK(std::abs(analytic[i] - fd) <= tol * scale);
    }
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double fd = oracles::central_diff(eval, input[i], h);
        const double scale = std::max(std::abs(back.input_grad[i]), 1.0);
        CHECK(std::abs(back.input_grad[i] - fd) <= tol * scale);
    }
}

}  // namespace

TEST_CASE("activation values and derivatives at hand-checked points") {
    CHECK(activation_eval(Activation::swish, 0.0) == 0.0);
    CHECK(activation_grad(Activation::swish, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    // swish(1) = 1 * sigmoid(1)
    CHECK(activation_eval(Activation::swish, 1.0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));

    CHECK(activation_eval(Activation::sine, 0.0, 30.0) == 0.0);
    CHECK(activation_grad(Activation::sine, 0.0, 30.0) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(activation_eval(Activation::sine, 0.25, 2.0) ==
          doctest::Approx(std::sin(0.5)).epsilon(1e-14));

    CHECK(activation_eval(Activation::tanh_fn, 0.7) == doctest::Approx(std::tanh(0.7)));
    CHECK(activation_eval(Activation::identity, -3.25) == -3.25);
    CHECK(activation_grad(Activation::identity, 123.0) == 1.0);
}

TEST_CASE("activation derivatives match finite differences") {
    const double h = 1e-7;
    const Activation kinds[] = {Activation::swish, Activation::sine, Activation::tanh_fn,
                                Activation::identity};
    const double omegas[] = {1.0, 30.0, 1.0, 1.0};
    const double points[] = {-2.0, -0.6, 0.1, 0.9, 2.3};
    for (std::size_t k = 0; k < 4; ++k) {
        for (double z : points) {
            const double fd = (activation_eval(kinds[k], z + h, omegas[k]) -
                               activation_eval(kinds[k], z - h, omegas[k])) /
                              (2.0 * h);
            const double an = activation_grad(kinds[k], z, omegas[k]);
            // omega = 30 amplifies both the derivative and the FD truncation
            // error, so compare relative to the derivative scale.
            CHECK(std::abs(an - fd) <= 1e-5 * std::max(std::abs(an), 1.0));
        }
    }

    // At unit frequency the truncation error is ~h^2/6, so a coarse step still
    // gives seven digits.
    for (double z : points) {
        const double hh = 1e-5;
        const double fd = (activation_eval(Activation::sine, z + hh) -
                           activation_eval(Activation::sine, z - hh)) /
                          (2.0 * hh);
        CHECK(std::abs(activation_grad(Activation::sine, z) - fd) < 1e-7);
    }
}

TEST_CASE("activation names round-trip and bad names are rejected") {
    for (Activation a : {Activation::swish, Activation::sine, Activation::tanh_fn,
                         Activation::identity}) {
        CHECK(parse_activation(activation_name(a)) == a);
    }
    CHECK_THROWS_AS(parse_activation("relu"), std::invalid_argument);
}

TEST_CASE("forward pass: all-zero parameters give zero output") {
    MLPParams net;
    net.activation = Activation::swish;
    net.layers.push_back({Matrix(5, 2), std::vector<double>(5, 0.0)});
    net.layers.push_back({Matrix(3, 5), std::vector<double>(3, 0.0)});
    std::vector<double> out = mlp_forward(net, {0.7, -1.3});
    REQUIRE(out.size() == 3);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("forward pass: a single layer is exactly affine") {
    MLPParams net;
    net.activation = Activation::swish;  // irrelevant: the last layer is linear
    net.layers.push_back({Matrix(2, 3, {1.0, -2.0, 0.5, 0.0, 4.0, -1.0}), {0.25, -0.75}});
    const std::vector<double> x = {2.0, 1.0, -4.0};
    std::vector<double> out = mlp_forward(net, x);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0.25 + 1.0 * 2.0 + (-2.0) * 1.0 + 0.5 * (-4.0));
    CHECK(out[1] == -0.75 + 0.0 * 2.0 + 4.0 * 1.0 + (-1.0) * (-4.0));
}

TEST_CASE("forward pass agrees with an independent evaluation") {
    Rng rng(41);
    const Activation kinds[] = {Activation::swish, Activation::sine, Activation::tanh_fn,
                                Activation::identity};
    for (Activation act : kinds) {
        MLPParams net = init_mlp({2, 7, 5, 3}, act, RngSeed{rng.next_u64()});
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            std::vector<double> got = mlp_forward(net, x);
            std::vector<double> want = naive_forward(net, x);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("forward tape records pre- and post-activation values") {
    MLPParams net = init_mlp({1, 4, 2}, Activation::tanh_fn, RngSeed{7});
    ForwardTape tape;
    std::vector<double> out = mlp_forward(net, {0.3}, &tape);
    REQUIRE(tape.pre.size() == 2);
    REQUIRE(tape.post.size() == 2);
    CHECK(tape.input == std::vector<double>{0.3});
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(tape.post[0][r] == std::tanh(tape.pre[0][r]));
    }
    CHECK(tape.pre[1] == tape.post[1]);  // final layer is linear
    CHECK(tape.post[1] == out);
}

TEST_CASE("backward pass: analytic gradients of a single linear layer") {
    MLPParams net;
    net.layers.push_back({Matrix(2, 2, {3.0, -1.0, 0.5, 2.0}), {0.0, 1.0}});
    const std::vector<double> x = {0.6, -0.2};
    const std::vector<double> g = {1.5, -0.5};
    ForwardTape tape;
    mlp_forward(net, x, &tape);
    BackwardResult back = mlp_backward(net, tape, g);

    // d/dW = g x^T, d/db = g, d/dx = W^T g
    CHECK(back.param_grads.layers[0].weights(0, 0) == 1.5 * 0.6);
    CHECK(back.param_grads.layers[0].weights(0, 1) == 1.5 * -0.2);
    CHECK(back.param_grads.layers[0].weights(1, 0) == -0.5 * 0.6);
    CHECK(back.param_grads.layers[0].weights(1, 1) == -0.5 * -0.2);
    CHECK(back.param_grads.layers[0].biases == g);
    CHECK(back.input_grad[0] == doctest::Approx(3.0 * 1.5 + 0.5 * -0.5).epsilon(1e-15));
    CHECK(back.input_grad[1] == doctest::Approx(-1.0 * 1.5 + 2.0 * -0.5).epsilon(1e-15));
}

TEST_CASE("backward pass matches finite differences on a 2-30-30-1 swish net") {
    MLPParams net = init_mlp({2, 30, 30, 1}, Activation::swish, RngSeed{101});
    CHECK(param_count(net) == 30 * 2 + 30 + 30 * 30 + 30 + 30 + 1);
    std::vector<double> input = {0.4, -0.9};
    check_gradients(net, input, {1.0}, 1e-6, 1e-5);
}

TEST_CASE("backward pass matches finite differences across random architectures") {
    Rng rng(777);
    const Activation kinds[] = {Activation::swish, Activation::sine, Activation::tanh_fn,
                                Activation::identity};
    for (int trial = 0; trial < 20; ++trial) {
        const Activation act = kinds[rng.next_below(4)];
        const int n_layers = 1 + static_cast<int>(rng.next_below(3));
        std::vector<int> dims;
        for (int l = 0; l <= n_layers; ++l) dims.push_back(1 + static_cast<int>(rng.next_below(6)));

        MLPParams net = init_mlp(dims, act, RngSeed{rng.next_u64()});
        std::vector<double> input;
        for (int i = 0; i < dims.front(); ++i) input.push_back(rng.uniform(-1.0, 1.0));
        std::vector<double> coeffs;
        for (int i = 0; i < dims.back(); ++i) coeffs.push_back(rng.uniform(-1.0, 1.0));

        CAPTURE(trial);
        check_gradients(net, input, coeffs, 1e-6, 1e-5);
    }
}

TEST_CASE("flat parameter vector round-trips and drives the forward pass") {
    MLPParams net = init_mlp({3, 6, 2}, Activation::swish, RngSeed{55});
    std::vector<double> flat = flatten(net);
    REQUIRE(flat.size() == param_count(net));

    MLPParams clone = init_mlp({3, 6, 2}, Activation::swish, RngSeed{999});
    copy_params_from(clone, flat.data());
    CHECK(flatten(clone) == flat);

    const std::vector<double> x = {0.1, -0.2, 0.3};
    CHECK(mlp_forward(clone, x) == mlp_forward(net, x));

    flat[5] += 1.0;
    copy_params_from(clone, flat.data());
    CHECK(mlp_forward(clone, x) != mlp_forward(net, x));
}

TEST_CASE("initialization is seed-deterministic") {
    MLPParams a = init_mlp({2, 20, 20, 1}, Activation::sine, RngSeed{12});
    MLPParams b = init_mlp({2, 20, 20, 1}, Activation::sine, RngSeed{12});
    MLPParams c = init_mlp({2, 20, 20, 1}, Activation::sine, RngSeed{13});
    CHECK(flatten(a) == flatten(b));
    CHECK(flatten(a) != flatten(c));
}

TEST_CASE("Glorot initialization respects its bounds and zeroes biases") {
    MLPParams net = init_mlp({4, 7, 3}, Activation::swish, RngSeed{3});
    const double bounds[] = {std::sqrt(6.0 / (4 + 7)), std::sqrt(6.0 / (7 + 3))};
    double max_abs = 0.0;
    for (int l = 0; l < 2; ++l) {
        for (double w : net.layers[l].weights.data) {
            CHECK(std::abs(w) <= bounds[l]);
            max_abs = std::max(max_abs, std::abs(w));
        }
        for (double b : net.layers[l].biases) CHECK(b == 0.0);
    }
    CHECK(max_abs > 0.0);
}

TEST_CASE("sine initialization uses the narrow first layer and spread biases") {
    MLPParams net = init_mlp({1, 30, 30, 1}, Activation::sine, RngSeed{4});
    CHECK(net.sine_omega0 == 30.0);
    for (double w : net.layers[0].weights.data) CHECK(std::abs(w) <= 1.0);
    for (double w : net.layers[1].weights.data) CHECK(std::abs(w) <= std::sqrt(6.0 / 30.0));
    for (double w : net.layers[2].weights.data) CHECK(std::abs(w) <= std::sqrt(6.0 / 30.0));
    CHECK(std::abs(net.layers[0].biases[0]) <= 1.0);
    double bias_spread = 0.0;
    for (double b : net.layers[1].biases) {
        CHECK(std::abs(b) <= 1.0 / std::sqrt(30.0));
        bias_spread = std::max(bias_spread, std::abs(b));
    }
    CHECK(bias_spread > 0.0);
}

TEST_CASE("Adam: zero gradients leave parameters bit-identical") {
    std::vector<double> params = {1.0, -2.0, 0.5};
    const std::vector<double> before = params;
    std::vector<double> grads(3, 0.0);
    AdamState state = make_adam_state(3);
    for (int i = 0; i < 10; ++i) adam_step(params.data(), grads.data(), 3, state, 0.1);
    CHECK(params == before);
    CHECK(state.step_count == 10);
}

TEST_CASE("Adam: the first step moves by about -lr * sign(gradient)") {
    std::vector<double> params = {1.0, 1.0, 1.0};
    const std::vector<double> grads = {2.5, -0.03, 1e-3};
    AdamState state = make_adam_state(3);
    adam_step(params.data(), grads.data(), 3, state, 0.01);
    CHECK(params[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(1.0 + 0.01).epsilon(1e-6));
    CHECK(params[2] == doctest::Approx(1.0 - 0.01).epsilon(1e-4));
}

TEST_CASE("Adam drives a quadratic toward its minimum") {
    double w = 1.0;
    AdamState state = make_adam_state(1);
    bool crossed = false;   // reached |w| < 0.5
    bool monotone = true;   // |w| strictly decreasing until the crossing
    for (int i = 0; i < 100; ++i) {
        const double prev = std::abs(w);
        const double grad = 2.0 * w;
        adam_step(&w, &grad, 1, state, 0.1);
        if (!crossed && std::abs(w) >= prev) monotone = false;
        if (std::abs(w) < 0.5) crossed = true;
    }
    CHECK(crossed);
    CHECK(monotone);
    CHECK(w * w < 0.5);
}

TEST_CASE("Adam rejects non-finite gradients with the offending index") {
    std::vector<double> params = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> grads = {0.1, 0.1, 0.1, 0.1};
    grads[2] = std::nan("");
    AdamState state = make_adam_state(4);
    CHECK_THROWS_WITH_AS(adam_step(params.data(), grads.data(), 4, state, 0.01),
                         doctest::Contains("parameter 2"), std::runtime_error);
    // The failed call must not have advanced the state.
    CHECK(state.step_count == 0);
    CHECK(params[0] == 1.0);
}

TEST_CASE("dimension mismatches are rejected with clear errors") {
    MLPParams net = init_mlp({2, 4, 1}, Activation::swish, RngSeed{1});
    CHECK_THROWS_AS(mlp_forward(net, {1.0, 2.0, 3.0}), std::invalid_argument);

    ForwardTape tape;
    mlp_forward(net, {1.0, 2.0}, &tape);
    CHECK_THROWS_AS(mlp_backward(net, tape, {1.0, 2.0}), std::invalid_argument);

    CHECK_THROWS_AS(init_mlp({5}, Activation::swish, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(init_mlp({2, 0, 1}, Activation::swish, RngSeed{1}), std::invalid_argument);

    AdamState small = make_adam_state(2);
    std::vector<double> p = {1.0, 2.0, 3.0};
    std::vector<double> g = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(adam_step(p.data(), g.data(), 3, small, 0.1), std::invalid_argument);
}
