// Benchmark and cross-check of the batch kernels: runs a representative
// per-sample gradient workload (a small dense network over many inputs)
// through the OpenMP implementation and the serial reference, verifies the
// accumulated gradients agree bitwise, and reports timings.
//
// Usage: latentflow_bench [n_samples] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <vector>

#include "latentflow/kernels.hpp"
#include "latentflow/nn.hpp"
#include "latentflow/rng.hpp"

using namespace latentflow;

namespace {

struct Workload {
    MLPParams net;
    std::vector<double> inputs;   // 2 per sample
    std::vector<double> targets;  // 1 per sample
    std::size_t n_samples = 0;
    std::size_t grad_size = 0;
};

Workload make_workload(std::size_t n_samples) {
    Workload w;
    w.net = init_mlp({2, 30, 30, 1}, Activation::swish, RngSeed{42});
    w.n_samples = n_samples;
    w.grad_size = param_count(w.net);
    Rng rng(7);
    w.inputs.resize(2 * n_samples);
    w.targets.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        w.inputs[2 * i] = rng.uniform(-1.0, 1.0);
        w.inputs[2 * i + 1] = rng.uniform(-1.0, 1.0);
        w.targets[i] = rng.uniform(-1.0, 1.0);
    }
    return w;
}

// Squared-error gradient of one sample, accumulated into acc.  All scratch
// lives in the worker, so the per-sample path is allocation-free.
SampleFnFactory gradient_factory(const Workload& w) {
    return [&w]() -> SampleFn {
        struct Scratch {
            ForwardTape tape;
            BackwardResult back;
            std::vector<double> x = {0.0, 0.0};
            std::vector<double> out_grad = {0.0};
        };
        auto s = std::make_shared<Scratch>();
        return [&w, s](std::size_t i, double* acc) {
            s->x[0] = w.inputs[2 * i];
            s->x[1] = w.inputs[2 * i + 1];
            mlp_forward_into(w.net, s->x, s->tape);
            s->out_grad[0] = 2.0 * (s->tape.post.back()[0] - w.targets[i]);
            mlp_backward(w.net, s->tape, s->out_grad, s->back);
            std::size_t k = 0;
            for (const LayerParams& layer : s->back.param_grads.layers) {
                for (double v : layer.weights.data) acc[k++] += v;
                for (double v : layer.biases) acc[k++] += v;
            }
        };
    };
}

template <typename F>
double time_best_seconds(int repeats, F&& run) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        run();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_samples = 32768;
    int repeats = 5;
    if (argc > 1) n_samples = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) repeats = std::atoi(argv[2]);
    if (n_samples == 0 || repeats <= 0) {
        std::fprintf(stderr, "usage: %s [n_samples > 0] [repeats > 0]\n", argv[0]);
        return 2;
    }

    Workload w = make_workload(n_samples);
    std::printf("workload: %zu samples, %zu gradient entries, %d OpenMP thread(s)\n",
                w.n_samples, w.grad_size, kernels::max_threads());

    std::vector<double> grad_par(w.grad_size), grad_ser(w.grad_size);
    const double t_par = time_best_seconds(repeats, [&] {
        kernels::batch_accumulate(w.n_samples, w.grad_size, grad_par.data(), gradient_factory(w));
    });
    const double t_ser = time_best_seconds(repeats, [&] {
        serial_ref::batch_accumulate(w.n_samples, w.grad_size, grad_ser.data(),
                                     gradient_factory(w));
    });

    if (grad_par != grad_ser) {
        std::fprintf(stderr, "FAIL: parallel and serial gradients differ\n");
        return 1;
    }
    std::printf("bitwise agreement: yes\n");
    std::printf("openmp kernel : %9.4f ms  (%.1f samples/us)\n", 1e3 * t_par,
                static_cast<double>(w.n_samples) / (1e6 * t_par));
    std::printf("serial ref    : %9.4f ms  (%.1f samples/us)\n", 1e3 * t_ser,
                static_cast<double>(w.n_samples) / (1e6 * t_ser));
    std::printf("speedup       : %9.3fx\n", t_ser / t_par);
    return 0;
}
