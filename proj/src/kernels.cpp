#include "latentflow/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace latentflow::kernels {

void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const BatchWorkerFactory& make_worker) {
    std::fill(out, out + acc_size, 0.0);
    if (n_samples == 0 || acc_size == 0) return;

    const std::size_t n_blocks = (n_samples + kAccumulateBlock - 1) / kAccumulateBlock;
    std::vector<double> partials(n_blocks * acc_size, 0.0);

#pragma omp parallel
    {
        BatchWorker w = make_worker();
#pragma omp for schedule(static)
        for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
            double* acc = partials.data() + static_cast<std::size_t>(b) * acc_size;
            const std::size_t begin = static_cast<std::size_t>(b) * kAccumulateBlock;
            const std::size_t end = std::min(n_samples, begin + kAccumulateBlock);
            for (std::size_t i = begin; i < end; ++i) w.sample(i, acc);
            if (w.flush) w.flush(acc);
        }
    }

    // Serial merge in block order fixes the reduction order.
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const double* acc = partials.data() + b * acc_size;
        for (std::size_t k = 0; k < acc_size; ++k) out[k] += acc[k];
    }
}

void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const SampleFnFactory& make_worker) {
    batch_accumulate(n_samples, acc_size, out,
                     BatchWorkerFactory([&] { return BatchWorker{make_worker(), {}}; }));
}

void batch_apply(std::size_t n_samples, const ApplyFnFactory& make_worker) {
    if (n_samples == 0) return;
#pragma omp parallel
    {
        ApplyFn fn = make_worker();
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n_samples); ++i) {
            fn(static_cast<std::size_t>(i));
        }
    }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace latentflow::kernels
