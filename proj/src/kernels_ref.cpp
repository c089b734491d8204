#include "latentflow/kernels.hpp"

#include <algorithm>
#include <vector>

namespace latentflow::serial_ref {

// Mirrors kernels::batch_accumulate arithmetic exactly: the same per-block
// buffers, the same end-of-block flushes, and the same block-ordered merge,
// just without threads.
void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const BatchWorkerFactory& make_worker) {
    std::fill(out, out + acc_size, 0.0);
    if (n_samples == 0 || acc_size == 0) return;

    BatchWorker w = make_worker();
    const std::size_t n_blocks = (n_samples + kAccumulateBlock - 1) / kAccumulateBlock;
    std::vector<double> block(acc_size);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::fill(block.begin(), block.end(), 0.0);
        const std::size_t begin = b * kAccumulateBlock;
        const std::size_t end = std::min(n_samples, begin + kAccumulateBlock);
        for (std::size_t i = begin; i < end; ++i) w.sample(i, block.data());
        if (w.flush) w.flush(block.data());
        for (std::size_t k = 0; k < acc_size; ++k) out[k] += block[k];
    }
}

void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const SampleFnFactory& make_worker) {
    batch_accumulate(n_samples, acc_size, out,
                     BatchWorkerFactory([&] { return BatchWorker{make_worker(), {}}; }));
}

void batch_apply(std::size_t n_samples, const ApplyFnFactory& make_worker) {
    if (n_samples == 0) return;
    ApplyFn fn = make_worker();
    for (std::size_t i = 0; i < n_samples; ++i) fn(i);
}

}  // namespace latentflow::serial_ref
