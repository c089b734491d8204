#pragma once
// Batch execution kernels for per-sample work (gradient accumulation, grid
// prediction).  `kernels::` runs under OpenMP; `serial_ref::` is a plain
// serial implementation with identical numerical semantics, kept as the
// reference for equality tests and as the benchmark baseline.
//
// Determinism contract: batch_accumulate groups samples into fixed blocks of
// kAccumulateBlock, sums each block into a private buffer in sample order,
// flushes deferring workers at the end of every block, and merges the block
// buffers in block order.  The floating-point reduction order is therefore a
// function of (n_samples, acc_size) alone — never of the thread count — so
// parallel and serial runs agree bitwise.

#include <cstddef>
#include <functional>

namespace latentflow {

// Samples per reduction block (fixed: part of the determinism contract).
inline constexpr std::size_t kAccumulateBlock = 256;

// Adds sample i's contribution into acc[0..acc_size). Must only touch state
// owned by its worker (see WorkerFactory).
using SampleFn = std::function<void(std::size_t i, double* acc)>;

// Performs sample i's work, writing to locations no other sample touches.
using ApplyFn = std::function<void(std::size_t i)>;

// A worker whose sample calls may defer part of their contribution across a
// run of consecutive samples (e.g. state shared by equal keys); flush lands
// the pending remainder into acc.  batch_accumulate calls flush at the end
// of every block, so deferral never leaks across block buffers and the flush
// points stay a function of the sample order alone.
struct BatchWorker {
    SampleFn sample;
    std::function<void(double* acc)> flush;  // may be empty
};

// Each executing thread calls the factory once to obtain a private worker, so
// closures may own scratch buffers (tapes, staging vectors) without locking.
using SampleFnFactory = std::function<SampleFn()>;
using BatchWorkerFactory = std::function<BatchWorker()>;
using ApplyFnFactory = std::function<ApplyFn()>;

namespace kernels {

// out[0..acc_size) = sum over samples of fn's contributions, block-ordered.
void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const SampleFnFactory& make_worker);
void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const BatchWorkerFactory& make_worker);

// Runs fn(i) for every sample; samples write disjoint outputs.
void batch_apply(std::size_t n_samples, const ApplyFnFactory& make_worker);

// OpenMP's current thread budget (1 when OpenMP is unavailable).
int max_threads();

}  // namespace kernels

namespace serial_ref {

void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const SampleFnFactory& make_worker);
void batch_accumulate(std::size_t n_samples, std::size_t acc_size, double* out,
                      const BatchWorkerFactory& make_worker);

void batch_apply(std::size_t n_samples, const ApplyFnFactory& make_worker);

}  // namespace serial_ref

}  // namespace latentflow
