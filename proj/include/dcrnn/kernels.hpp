#pragma once

#include <omp.h>

#include "dcrnn/common.hpp"

// Dense inner loops shared by every op. Each kernel has a plain serial
// implementation (the reference) and an OpenMP variant that parallelizes over
// output rows or elements. Because every output element is produced by exactly
// one thread with the same per-element summation order as the serial loop, the
// parallel results are bit-identical to the serial ones for any thread count.
// The dispatching front-ends pick the parallel path only when there is enough
// work to amortize the fork.

namespace dcrnn::kernels {

bool parallel_enabled();
void set_parallel(bool on);
i64 parallel_min_work();
void set_parallel_min_work(i64 flops);

// c[p x r] (+)= a[p x q] * b[q x r]
void matmul_nn_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_nn_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_nn(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);

// c[p x q] (+)= a[p x r] * b[q x r]^T
void matmul_nt_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_nt_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_nt(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);

// c[q x r] (+)= a[p x q]^T * b[p x r]
void matmul_tn_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_tn_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);
void matmul_tn(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate);

inline bool use_parallel(i64 work) {
    return parallel_enabled() && work >= parallel_min_work() && !omp_in_parallel();
}

// y[i] = f(x[i])
template <class F>
void map(const double* x, double* y, i64 n, F f) {
    if (use_parallel(n)) {
#pragma omp parallel for schedule(static)
        for (i64 i = 0; i < n; ++i) y[i] = f(x[i]);
    } else {
        for (i64 i = 0; i < n; ++i) y[i] = f(x[i]);
    }
}

// c[i] = f(a[i], b[i])
template <class F>
void zip(const double* a, const double* b, double* c, i64 n, F f) {
    if (use_parallel(n)) {
#pragma omp parallel for schedule(static)
        for (i64 i = 0; i < n; ++i) c[i] = f(a[i], b[i]);
    } else {
        for (i64 i = 0; i < n; ++i) c[i] = f(a[i], b[i]);
    }
}

// c[i] += f(a[i], b[i]); used by backward rules to accumulate into grad buffers.
template <class F>
void zip_acc(const double* a, const double* b, double* c, i64 n, F f) {
    if (use_parallel(n)) {
#pragma omp parallel for schedule(static)
        for (i64 i = 0; i < n; ++i) c[i] += f(a[i], b[i]);
    } else {
        for (i64 i = 0; i < n; ++i) c[i] += f(a[i], b[i]);
    }
}

template <class F>
void map_acc(const double* x, double* y, i64 n, F f) {
    if (use_parallel(n)) {
#pragma omp parallel for schedule(static)
        for (i64 i = 0; i < n; ++i) y[i] += f(x[i]);
    } else {
        for (i64 i = 0; i < n; ++i) y[i] += f(x[i]);
    }
}

}  // namespace dcrnn::kernels
