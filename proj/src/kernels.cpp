#include "dcrnn/kernels.hpp"

#include <atomic>
#include <cstring>

namespace dcrnn::kernels {

namespace {
std::atomic<bool> g_parallel{true};
// Roughly the flop count where a 2-thread fork starts to pay off.
std::atomic<i64> g_min_work{1 << 15};
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }
i64 parallel_min_work() { return g_min_work.load(std::memory_order_relaxed); }
void set_parallel_min_work(i64 flops) { g_min_work.store(flops, std::memory_order_relaxed); }

namespace {

// One output row of C = A*B, ikj order so the inner loop streams B and C.
inline void nn_row(const double* a, const double* b, double* c, i64 i, i64 q, i64 r, bool accumulate) {
    double* ci = c + i * r;
    if (!accumulate) std::memset(ci, 0, sizeof(double) * static_cast<std::size_t>(r));
    const double* ai = a + i * q;
    for (i64 k = 0; k < q; ++k) {
        const double aik = ai[k];
        const double* bk = b + k * r;
        for (i64 j = 0; j < r; ++j) ci[j] += aik * bk[j];
    }
}

// One output row of C = A*B^T; dot products over contiguous rows.
inline void nt_row(const double* a, const double* b, double* c, i64 i, i64 q, i64 r, bool accumulate) {
    const double* ai = a + i * r;
    double* ci = c + i * q;
    for (i64 j = 0; j < q; ++j) {
        const double* bj = b + j * r;
        double s = 0.0;
        for (i64 k = 0; k < r; ++k) s += ai[k] * bj[k];
        if (accumulate)
            ci[j] += s;
        else
            ci[j] = s;
    }
}

// One output row of C = A^T*B (row k of C, i.e. column k of A against B).
inline void tn_row(const double* a, const double* b, double* c, i64 k, i64 p, i64 q, i64 r, bool accumulate) {
    double* ck = c + k * r;
    if (!accumulate) std::memset(ck, 0, sizeof(double) * static_cast<std::size_t>(r));
    for (i64 i = 0; i < p; ++i) {
        const double aik = a[i * q + k];
        const double* bi = b + i * r;
        for (i64 j = 0; j < r; ++j) ck[j] += aik * bi[j];
    }
}

}  // namespace

void matmul_nn_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    for (i64 i = 0; i < p; ++i) nn_row(a, b, c, i, q, r, accumulate);
}

void matmul_nn_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (i64 i = 0; i < p; ++i) nn_row(a, b, c, i, q, r, accumulate);
}

void matmul_nn(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    if (use_parallel(p * q * r) && p > 1)
        matmul_nn_omp(a, b, c, p, q, r, accumulate);
    else
        matmul_nn_serial(a, b, c, p, q, r, accumulate);
}

void matmul_nt_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    for (i64 i = 0; i < p; ++i) nt_row(a, b, c, i, q, r, accumulate);
}

void matmul_nt_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (i64 i = 0; i < p; ++i) nt_row(a, b, c, i, q, r, accumulate);
}

void matmul_nt(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    if (use_parallel(p * q * r) && p > 1)
        matmul_nt_omp(a, b, c, p, q, r, accumulate);
    else
        matmul_nt_serial(a, b, c, p, q, r, accumulate);
}

void matmul_tn_serial(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    for (i64 k = 0; k < q; ++k) tn_row(a, b, c, k, p, q, r, accumulate);
}

void matmul_tn_omp(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (i64 k = 0; k < q; ++k) tn_row(a, b, c, k, p, q, r, accumulate);
}

void matmul_tn(const double* a, const double* b, double* c, i64 p, i64 q, i64 r, bool accumulate) {
    if (use_parallel(p * q * r) && q > 1)
        matmul_tn_omp(a, b, c, p, q, r, accumulate);
    else
        matmul_tn_serial(a, b, c, p, q, r, accumulate);
}

}  // namespace dcrnn::kernels
