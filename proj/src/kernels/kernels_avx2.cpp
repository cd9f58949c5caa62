// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "lgspi/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace lgspi::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* a, std::size_t lda,
             const double* b, std::size_t ldb,
             double* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * ldc;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * lda + p];
            if (aip == 0.0) continue;
            axpy(aip, b + p * ldb, ci, n);
        }
    }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* a, std::size_t lda,
             const double* b, std::size_t ldb,
             double* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c[i * ldc + j] += dot(a + i * lda, b + j * ldb, k);
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{Isa::Avx2, "avx2", dot, axpy, gemm_nn, gemm_nt};
    return t;
}

}  // namespace lgspi::kernels::avx2

#endif
