#include "lgspi/kernels.hpp"

namespace lgspi::kernels::scalar {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
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
            const double* bp = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
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
    static const KernelTable t{Isa::Scalar, "scalar", dot, axpy, gemm_nn, gemm_nt};
    return t;
}

}  // namespace lgspi::kernels::scalar
