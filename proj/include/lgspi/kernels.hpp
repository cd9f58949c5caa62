#pragma once

// Dense double-precision inner loops used by the matrix layer.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2+FMA variant in `kernels::avx2`. The active table is chosen
// once at startup from CPUID (override with LGSPI_KERNELS=scalar|avx2) and can
// be switched explicitly, which the equivalence tests use.
//
// All matrices are row-major with an explicit leading dimension (row stride).

#include <cstddef>
#include <optional>
#include <string_view>

namespace lgspi::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);

    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // C (m x n) += A (m x k) * B (k x n)
    void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, std::size_t lda,
                    const double* b, std::size_t ldb,
                    double* c, std::size_t ldc);

    // C (m x n) += A (m x k) * B^T, with B stored n x k
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, std::size_t lda,
                    const double* b, std::size_t ldb,
                    double* c, std::size_t ldc);
};

namespace scalar {
const KernelTable& table();
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table();
}
#endif

// True when the running CPU can execute the given table.
bool isa_supported(Isa isa);

// The table currently used by the matrix layer.
const KernelTable& active();

// Force a specific ISA. Returns false (and leaves the selection unchanged)
// when the CPU or the build does not support it.
bool select(Isa isa);

// Restore the automatic selection.
void select_default();

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

}  // namespace lgspi::kernels
