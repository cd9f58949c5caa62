#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "lgspi/kernels.hpp"
#include "lgspi/linalg.hpp"

namespace lgspi {
namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    // Sprinkle exact zeros so the zero-skipping paths run.
    for (std::size_t i = 0; i < n; i += 7) v[i] = 0.0;
    return v;
}

class KernelEquivalence : public ::testing::Test {
protected:
    void SetUp() override {
        if (!kernels::isa_supported(kernels::Isa::Avx2)) GTEST_SKIP() << "no AVX2 on this machine";
    }
    const kernels::KernelTable& ref = kernels::scalar::table();
    const kernels::KernelTable& simd = kernels::avx2::table();
};

TEST_F(KernelEquivalence, Dot) {
    std::mt19937_64 rng(1);
    for (std::size_t n = 0; n < 70; ++n) {
        const auto a = random_vec(n, rng), b = random_vec(n, rng);
        EXPECT_NEAR(ref.dot(a.data(), b.data(), n), simd.dot(a.data(), b.data(), n), 1e-12) << "n=" << n;
    }
}

TEST_F(KernelEquivalence, Axpy) {
    std::mt19937_64 rng(2);
    for (std::size_t n = 0; n < 40; ++n) {
        const auto x = random_vec(n, rng);
        auto y1 = random_vec(n, rng);
        auto y2 = y1;
        ref.axpy(0.75, x.data(), y1.data(), n);
        simd.axpy(0.75, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14);
    }
}

TEST_F(KernelEquivalence, GemmBothLayouts) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> dim(1, 13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = dim(rng), n = dim(rng), k = dim(rng);
        const auto a = random_vec(m * k, rng);
        const auto b = random_vec(k * n, rng);
        const auto bt = random_vec(n * k, rng);
        auto c0 = random_vec(m * n, rng);

        auto c1 = c0, c2 = c0;
        ref.gemm_nn(m, n, k, a.data(), k, b.data(), n, c1.data(), n);
        simd.gemm_nn(m, n, k, a.data(), k, b.data(), n, c2.data(), n);
        for (std::size_t i = 0; i < m * n; ++i) ASSERT_NEAR(c1[i], c2[i], 1e-12);

        c1 = c0, c2 = c0;
        ref.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c1.data(), n);
        simd.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c2.data(), n);
        for (std::size_t i = 0; i < m * n; ++i) ASSERT_NEAR(c1[i], c2[i], 1e-12);
    }
}

TEST(KernelDispatch, SelectAndRestore) {
    EXPECT_TRUE(kernels::select(kernels::Isa::Scalar));
    EXPECT_EQ(kernels::active().isa, kernels::Isa::Scalar);
    const Matrix a{{1, 2}, {3, 4}}, b{{0.5, -1}, {2, 0}};
    const Matrix scalar_product = matmul(a, b);
    if (kernels::select(kernels::Isa::Avx2)) {
        EXPECT_EQ(kernels::active().isa, kernels::Isa::Avx2);
        EXPECT_LE(max_abs_diff(matmul(a, b), scalar_product), 1e-15);
    }
    kernels::select_default();
    EXPECT_EQ(kernels::parse_isa("avx2"), kernels::Isa::Avx2);
    EXPECT_EQ(kernels::parse_isa("scalar"), kernels::Isa::Scalar);
    EXPECT_FALSE(kernels::parse_isa("neon").has_value());
    EXPECT_EQ(kernels::isa_name(kernels::Isa::Scalar), "scalar");
}

}  // namespace
}  // namespace lgspi
