#include "lgspi/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace lgspi::kernels {
namespace {

const KernelTable& table_for(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::Avx2) return avx2::table();
#endif
    (void)isa;
    return scalar::table();
}

const KernelTable* detect() {
    if (const char* env = std::getenv("LGSPI_KERNELS")) {
        if (auto isa = parse_isa(env); isa && isa_supported(*isa)) return &table_for(*isa);
    }
    if (isa_supported(Isa::Avx2)) return &table_for(Isa::Avx2);
    return &scalar::table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> t{detect()};
    return t;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
    if (!isa_supported(isa)) return false;
    current().store(&table_for(isa), std::memory_order_release);
    return true;
}

void select_default() { current().store(detect(), std::memory_order_release); }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
    if (name == "scalar") return Isa::Scalar;
    if (name == "avx2") return Isa::Avx2;
    return std::nullopt;
}

}  // namespace lgspi::kernels
