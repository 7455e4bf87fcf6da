#include <atomic>

#include "sl4/simd.hpp"

namespace sl4::simd {

namespace {

// -1: detect, otherwise a pinned Isa value.
std::atomic<int> g_forced{-1};

bool detect_avx2() {
#if defined(SL4_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
    static const bool ok = detect_avx2();
    return ok;
}

Isa active_isa() {
    const int f = g_forced.load(std::memory_order_relaxed);
    if (f >= 0) {
        const auto isa = static_cast<Isa>(f);
        return isa == Isa::Avx2 && !avx2_available() ? Isa::Scalar : isa;
    }
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

void force_isa(std::optional<Isa> isa) { g_forced.store(isa ? static_cast<int>(*isa) : -1); }

double weighted_combination_norm2(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                  std::size_t begin, std::size_t end) {
    if (end <= begin) return 0.0;
#if defined(SL4_HAVE_AVX2)
    if (active_isa() == Isa::Avx2) return detail::weighted_combination_norm2_avx2(w, coef, cols, begin, end);
#endif
    return detail::weighted_combination_norm2_scalar(w, coef, cols, begin, end);
}

}  // namespace sl4::simd
