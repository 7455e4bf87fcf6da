// Compiled with -mavx2 -mfma; only reached after runtime detection.
#include <immintrin.h>

#include "sl4/simd.hpp"

namespace sl4::simd::detail {

double weighted_combination_norm2_avx2(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                       std::size_t begin, std::size_t end) {
    const std::size_t m = coef.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = begin;
    for (; k + 4 <= end; k += 4) {
        __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
        for (std::size_t j = 0; j < m; ++j) {
            const __m256d cr = _mm256_set1_pd(coef[j].real());
            const __m256d ci = _mm256_set1_pd(coef[j].imag());
            const __m256d xr = _mm256_loadu_pd(cols.re[j] + k);
            const __m256d xi = _mm256_loadu_pd(cols.im[j] + k);
            re = _mm256_fmadd_pd(cr, xr, re);
            re = _mm256_fnmadd_pd(ci, xi, re);
            im = _mm256_fmadd_pd(cr, xi, im);
            im = _mm256_fmadd_pd(ci, xr, im);
        }
        const __m256d mag = _mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), mag, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    if (k < end) total += weighted_combination_norm2_scalar(w, coef, cols, k, end);
    return total;
}

}  // namespace sl4::simd::detail
