#include "sl4/simd.hpp"

namespace sl4::simd::detail {

double weighted_combination_norm2_scalar(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                         std::size_t begin, std::size_t end) {
    const std::size_t m = coef.size();
    double total = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double cr = coef[j].real(), ci = coef[j].imag();
            const double xr = cols.re[j][k], xi = cols.im[j][k];
            re += cr * xr - ci * xi;
            im += cr * xi + ci * xr;
        }
        total += w[k] * (re * re + im * im);
    }
    return total;
}

}  // namespace sl4::simd::detail
