#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sl4/simd.hpp"

using namespace sl4;
namespace simd = sl4::simd;

namespace {

struct Data {
    std::vector<double> w;
    std::vector<std::vector<double>> re, im;
    std::vector<const double*> re_ptr, im_ptr;
    std::vector<cplx> coef;

    simd::PlanarColumns cols() const { return {re_ptr, im_ptr}; }
};

Data make_data(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    Data d;
    d.w.resize(n);
    for (double& x : d.w) x = pos(rng);
    d.re.assign(m, std::vector<double>(n));
    d.im.assign(m, std::vector<double>(n));
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t k = 0; k < n; ++k) {
            d.re[c][k] = g(rng);
            d.im[c][k] = g(rng);
        }
        d.re_ptr.push_back(d.re[c].data());
        d.im_ptr.push_back(d.im[c].data());
        d.coef.emplace_back(g(rng), g(rng));
    }
    return d;
}

// Direct evaluation with std::complex.
double reference(const Data& d, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        cplx v = 0.0;
        for (std::size_t c = 0; c < d.coef.size(); ++c) v += d.coef[c] * cplx(d.re[c][k], d.im[c][k]);
        s += d.w[k] * std::norm(v);
    }
    return s;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree with direct evaluation") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<std::size_t> len(0, 200), cols(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = len(rng), m = cols(rng);
        const Data d = make_data(rng, n, m);
        const std::size_t begin = n ? std::uniform_int_distribution<std::size_t>(0, n)(rng) : 0;
        const std::size_t end = std::uniform_int_distribution<std::size_t>(begin, n)(rng);
        const double ref = reference(d, begin, end);
        const double scalar = simd::detail::weighted_combination_norm2_scalar(d.w.data(), d.coef, d.cols(), begin, end);
        INFO("n " << n << " m " << m << " range [" << begin << ", " << end << ")");
        CHECK(std::abs(scalar - ref) <= 1e-13 * (1.0 + ref));
        if (simd::avx2_available()) {
            const double avx = simd::detail::weighted_combination_norm2_avx2(d.w.data(), d.coef, d.cols(), begin, end);
            CHECK(std::abs(avx - ref) <= 1e-13 * (1.0 + ref));
            CHECK(std::abs(avx - scalar) <= 1e-13 * (1.0 + ref));
        }
    }
}

TEST_CASE("dispatch follows the forced ISA") {
    std::mt19937_64 rng(62);
    const Data d = make_data(rng, 1003, 4);
    const double ref = reference(d, 3, 1001);

    simd::force_isa(simd::Isa::Scalar);
    CHECK(simd::active_isa() == simd::Isa::Scalar);
    const double s = simd::weighted_combination_norm2(d.w.data(), d.coef, d.cols(), 3, 1001);
    CHECK(std::abs(s - ref) <= 1e-13 * ref);

    simd::force_isa(simd::Isa::Avx2);
    CHECK(simd::active_isa() == (simd::avx2_available() ? simd::Isa::Avx2 : simd::Isa::Scalar));
    const double a = simd::weighted_combination_norm2(d.w.data(), d.coef, d.cols(), 3, 1001);
    CHECK(std::abs(a - ref) <= 1e-13 * ref);

    simd::force_isa(std::nullopt);
    CHECK(simd::active_isa() == (simd::avx2_available() ? simd::Isa::Avx2 : simd::Isa::Scalar));
    CHECK(std::string(simd::isa_name(simd::Isa::Scalar)) != std::string(simd::isa_name(simd::Isa::Avx2)));
}
