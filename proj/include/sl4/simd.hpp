#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sl4/types.hpp"

namespace sl4::simd {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

/// True when the CPU and the build both support the AVX2+FMA kernels.
bool avx2_available();

/// Kernel family used by the dispatching entry points.
Isa active_isa();

/// Pins the dispatch (tests use this to compare paths); nullopt restores detection.
/// Requesting Avx2 where it is unavailable falls back to Scalar.
void force_isa(std::optional<Isa> isa);

/// Planar complex columns: column m is re[m][k] + i im[m][k].
struct PlanarColumns {
    std::span<const double* const> re;
    std::span<const double* const> im;
};

/// sum over k in [begin, end) of w[k] * |sum_m coef[m] * col_m[k]|^2.
double weighted_combination_norm2(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                  std::size_t begin, std::size_t end);

namespace detail {
double weighted_combination_norm2_scalar(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                         std::size_t begin, std::size_t end);
double weighted_combination_norm2_avx2(const double* w, std::span<const cplx> coef, const PlanarColumns& cols,
                                       std::size_t begin, std::size_t end);
}  // namespace detail

}  // namespace sl4::simd
