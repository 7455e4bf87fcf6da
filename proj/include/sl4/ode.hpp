#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "sl4/error.hpp"
#include "sl4/types.hpp"

namespace sl4 {

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0: a tenth of the span
    double event_refine_tol = 1e-11;
    double deficiency2_threshold = 1e-10;
    double initial_step = 0.0;  // 0: chosen from the span
    /// Error scale floor as a fraction of the largest entry in the same column.
    double column_floor = 0.0;
    long max_steps = 2'000'000;
};

/// One accepted or trial Dormand-Prince step with its continuous extension.
template <int Cols>
struct DenseStep {
    using State = Eigen::Matrix<cplx, 4, Cols>;
    double x0 = 0.0;
    double h = 0.0;
    State y0, y1;
    std::array<State, 5> r;

    double x1() const { return x0 + h; }

    /// Fourth-order interpolant at x in [x0, x0+h].
    State at(double x) const {
        const double th = (x - x0) / h;
        const double th1 = 1.0 - th;
        return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
    }
};

/// Verdict returned by a step hook.
template <int Cols>
struct StepVerdict {
    bool accept = true;
    /// Right factor applied to the accepted state (column renormalization).
    std::optional<Eigen::Matrix<cplx, Cols, Cols>> rescale;
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

/// Adaptive Dormand-Prince 5(4) integration of y' = f(x, y) from x0 to x1
/// (either direction). `hook(step)` sees every step that passed the error test
/// and may reject it or renormalize the accepted state.
template <int Cols, class Rhs, class Hook>
void integrate_dopri(Rhs&& f, double x0, double x1, Eigen::Matrix<cplx, 4, Cols>& y, const StepControl& ctrl,
                     Hook&& hook) {
    using State = Eigen::Matrix<cplx, 4, Cols>;
    using namespace dopri;
    const double span = x1 - x0;
    if (span == 0.0) return;
    const double dir = span > 0 ? 1.0 : -1.0;
    const double hmax = ctrl.max_step > 0 ? ctrl.max_step : std::abs(span) / 10.0;
    double h = ctrl.initial_step > 0 ? ctrl.initial_step : std::min(hmax, std::abs(span) * 1e-3);
    h = std::min(h, hmax);
    double x = x0;
    State k1 = f(x, y);
    long steps = 0;

    while (dir * (x1 - x) > 0.0) {
        if (++steps > ctrl.max_steps) fail(ErrorKind::StepSizeUnderflow, "step budget exhausted");
        bool last = false;
        if (h >= std::abs(x1 - x)) {
            h = std::abs(x1 - x);
            last = true;
        }
        const double hs = dir * h;
        State k2 = f(x + c2 * hs, y + hs * (a21 * k1));
        State k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        State k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        State k5 = f(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        State k6 = f(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        State ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double xnew = last ? x1 : x + hs;
        State k7 = f(xnew, ynew);
        State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double acc = 0.0;
        for (Eigen::Index c = 0; c < Cols; ++c) {
            const double floor = ctrl.column_floor * ynew.col(c).cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < 4; ++i) {
                const double mag = std::max({std::abs(y(i, c)), std::abs(ynew(i, c)), floor});
                const double e = std::abs(err(i, c)) / (ctrl.abs_tol + ctrl.rel_tol * mag);
                acc += e * e;
            }
        }
        double en = std::sqrt(acc / static_cast<double>(err.size()));
        if (!std::isfinite(en)) en = 1e10;

        if (en <= 1.0) {
            DenseStep<Cols> ds;
            ds.x0 = x;
            ds.h = xnew - x;
            ds.y0 = y;
            ds.y1 = ynew;
            const State ydiff = ynew - y;
            const State bspl = hs * k1 - ydiff;
            ds.r[0] = y;
            ds.r[1] = ydiff;
            ds.r[2] = bspl;
            ds.r[3] = ydiff - hs * k7 - bspl;
            ds.r[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            StepVerdict<Cols> verdict = hook(ds);
            if (verdict.accept) {
                x = xnew;
                y = ynew;
                k1 = k7;
                if (verdict.rescale) {
                    y = y * (*verdict.rescale);
                    k1 = k1 * (*verdict.rescale);
                }
                if (!(y.cwiseAbs().maxCoeff() < 1e250)) fail(ErrorKind::BlowUp, "solution norm exceeds overflow guard");
                const double fac = en > 0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0) : 5.0;
                h = std::min(hmax, h * fac);
                continue;
            }
            h *= 0.5;
        } else {
            h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
        }
        if (h < 1e-15 * std::max(std::abs(x), 1e-290))
            fail(ErrorKind::StepSizeUnderflow, "step size underflow at x = " + std::to_string(x));
    }
}

}  // namespace sl4
