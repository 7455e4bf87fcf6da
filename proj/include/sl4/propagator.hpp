#pragma once

#include <string>
#include <vector>

#include "sl4/boundary.hpp"
#include "sl4/ode.hpp"
#include "sl4/problem.hpp"

namespace sl4 {

enum class Direction { FromLeft, FromRight };

/// Frame (U;V) at one point. Columns are kept well scaled: a QR step restores
/// orthonormal columns whenever a column norm leaves [1/4, 4] or the columns
/// are closer than 60 degrees.
///
/// The unnormalized solution is (U;V)·C with det C = exp(log_scale) > 0.
/// For real lambda, `phase` is the continuous argument of det Theta with
/// Theta = (V+iU)(V-iU)^{-1}, and `count` the signed number of det U zeros
/// passed since the initial point.
struct FundamentalSample {
    double x = 0.0;
    Mat2c U = Mat2c::Zero();
    Mat2c V = Mat2c::Zero();
    double log_scale = 0.0;
    double phase = 0.0;
    int count = 0;

    Mat42c frame() const {
        Mat42c y;
        y << U, V;
        return y;
    }
};

struct ZeroEvent {
    double x = 0.0;
    int deficiency = 1;
};

struct FundamentalSolution {
    Direction direction = Direction::FromLeft;
    cplx lambda = 0.0;
    std::vector<FundamentalSample> samples;
    std::vector<ZeroEvent> events;
    std::vector<std::string> warnings;

    bool tracks_zeros() const { return lambda.imag() == 0.0; }
    const FundamentalSample& last() const { return samples.back(); }
    /// Number of det U zeros (with multiplicity) strictly after the start.
    int zero_count() const;
};

/// (U;V) = (-A2*; A1*) at x_end. Both ends use the same formula; the count
/// orientation is carried by the direction.
FundamentalSolution init_fundamental(const RegularPair& bc, Side side, cplx lambda, double x_end);

/// Extends the trajectory to x_to. The problem's coefficients must be finite on
/// the closed span; the span must stay inside the problem interval.
FundamentalSolution propagate(const ProblemSpec& problem, FundamentalSolution fund, double x_to,
                              const StepControl& ctrl = {});

/// Prefix of the trajectory up to (and including) the last sample not beyond x.
FundamentalSolution truncate_trajectory(const FundamentalSolution& fund, double x);

/// Real-scaled determinant of U at a sample: det U / sqrt(det(V+iU) det(V-iU)),
/// real for Lagrangian frames, expressed as (log magnitude, sign).
struct ScaledDet {
    double log_abs;
    int sign;
    /// |det U| / |det(V - iU)| of the normalized frame, in [0, 1].
    double relative;
};
ScaledDet scaled_det_u(const FundamentalSample& s);

/// Throws SingularU when U is numerically singular at the sample nearest x.
WeylMatrix weyl_at(const FundamentalSolution& fund, double x, double singular_tol = 1e-10);

/// Dense scalar solution of J z' = S z.
struct ScalarTrajectory {
    cplx lambda = 0.0;
    std::vector<DenseStep<1>> steps;
    double x0 = 0.0;
    double x1 = 0.0;
    Vec4c z0 = Vec4c::Zero();

    /// Interpolated state anywhere in the covered span.
    QuasiVector at(double x) const;
    QuasiVector end() const { return steps.empty() ? QuasiVector(z0) : QuasiVector(steps.back().y1); }
    /// Step end points including x0.
    std::vector<double> mesh() const;
};

ScalarTrajectory solve_scalar(const ProblemSpec& problem, cplx lambda, const QuasiVector& z0, double x0, double x1,
                              const StepControl& ctrl = {});

/// CSV with columns x, Re/Im of U and V entries, log|det U|, sign.
void write_trajectory_csv(const FundamentalSolution& fund, const std::string& path);

}  // namespace sl4
