#include "sl4/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "sl4/error.hpp"

namespace sl4 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxPhaseStep = std::numbers::pi / 2.0;
constexpr double kSnap = 1e-9;
constexpr double kPhaseConsistency = 1e-3;
constexpr int kInitialPieces = 4;
constexpr int kMaxPhaseDepth = 40;
const cplx kI(0.0, 1.0);

template <int Cols>
Eigen::Matrix<cplx, 4, Cols> apply_system(const CoefficientSet& cs, cplx lambda, double x,
                                          const Eigen::Matrix<cplx, 4, Cols>& y) {
    const CoefficientValues c = evaluate_coefficients_unchecked(cs, x);
    Eigen::Matrix<cplx, 4, Cols> d;
    d.row(0) = y.row(1);
    d.row(1) = y.row(3) / c.p;
    d.row(2) = (c.q - lambda * c.w) * y.row(0);
    d.row(3) = c.s * y.row(1) - y.row(2);
    return d;
}

cplx det2(const Mat2c& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

struct ThetaInfo {
    cplx det;     // det Theta, unit modulus for Lagrangian frames at real lambda
    cplx trace;
    Mat2c theta;
};

ThetaInfo theta_info(const Mat42c& y) {
    const Mat2c U = y.topRows<2>(), V = y.bottomRows<2>();
    const Mat2c P = V + kI * U, M = V - kI * U;
    ThetaInfo t;
    t.theta = P * M.inverse();
    t.det = det2(P) / det2(M);
    t.trace = t.theta.trace();
    return t;
}

// d/dx arg det Theta along y' = rhs(x, y).
template <class Rhs>
double phase_rate(Rhs&& rhs, double x, const Mat42c& y) {
    const Mat42c dy = rhs(x, y);
    const Mat2c U = y.topRows<2>(), V = y.bottomRows<2>();
    const Mat2c dU = dy.topRows<2>(), dV = dy.bottomRows<2>();
    const Mat2c P = V + kI * U, M = V - kI * U;
    return (P.inverse() * (dV + kI * dU)).trace().imag() - (M.inverse() * (dV - kI * dU)).trace().imag();
}

// Sum of floor (upward) or ceil-1 (downward) of the lifted eigen-angles over 2 pi.
int count_from(double phi, const ThetaInfo& t, bool upward, double nudge = 0.0) {
    // H = exp(-i phi/2) Theta has eigenvalues exp(+-i gamma). acos of the trace
    // would turn rounding near H = I into angles of order 1e-8, so sin gamma is
    // taken from the spectrum of the Hermitian part (H - H*) / 2i instead.
    const Mat2c H = std::exp(-kI * (0.5 * phi)) * t.theta;
    const Mat2c K = (H - H.adjoint()) / (2.0 * kI);
    const double c = 0.5 * H.trace().real();
    const double s = std::sqrt(std::pow(0.5 * (K(0, 0) - K(1, 1)).real(), 2) + std::norm(K(0, 1)));
    const double gamma = std::atan2(s, c);
    int n = 0;
    for (double a : {0.5 * phi + gamma, 0.5 * phi - gamma}) {
        if (upward)
            n += static_cast<int>(std::floor((a + nudge) / kTwoPi));
        else
            n += static_cast<int>(std::ceil((a - nudge) / kTwoPi)) - 1;
    }
    return n;
}

double max_rotation(const ThetaInfo& a, const ThetaInfo& b) {
    const Mat2c m = a.theta.adjoint() * b.theta;
    const cplx tr = m.trace(), dt = det2(m);
    const cplx disc = std::sqrt(tr * tr / 4.0 - dt);
    const cplx e1 = tr / 2.0 + disc, e2 = tr / 2.0 - disc;
    return std::max(std::abs(std::arg(e1)), std::abs(std::arg(e2)));
}

// Gram-Schmidt with positive real diagonal: y = Q R.
void orthonormalize(const Mat42c& y, Mat42c& q, Eigen::Matrix<cplx, 2, 2>& r) {
    r.setZero();
    q = y;
    const double n0 = q.col(0).norm();
    r(0, 0) = n0;
    q.col(0) /= n0;
    const cplx proj = q.col(0).dot(q.col(1));
    r(0, 1) = proj;
    q.col(1) -= proj * q.col(0);
    const double n1 = q.col(1).norm();
    r(1, 1) = n1;
    q.col(1) /= n1;
}

bool needs_renormalization(const Mat42c& y) {
    const double a = y.col(0).norm(), b = y.col(1).norm();
    if (a > 4.0 || b > 4.0 || a < 0.25 || b < 0.25) return true;
    const double cosang = std::abs(y.col(0).dot(y.col(1))) / (a * b);
    return cosang > 0.5;
}

FundamentalSample make_sample(double x, const Mat42c& y, double log_scale, double phase, int count) {
    FundamentalSample s;
    s.x = x;
    s.U = y.topRows<2>();
    s.V = y.bottomRows<2>();
    s.log_scale = log_scale;
    s.phase = phase;
    s.count = count;
    return s;
}

}  // namespace

int FundamentalSolution::zero_count() const {
    if (samples.empty()) return 0;
    const int c = samples.back().count - samples.front().count;
    return direction == Direction::FromLeft ? c : -c;
}

FundamentalSolution init_fundamental(const RegularPair& bc, Side side, cplx lambda, double x_end) {
    const RegularPair p = validate_pair(bc.A1, bc.A2, 1e-10);
    FundamentalSolution f;
    f.direction = side == Side::Left ? Direction::FromLeft : Direction::FromRight;
    f.lambda = lambda;
    Mat42c y;
    y << -p.A2.adjoint(), p.A1.adjoint();
    double log_scale = 0.0;
    Mat42c q;
    Mat2c r;
    orthonormalize(y, q, r);
    log_scale = std::log(r(0, 0).real() * r(1, 1).real());
    double phase = 0.0;
    int count = 0;
    if (f.tracks_zeros()) {
        const ThetaInfo t = theta_info(q);
        phase = std::arg(t.det);
        count = count_from(phase, t, f.direction == Direction::FromLeft, kSnap);
    }
    f.samples.push_back(make_sample(x_end, q, log_scale, phase, count));
    return f;
}

FundamentalSolution truncate_trajectory(const FundamentalSolution& fund, double x) {
    FundamentalSolution out = fund;
    const double dir = fund.direction == Direction::FromLeft ? 1.0 : -1.0;
    while (out.samples.size() > 1 && dir * (out.samples.back().x - x) > 0) out.samples.pop_back();
    const double xe = out.samples.back().x;
    while (!out.events.empty() && dir * (out.events.back().x - xe) > 0) out.events.pop_back();
    return out;
}

FundamentalSolution propagate(const ProblemSpec& problem, FundamentalSolution fund, double x_to,
                              const StepControl& ctrl) {
    if (fund.samples.empty()) fail(ErrorKind::PreconditionViolation, "trajectory has no initial sample");
    const double x_from = fund.samples.back().x;
    if (x_to == x_from) return fund;
    const double dir = fund.direction == Direction::FromLeft ? 1.0 : -1.0;
    if (dir * (x_to - x_from) < 0)
        fail(ErrorKind::PreconditionViolation, "propagation must move away from the initial endpoint");
    const auto& iv = problem.interval;
    if (x_to < iv.a || x_to > iv.b) fail(ErrorKind::PreconditionViolation, "target outside the interval");

    const bool track = fund.tracks_zeros();
    const bool upward = fund.direction == Direction::FromLeft;
    const cplx lambda = fund.lambda;
    const auto& cs = problem.coefficients;

    Mat42c y = fund.samples.back().frame();
    double log_scale = fund.samples.back().log_scale;
    double phase = fund.samples.back().phase;
    int count = fund.samples.back().count;
    ThetaInfo th = track ? theta_info(y) : ThetaInfo{};

    auto rhs = [&](double x, const Mat42c& s) { return apply_system<2>(cs, lambda, x, s); };

    struct Knot {
        double x;
        double phase;
        ThetaInfo th;
    };
    std::vector<Knot> knots;
    // Splits [ka, xb] until every piece rotates Theta by less than kMaxPhaseStep.
    // Dense output stands in for the solution, so tiny p (fast rotation) does
    // not force tiny integration steps. Wrapped increments alias a near-2pi
    // turn to a small one, so a piece is accepted only when its two halves are
    // also small and add up to the whole.
    auto small_turn = [](const ThetaInfo& a, const ThetaInfo& b, double& dphi) {
        dphi = std::arg(b.det / a.det);
        return std::abs(dphi) <= kMaxPhaseStep && max_rotation(a, b) <= kMaxPhaseStep;
    };
    auto refine = [&](auto&& self, const DenseStep<2>& ds, const Knot& ka, double xb, const ThetaInfo& thb,
                      int depth) -> bool {
        const double xm = 0.5 * (ka.x + xb);
        if (xm == ka.x || xm == xb) {
            // Adjacent doubles: a turn faster than the resolution of x (tiny p).
            // Its branch follows the rotation direction when both ends agree.
            const double dir = xb > ka.x ? 1.0 : -1.0;
            const double sa = dir * phase_rate(rhs, ka.x, ds.at(ka.x));
            const double sb = dir * phase_rate(rhs, xb, ds.at(xb));
            if (!(sa * sb > 0.0)) return false;
            double d = std::arg(thb.det / ka.th.det);
            if (sa > 0.0 && d < 0.0) d += kTwoPi;
            if (sa < 0.0 && d > 0.0) d -= kTwoPi;
            knots.push_back({xb, ka.phase + d, thb});
            return true;
        }
        const ThetaInfo thm = theta_info(ds.at(xm));
        double d_all = 0.0, d_1 = 0.0, d_2 = 0.0;
        const bool whole = small_turn(ka.th, thb, d_all);
        if (whole && small_turn(ka.th, thm, d_1) && small_turn(thm, thb, d_2) &&
            std::abs(d_1 + d_2 - d_all) < kPhaseConsistency) {
            knots.push_back({xb, ka.phase + d_all, thb});
            return true;
        }
        if (depth >= kMaxPhaseDepth) return false;
        if (!self(self, ds, ka, xm, thm, depth + 1)) return false;
        const Knot km = knots.back();
        return self(self, ds, km, xb, thb, depth + 1);
    };

    auto hook = [&](const DenseStep<2>& ds) -> StepVerdict<2> {
        StepVerdict<2> verdict;
        double new_phase = phase;
        int new_count = count;
        if (track) {
            knots.clear();
            knots.push_back({ds.x0, phase, th});
            bool ok = true;
            for (int piece = 1; ok && piece <= kInitialPieces; ++piece) {
                const double xb = piece == kInitialPieces ? ds.x1() : ds.x0 + ds.h * piece / kInitialPieces;
                const ThetaInfo tb = piece == kInitialPieces ? theta_info(ds.y1) : theta_info(ds.at(xb));
                const Knot ka = knots.back();
                ok = refine(refine, ds, ka, xb, tb, 0);
            }
            if (!ok) {
                verdict.accept = false;
                return verdict;
            }
            new_phase = knots.back().phase;
            new_count = count_from(new_phase, knots.back().th, upward);
            if (new_count != count) {
                const int expected_sign = upward ? 1 : -1;
                if ((new_count - count) * expected_sign < 0)
                    fund.warnings.push_back("det U zero crossed against the expected orientation near x = " +
                                            std::to_string(ds.x1()));
                const double tol = std::max(ctrl.event_refine_tol, 1e-15 * std::abs(ds.x1()));
                int cur = count;
                for (std::size_t k = 1; k < knots.size(); ++k) {
                    const Knot& base = knots[k - 1];
                    auto count_at = [&](double x) {
                        const ThetaInfo t = theta_info(ds.at(x));
                        return count_from(base.phase + std::arg(t.det / base.th.det), t, upward);
                    };
                    const int knot_count = count_from(knots[k].phase, knots[k].th, upward);
                    double lo = base.x;
                    while (cur != knot_count) {
                        double a = lo, b = knots[k].x;
                        int cb = knot_count;
                        while (std::abs(b - a) > tol) {
                            const double mid = 0.5 * (a + b);
                            const int cm = count_at(mid);
                            if (cm == cur) {
                                a = mid;
                            } else {
                                b = mid;
                                cb = cm;
                            }
                        }
                        const double xe = 0.5 * (a + b);
                        fund.events.push_back({xe, std::abs(cb - cur)});
                        Mat42c q;
                        Mat2c r;
                        orthonormalize(ds.at(xe), q, r);
                        const ThetaInfo te = theta_info(q);
                        fund.samples.push_back(make_sample(xe, q,
                                                           log_scale + std::log(r(0, 0).real() * r(1, 1).real()),
                                                           base.phase + std::arg(te.det / base.th.det), cb));
                        cur = cb;
                        if (b == knots[k].x) break;
                        lo = b;
                    }
                    cur = knot_count;
                }
            }
        }
        Mat42c ynew = ds.y1;
        double new_log = log_scale;
        if (needs_renormalization(ynew)) {
            Mat42c q;
            Mat2c r;
            orthonormalize(ynew, q, r);
            verdict.rescale = r.inverse();
            new_log += std::log(r(0, 0).real() * r(1, 1).real());
            ynew = q;
        }
        fund.samples.push_back(make_sample(ds.x1(), ynew, new_log, new_phase, new_count));
        log_scale = new_log;
        phase = new_phase;
        count = new_count;
        if (track) th = theta_info(ynew);
        return verdict;
    };

    StepControl c = ctrl;
    if (c.max_step <= 0) c.max_step = std::abs(x_to - x_from) / 10.0;
    integrate_dopri<2>(rhs, x_from, x_to, y, c, hook);
    return fund;
}

ScaledDet scaled_det_u(const FundamentalSample& s) {
    const cplx du = det2(s.U);
    const cplx dm = det2(s.V - kI * s.U);
    ScaledDet out;
    out.relative = std::abs(du) / std::abs(dm);
    out.log_abs = std::log(std::abs(du)) + s.log_scale;
    const cplx r = du / (dm * std::exp(kI * (0.5 * s.phase)));
    out.sign = r.real() > 0 ? 1 : (r.real() < 0 ? -1 : 0);
    return out;
}

WeylMatrix weyl_at(const FundamentalSolution& fund, double x, double singular_tol) {
    const FundamentalSample* hit = nullptr;
    for (const auto& s : fund.samples)
        if (std::abs(s.x - x) <= 1e-12 * std::max(1.0, std::abs(x))) hit = &s;
    if (!hit) fail(ErrorKind::PreconditionViolation, "x = " + std::to_string(x) + " is not a sample point");
    Eigen::JacobiSVD<Mat2c> svd_u(hit->U);
    Eigen::JacobiSVD<Mat42c> svd_y(hit->frame());
    if (svd_u.singularValues()(1) <= singular_tol * svd_y.singularValues()(0))
        fail(ErrorKind::SingularU, "U is singular at x = " + std::to_string(x));
    WeylMatrix w;
    w.W = hit->V * hit->U.inverse();
    if (fund.lambda.imag() == 0.0) {
        const Mat2c h = 0.5 * (w.W + w.W.adjoint());
        w.symmetrization_defect = (w.W - h).norm() / std::max(1e-300, w.W.norm());
        w.W = h;
    }
    return w;
}

QuasiVector ScalarTrajectory::at(double x) const {
    if (steps.empty()) return QuasiVector(z0);
    const bool forward = x1 >= x0;
    auto it = std::lower_bound(steps.begin(), steps.end(), x, [forward](const DenseStep<1>& s, double v) {
        return forward ? s.x1() < v : s.x1() > v;
    });
    if (it == steps.end()) --it;
    return QuasiVector(Vec4c(it->at(x)));
}

std::vector<double> ScalarTrajectory::mesh() const {
    std::vector<double> m{x0};
    for (const auto& s : steps) m.push_back(s.x1());
    return m;
}

ScalarTrajectory solve_scalar(const ProblemSpec& problem, cplx lambda, const QuasiVector& z0, double x0, double x1,
                              const StepControl& ctrl) {
    const auto& iv = problem.interval;
    if (std::min(x0, x1) < iv.a || std::max(x0, x1) > iv.b)
        fail(ErrorKind::PreconditionViolation, "scalar span outside the interval");
    ScalarTrajectory tr;
    tr.lambda = lambda;
    tr.x0 = x0;
    tr.x1 = x1;
    tr.z0 = z0.z;
    Eigen::Matrix<cplx, 4, 1> y = z0.z;
    const auto& cs = problem.coefficients;
    auto rhs = [&](double x, const Eigen::Matrix<cplx, 4, 1>& s) { return apply_system<1>(cs, lambda, x, s); };
    auto hook = [&](const DenseStep<1>& ds) {
        tr.steps.push_back(ds);
        return StepVerdict<1>{};
    };
    StepControl c = ctrl;
    if (c.max_step <= 0) c.max_step = std::abs(x1 - x0) / 10.0;
    integrate_dopri<1>(rhs, x0, x1, y, c, hook);
    return tr;
}

void write_trajectory_csv(const FundamentalSolution& fund, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot open " + path);
    out << "x";
    for (const char* blk : {"U", "V"})
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) out << ",Re_" << blk << i << j << ",Im_" << blk << i << j;
    out << ",log_abs_det_U,sign\n";
    out.precision(17);
    for (const auto& s : fund.samples) {
        out << s.x;
        for (const Mat2c* m : {&s.U, &s.V})
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out << ',' << (*m)(i, j).real() << ',' << (*m)(i, j).imag();
        const ScaledDet d = scaled_det_u(s);
        out << ',' << d.log_abs << ',' << d.sign << '\n';
    }
}

}  // namespace sl4
