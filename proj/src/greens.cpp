#include "sl4/greens.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "sl4/quadrature.hpp"
#include "sl4/simd.hpp"
#include "sl4/truncation.hpp"

namespace sl4 {

namespace {

const Mat2c& k_matrix() {
    static const Mat2c k = [] {
        Mat2c m;
        m << 0.0, 1.0, -1.0, 0.0;
        return m;
    }();
    return k;
}

// Bilinear (unconjugated) block form: entry (i,k) = [f_i, conj g_k].
Mat2c bilinear(const Mat42c& f, const Mat42c& g) {
    return f.topRows<2>().transpose() * g.bottomRows<2>() - f.bottomRows<2>().transpose() * g.topRows<2>();
}

Mat42c raw_frame(const std::array<ScalarTrajectory, 2>& raw, double x) {
    Mat42c m;
    m.col(0) = raw[0].at(x).z;
    m.col(1) = raw[1].at(x).z;
    return m;
}

Mat42c initial_frame(const RegularPair& pair) {
    Mat42c y;
    y << -pair.A2.adjoint(), pair.A1.adjoint();
    return y;
}

std::array<ScalarTrajectory, 2> integrate_pair(const ProblemSpec& problem, cplx lambda, const Mat42c& start,
                                               double x0, double x1, const StepControl& ctrl) {
    return {solve_scalar(problem, lambda, QuasiVector(Vec4c(start.col(0))), x0, x1, ctrl),
            solve_scalar(problem, lambda, QuasiVector(Vec4c(start.col(1))), x0, x1, ctrl)};
}

struct Frames {
    Mat42c phi, psi;
};

Frames frames_at(const SolutionBasis& basis, double x) { return {basis.phi(x), basis.psi(x)}; }

}  // namespace

Mat42c SolutionBasis::phi(double x) const { return raw_frame(phi_raw, x) * phi_mix; }
Mat42c SolutionBasis::psi(double x) const { return raw_frame(psi_raw, x) * psi_mix; }

SolutionBasis build_basis(const ProblemSpec& problem, cplx lambda, const BoundaryForm& right_bc, bool real_bc,
                          const GreensOptions& opt) {
    if (lambda.imag() == 0.0) fail(ErrorKind::PreconditionViolation, "the Green's function basis needs nonreal lambda");
    const auto& iv = problem.interval;
    if (!iv.finite(Side::Left) || !iv.finite(Side::Right))
        fail(ErrorKind::PreconditionViolation, "the Green's function basis needs a finite interval");
    if (problem.left_class && problem.left_class->kind != EndpointKind::Regular)
        fail(ErrorKind::PreconditionViolation, "left endpoint must be regular");
    if (!problem.left_bc || std::holds_alternative<LagrangeCondition>(*problem.left_bc))
        fail(ErrorKind::PreconditionViolation, "left endpoint needs a regular boundary pair");

    SolutionBasis basis;
    basis.lambda = lambda;
    basis.a = iv.a;
    basis.real_bc = real_bc;

    const Mat42c left0 = initial_frame(as_pair(*problem.left_bc));
    if (bilinear(left0, left0).norm() > 1e-12 * left0.squaredNorm())
        fail(ErrorKind::PreconditionViolation, "left condition is not real");

    Mat42c right0;
    if (const auto* lc = std::get_if<LagrangeCondition>(&right_bc)) {
        if (lc->functions.size() != 2)
            fail(ErrorKind::PreconditionViolation, "a lim-4 right end needs two condition functions");
        basis.b_ref = iv.b - opt.reference_gap * std::max(1.0, std::abs(iv.b));
        const QuasiVector t1 = evaluate_condition(problem, lc->functions[0], basis.b_ref, opt.ctrl);
        const QuasiVector t2 = evaluate_condition(problem, lc->functions[1], basis.b_ref, opt.ctrl);
        right0 = initial_frame(lim4_pair_from_solutions(t1, t2));
    } else {
        if (problem.right_class && problem.right_class->kind != EndpointKind::Regular)
            fail(ErrorKind::PreconditionViolation, "a singular right end needs condition functions");
        basis.b_ref = iv.b;
        right0 = initial_frame(as_pair(right_bc));
    }

    basis.phi_raw = integrate_pair(problem, lambda, left0, basis.a, basis.b_ref, opt.ctrl);
    basis.psi_raw = integrate_pair(problem, lambda, right0, basis.b_ref, basis.a, opt.ctrl);

    // Dual normalization: with M = U_R^T V_L - V_R^T U_L, psi -> psi M^{-T}.
    basis.normalization_point = 0.5 * (basis.a + basis.b_ref);
    const Mat42c phi_c = raw_frame(basis.phi_raw, basis.normalization_point);
    const Mat42c psi_c = raw_frame(basis.psi_raw, basis.normalization_point);
    const Mat2c m = bilinear(psi_c, phi_c);
    Eigen::JacobiSVD<Mat2c> svd(m);
    const auto& sv = svd.singularValues();
    if (!(sv(1) * opt.max_duality_condition > sv(0)))
        fail(ErrorKind::EigenvalueCollision,
             "left and right solution spaces intersect numerically (duality condition " +
                 std::to_string(sv(0) / sv(1)) + ")");
    basis.psi_mix = m.inverse().transpose();

    cplx alpha = bilinear(basis.psi(basis.normalization_point), basis.psi(basis.normalization_point))(0, 1);
    const double scale = basis.psi(basis.normalization_point).norm() * basis.phi(basis.normalization_point).norm();
    const bool looks_real = std::abs(alpha) <= opt.real_tol * std::max(1.0, scale);
    if (real_bc && !looks_real)
        fail(ErrorKind::PreconditionViolation,
             "right conditions declared real but [psi_1, conj psi_2] = " + std::to_string(std::abs(alpha)));
    if (!real_bc && looks_real)
        fail(ErrorKind::PreconditionViolation, "right conditions declared complex but they are real");
    if (real_bc) {
        basis.alpha = 0.0;
    } else {
        // phi_1 -> alpha phi_1 and psi_1 -> psi_1 / alpha keeps duality and sets alpha to 1.
        basis.phi_mix.col(0) *= alpha;
        basis.psi_mix.col(0) /= alpha;
        basis.alpha = bilinear(basis.psi(basis.normalization_point), basis.psi(basis.normalization_point))(0, 1);
    }
    basis.dual_normalized = dual_defect(basis, basis.normalization_point) <= 1e-9;
    return basis;
}

double dual_defect(const SolutionBasis& basis, double x) {
    const Frames f = frames_at(basis, x);
    return (bilinear(f.psi, f.phi) - Mat2c::Identity()).norm();
}

BlockDefects block_defects(const SolutionBasis& basis, double x) {
    const Frames f = frames_at(basis, x);
    return {bilinear(f.phi, f.phi).norm(), (bilinear(f.psi, f.psi) - basis.alpha * k_matrix()).norm()};
}

Mat4c closed_form_inverse(const SolutionBasis& basis, double x) {
    const Frames f = frames_at(basis, x);
    const Mat2c ul = f.phi.topRows<2>(), vl = f.phi.bottomRows<2>();
    const Mat2c ur = f.psi.topRows<2>(), vr = f.psi.bottomRows<2>();
    const Mat2c& k = k_matrix();
    Mat4c inv;
    inv << -vr.transpose() - basis.alpha * k * vl.transpose(), ur.transpose() + basis.alpha * k * ul.transpose(),
        vl.transpose(), -ul.transpose();
    return inv;
}

double inverse_identity_defect(const SolutionBasis& basis, double x) {
    const Frames f = frames_at(basis, x);
    Mat4c phi;
    phi << f.phi.topRows<2>(), f.psi.topRows<2>(), f.phi.bottomRows<2>(), f.psi.bottomRows<2>();
    return (closed_form_inverse(basis, x) * phi - Mat4c::Identity()).norm();
}

namespace {

// Quasi-vector of G(., t) at x (row 0 is G itself).
Vec4c kernel_state(const SolutionBasis& basis, const Mat42c& phx, const Mat42c& psx, const Mat42c& pht,
                   const Mat42c& pst, bool x_before_t) {
    if (x_before_t) {
        Vec4c r = phx.col(0) * pst(0, 0) + phx.col(1) * pst(0, 1);
        if (basis.alpha != 0.0) r += basis.alpha * (phx.col(0) * pht(0, 1) - phx.col(1) * pht(0, 0));
        return r;
    }
    return psx.col(0) * pht(0, 0) + psx.col(1) * pht(0, 1);
}

}  // namespace

cplx greens_value(const SolutionBasis& basis, double x, double t) { return greens_quasi(basis, x, t)(0); }

Vec4c greens_quasi(const SolutionBasis& basis, double x, double t) {
    const Frames fx = frames_at(basis, x), ft = frames_at(basis, t);
    return kernel_state(basis, fx.phi, fx.psi, ft.phi, ft.psi, x < t);
}

double TruncatedCoefficients::max_abs() const {
    return std::max({std::abs(c1), std::abs(c2), std::abs(d1), std::abs(d2)});
}

TruncatedCoefficients truncated_coefficients(const SolutionBasis& basis, const QuasiVector& theta1,
                                             const QuasiVector& theta2, double b_j, double singular_tol) {
    const Frames f = frames_at(basis, b_j);
    auto br = [&](const Mat42c& m, int i, const QuasiVector& th) {
        return lagrangian_bracket(QuasiVector(Vec4c(m.col(i))), th);
    };
    const cplx p11 = br(f.phi, 0, theta1), p21 = br(f.phi, 1, theta1);
    const cplx p12 = br(f.phi, 0, theta2), p22 = br(f.phi, 1, theta2);
    const cplx s11 = br(f.psi, 0, theta1), s12 = br(f.psi, 0, theta2);
    const cplx s21 = br(f.psi, 1, theta1), s22 = br(f.psi, 1, theta2);

    TruncatedCoefficients co;
    co.b_j = b_j;
    co.delta = p11 * p22 - p21 * p12;
    const double entry = std::max({std::abs(p11), std::abs(p21), std::abs(p12), std::abs(p22)});
    if (!(std::abs(co.delta) > singular_tol * entry * entry))
        fail(ErrorKind::SingularBracketSystem,
             "bracket system singular at b_j = " + std::to_string(b_j) + " (Delta = " + std::to_string(std::abs(co.delta)) +
                 ")");
    // c1 [phi1,th1] + c2 [phi2,th1] = -[psi1,th1], likewise for th2.
    co.c1 = (p21 * s12 - p22 * s11) / co.delta;
    co.c2 = (p12 * s11 - p11 * s12) / co.delta;
    co.d1 = (p21 * s22 - p22 * s21) / co.delta;
    co.d2 = (p12 * s21 - p11 * s22) / co.delta;
    co.alpha_j = basis.alpha + co.d1 - co.c2;

    Mat2c mix;
    mix << co.c1, co.d1, co.c2, co.d2;
    const Mat42c trunc = f.psi + f.phi * mix;
    for (int i = 0; i < 2; ++i)
        for (const QuasiVector* th : {&theta1, &theta2}) co.residual = std::max(co.residual, std::abs(br(trunc, i, *th)));
    return co;
}

TruncatedCoefficients truncated_coefficients(const ProblemSpec& problem, const SolutionBasis& basis,
                                             const LagrangeCondition& cond, double b_j, const StepControl& ctrl) {
    if (cond.functions.size() != 2) fail(ErrorKind::PreconditionViolation, "need two condition functions");
    return truncated_coefficients(basis, evaluate_condition(problem, cond.functions[0], b_j, ctrl),
                                  evaluate_condition(problem, cond.functions[1], b_j, ctrl), b_j);
}

cplx truncated_greens_value(const SolutionBasis& basis, const TruncatedCoefficients& co, double x, double t) {
    if (x > co.b_j || t > co.b_j) return 0.0;
    const Frames fx = frames_at(basis, x), ft = frames_at(basis, t);
    const bool before = x < t;
    // Lower point carries phi, upper point carries psi^(j).
    const Mat42c& lo = before ? fx.phi : ft.phi;
    const Mat42c& hi_phi = before ? ft.phi : fx.phi;
    const Mat42c& hi_psi = before ? ft.psi : fx.psi;
    const cplx psi1 = hi_psi(0, 0) + co.c1 * hi_phi(0, 0) + co.c2 * hi_phi(0, 1);
    const cplx psi2 = hi_psi(0, 1) + co.d1 * hi_phi(0, 0) + co.d2 * hi_phi(0, 1);
    cplx g = lo(0, 0) * psi1 + lo(0, 1) * psi2;
    if (before) g += co.alpha_j * (fx.phi(0, 0) * ft.phi(0, 1) - fx.phi(0, 1) * ft.phi(0, 0));
    return g;
}

KernelGrid make_kernel_grid(const ProblemSpec& problem, double a, double b, std::vector<double> breaks, int subdivide,
                            int order) {
    if (!(b > a)) fail(ErrorKind::PreconditionViolation, "kernel grid needs a < b");
    if (subdivide < 1 || order < 1) fail(ErrorKind::PreconditionViolation, "kernel grid needs positive sizes");
    breaks.push_back(a);
    breaks.push_back(b);
    std::erase_if(breaks, [&](double x) { return x < a || x > b; });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    KernelGrid g;
    g.order = order;
    const GaussRule& rule = gauss_legendre_rule(order);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        for (int s = 0; s < subdivide; ++s) {
            const double lo = breaks[i] + (breaks[i + 1] - breaks[i]) * s / subdivide;
            const double hi = s + 1 == subdivide ? breaks[i + 1] : breaks[i] + (breaks[i + 1] - breaks[i]) * (s + 1) / subdivide;
            g.breaks.push_back(lo);
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double x = mid + half * rule.nodes[k];
                g.nodes.push_back(x);
                g.weights.push_back(half * rule.weights[k] * evaluate_coefficients_unchecked(problem.coefficients, x).w);
            }
        }
    }
    g.breaks.push_back(breaks.back());
    return g;
}

KernelGrid refine_grid(const ProblemSpec& problem, const KernelGrid& grid) {
    return make_kernel_grid(problem, grid.breaks.front(), grid.breaks.back(), grid.breaks, 2, grid.order);
}

std::vector<cplx> sample_kernel(const SolutionBasis& basis, const KernelGrid& grid) {
    const std::size_t n = grid.nodes.size();
    std::vector<Frames> fr;
    fr.reserve(n);
    for (double x : grid.nodes) fr.push_back(frames_at(basis, x));
    std::vector<cplx> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            out[i * n + k] = kernel_state(basis, fr[i].phi, fr[i].psi, fr[k].phi, fr[k].psi, i < k)(0);
    return out;
}

namespace {

// Node values of psi_1, psi_2, phi_1, phi_2 as planar columns.
struct ColumnTable {
    std::array<std::vector<double>, 4> re, im;
    std::array<const double*, 4> re_ptr{}, im_ptr{};

    ColumnTable(const SolutionBasis& basis, const KernelGrid& grid) {
        const std::size_t n = grid.nodes.size();
        for (auto& v : re) v.resize(n);
        for (auto& v : im) v.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const Frames f = frames_at(basis, grid.nodes[k]);
            const std::array<cplx, 4> vals{f.psi(0, 0), f.psi(0, 1), f.phi(0, 0), f.phi(0, 1)};
            for (int m = 0; m < 4; ++m) {
                re[m][k] = vals[m].real();
                im[m][k] = vals[m].imag();
            }
        }
        for (int m = 0; m < 4; ++m) {
            re_ptr[m] = re[m].data();
            im_ptr[m] = im[m].data();
        }
    }
    cplx at(int m, std::size_t k) const { return {re[m][k], im[m][k]}; }
    simd::PlanarColumns cols() const { return {re_ptr, im_ptr}; }
};

// Sum over one row segment of w_k |sum_m coef_m col_m(t_k)|^2.
double row_segment(const ColumnTable& tab, const KernelGrid& grid, const std::array<cplx, 4>& coef, std::size_t b,
                   std::size_t e) {
    return simd::weighted_combination_norm2(grid.weights.data(), coef, tab.cols(), b, e);
}

double distance_impl(const SolutionBasis& basis, const TruncatedCoefficients* co, const KernelGrid& grid, double a_j,
                     double b_j) {
    const ColumnTable tab(basis, grid);
    const std::size_t n = grid.nodes.size();
    // Nodes inside (a_j, b_j) form the index range [lo, hi).
    const std::size_t lo = static_cast<std::size_t>(
        std::lower_bound(grid.nodes.begin(), grid.nodes.end(), a_j) - grid.nodes.begin());
    const std::size_t hi = static_cast<std::size_t>(
        std::upper_bound(grid.nodes.begin(), grid.nodes.end(), b_j) - grid.nodes.begin());
    const cplx alpha = basis.alpha;
    const cplx dalpha = co ? co->alpha_j - alpha : cplx(0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ps1 = tab.at(0, i), ps2 = tab.at(1, i), ph1 = tab.at(2, i), ph2 = tab.at(3, i);
        // G for t <= x: psi(x) . phi(t); for t > x: phi(x) . psi(t) + alpha (phi1(x) phi2(t) - phi2(x) phi1(t)).
        const std::array<cplx, 4> g_below{0.0, 0.0, ps1, ps2};
        const std::array<cplx, 4> g_above{ph1, ph2, -alpha * ph2, alpha * ph1};
        double row = 0.0;
        const bool inside_row = i >= lo && i < hi;
        if (!inside_row) {
            row += row_segment(tab, grid, g_below, 0, i + 1);
            row += row_segment(tab, grid, g_above, i + 1, n);
        } else {
            // Outside columns keep the full kernel.
            row += row_segment(tab, grid, g_below, 0, lo);
            row += row_segment(tab, grid, g_above, hi, n);
            if (co) {
                // G - G_j on the square: minus the phi-phi correction terms.
                const std::array<cplx, 4> d_below{0.0, 0.0, -(co->c1 * ph1 + co->c2 * ph2),
                                                  -(co->d1 * ph1 + co->d2 * ph2)};
                const std::array<cplx, 4> d_above{0.0, 0.0, -(co->c1 * ph1 + co->d1 * ph2) + dalpha * ph2,
                                                  -(co->c2 * ph1 + co->d2 * ph2) - dalpha * ph1};
                row += row_segment(tab, grid, d_below, lo, i + 1);
                row += row_segment(tab, grid, d_above, i + 1, hi);
            }
        }
        total += grid.weights[i] * row;
    }
    return std::sqrt(total);
}

}  // namespace

double hs_distance(const SolutionBasis& basis, const TruncatedCoefficients& co, const KernelGrid& grid, double a_j,
                   double b_j) {
    if (b_j > co.b_j * (1 + 1e-15) + 1e-300 || b_j < co.b_j * (1 - 1e-15) - 1e-300)
        fail(ErrorKind::PreconditionViolation, "coefficients were computed for a different b_j");
    return distance_impl(basis, &co, grid, a_j, b_j);
}

double tail_hs_distance(const SolutionBasis& basis, const KernelGrid& grid, double a_j, double b_j) {
    return distance_impl(basis, nullptr, grid, a_j, b_j);
}

std::vector<cplx> kernel_eigenvalues(const SolutionBasis& basis, const KernelGrid& grid, int count) {
    const std::size_t n = grid.nodes.size();
    const std::vector<cplx> g = sample_kernel(basis, grid);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                std::sqrt(grid.weights[i]) * g[i * n + k] * std::sqrt(grid.weights[k]);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
    if (count >= 0 && static_cast<std::size_t>(count) < ev.size()) ev.resize(static_cast<std::size_t>(count));
    return ev;
}

ResolventCheck resolvent_residual(const ProblemSpec& problem, const SolutionBasis& basis, const KernelGrid& grid,
                                  const std::function<double(double)>& f, double support_lo, double support_hi) {
    const int order = grid.order;
    const GaussRule& rule = gauss_legendre_rule(order);
    constexpr int kSupportPanels = 24;
    const auto& cs = problem.coefficients;

    // Quadrature over the support of f, split at x so each piece is smooth.
    auto apply = [&](double x) {
        const Frames fx = frames_at(basis, x);
        Vec4c y = Vec4c::Zero();
        auto piece = [&](double lo, double hi) {
            if (!(hi > lo)) return;
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double t = mid + half * rule.nodes[k];
                const Frames ft = frames_at(basis, t);
                const double wt = half * rule.weights[k] * f(t) * evaluate_coefficients_unchecked(cs, t).w;
                y += wt * kernel_state(basis, fx.phi, fx.psi, ft.phi, ft.psi, x < t);
            }
        };
        for (int p = 0; p < kSupportPanels; ++p) {
            const double lo = support_lo + (support_hi - support_lo) * p / kSupportPanels;
            const double hi = support_lo + (support_hi - support_lo) * (p + 1) / kSupportPanels;
            if (x > lo && x < hi) {
                piece(lo, x);
                piece(x, hi);
            } else {
                piece(lo, hi);
            }
        }
        return y;
    };

    ResolventCheck out;
    double err2 = 0.0, ref2 = 0.0;
    Vec4c y_prev = apply(grid.breaks.front());
    for (std::size_t pnl = 0; pnl + 1 < grid.breaks.size(); ++pnl) {
        const double lo = grid.breaks[pnl], hi = grid.breaks[pnl + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        cplx forcing = 0.0;
        double source = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = mid + half * rule.nodes[k];
            const CoefficientValues c = evaluate_coefficients_unchecked(cs, x);
            forcing += half * rule.weights[k] * (c.q - basis.lambda * c.w) * apply(x)(0);
            source += half * rule.weights[k] * f(x) * c.w;
        }
        const Vec4c y_next = apply(hi);
        // Recovered int f w over the panel versus the exact one.
        const cplx recovered = forcing - (y_next(2) - y_prev(2));
        err2 += std::norm(recovered - source);
        ref2 += source * source;
        y_prev = y_next;
        ++out.panels;
    }
    out.relative_error = ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
    return out;
}

void write_kernel_csv(const SolutionBasis& basis, const KernelGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot open " + path);
    out << "x,t,re_G,im_G\n" << std::setprecision(15);
    const std::vector<cplx> g = sample_kernel(basis, grid);
    const std::size_t n = grid.nodes.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            out << grid.nodes[i] << ',' << grid.nodes[k] << ',' << g[i * n + k].real() << ',' << g[i * n + k].imag()
                << '\n';
}

void write_distance_csv(const std::vector<DistanceRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot open " + path);
    out << "j,b_j,hs_distance\n" << std::setprecision(15);
    for (const auto& r : rows) out << r.j << ',' << r.b_j << ',' << r.hs_distance << '\n';
}

}  // namespace sl4
