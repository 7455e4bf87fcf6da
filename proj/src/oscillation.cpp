#include "sl4/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sl4/error.hpp"

namespace sl4 {

int nu_neg(const Mat2c& H, double tol) {
    const double s = H.norm();
    if (s == 0.0) return 0;
    if ((H - H.adjoint()).norm() > tol * s) fail(ErrorKind::NotHermitian, "matrix is not Hermitian");
    const double a = H(0, 0).real(), d = H(1, 1).real();
    const double det = a * d - std::norm(H(0, 1));
    const double tr = a + d;
    const double det_rel = det / (s * s), tr_rel = tr / s;
    if (det_rel < -tol) return 1;
    if (det_rel > tol) return tr_rel < 0 ? 2 : 0;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    int n = 0;
    for (double e : {0.5 * (tr - disc), 0.5 * (tr + disc)})
        if (e < -tol * s) ++n;
    return n;
}

RegularProblem make_regular(const ProblemSpec& problem) {
    if (!problem.interval.finite(Side::Left) || !problem.interval.finite(Side::Right))
        fail(ErrorKind::Config, "regular problem needs a finite interval");
    if (!problem.left_bc || !problem.right_bc) fail(ErrorKind::Config, "regular problem needs conditions at both ends");
    RegularProblem rp;
    rp.problem = problem;
    rp.left_bc = as_pair(*problem.left_bc);
    rp.right_bc = as_pair(*problem.right_bc);
    return rp;
}

bool is_dirichlet(const RegularPair& bc, double tol) {
    return bc.A2.norm() <= tol * bc.A1.norm();
}

namespace {

constexpr double kMaxCondition = 1e8;

// Condition number of U rather than a determinant ratio: U and V scale apart
// as |lambda| grows, and only the invertibility of U matters for W.
bool singular_at(const FundamentalSolution& f) {
    Eigen::JacobiSVD<Mat2c> svd(f.last().U);
    const auto& sv = svd.singularValues();
    return !(sv(1) * kMaxCondition > sv(0));
}

}  // namespace

SpectralCount count_below(const RegularProblem& rp, double lambda, std::optional<double> c_opt,
                          const StepControl& ctrl) {
    const double a = rp.a(), b = rp.b();
    double c = c_opt.value_or(0.5 * (a + b));
    if (c < a || c > b) fail(ErrorKind::PreconditionViolation, "matching point outside the interval");
    SpectralCount out;
    out.lambda = lambda;

    FundamentalSolution left = init_fundamental(rp.left_bc, Side::Left, lambda, a);
    if (c == b && is_dirichlet(rp.right_bc)) {
        left = propagate(rp.problem, left, b, ctrl);
        out.c = b;
        out.delta_L = left.zero_count();
        // Zeros exactly at b do not belong to the open interval.
        while (!left.events.empty() && std::abs(left.events.back().x - b) <= ctrl.event_refine_tol * 4) {
            out.delta_L -= left.events.back().deficiency;
            left.events.pop_back();
        }
        out.N = out.delta_L;
        return out;
    }
    FundamentalSolution right = init_fundamental(rp.right_bc, Side::Right, lambda, b);

    const double step = (b - a) * 1e-3;
    std::vector<double> candidates{c};
    for (int m = 1; m <= 10; ++m) {
        candidates.push_back(c + m * step);
        candidates.push_back(c - m * step);
    }
    for (double cc : candidates) {
        if (cc <= a || cc >= b) {
            if (!(cc == c && (cc == a || cc == b))) continue;
        }
        FundamentalSolution l = (left.last().x <= cc) ? left : truncate_trajectory(left, cc);
        FundamentalSolution r = (right.last().x >= cc) ? right : truncate_trajectory(right, cc);
        l = propagate(rp.problem, l, cc, ctrl);
        r = propagate(rp.problem, r, cc, ctrl);
        left = l;
        right = r;
        if (singular_at(l) || singular_at(r)) continue;
        const WeylMatrix wl = weyl_at(l, cc, 0.0), wr = weyl_at(r, cc, 0.0);
        Mat2c diff = wl.W - wr.W;
        diff = 0.5 * (diff + diff.adjoint());
        out.c = cc;
        out.delta_L = l.zero_count();
        out.delta_R = r.zero_count();
        // No zero band: a relative band would hide the small eigenvalue that changes
        // sign at an eigenvalue and bias the count by band * |W_L - W_R|.
        out.sigma = nu_neg(diff, 0.0);
        out.N = out.delta_L + out.delta_R + out.sigma;
        return out;
    }
    fail(ErrorKind::NoValidMatchingPoint,
         "every matching point candidate is singular for one side at lambda = " + std::to_string(lambda));
}

namespace {

class Counter {
public:
    Counter(const RegularProblem& rp, const StepControl& ctrl) : rp_(rp), ctrl_(ctrl) {}
    int operator()(double lambda) {
        auto it = memo_.find(lambda);
        if (it != memo_.end()) return it->second;
        const int n = count_below(rp_, lambda, std::nullopt, ctrl_).N;
        memo_.emplace(lambda, n);
        return n;
    }

private:
    const RegularProblem& rp_;
    const StepControl& ctrl_;
    std::map<double, int> memo_;
};

std::pair<double, double> expand_bracket(Counter& N, int k, std::pair<double, double> br) {
    double lo = std::min(br.first, br.second), hi = std::max(br.first, br.second);
    if (lo == hi) hi = lo + 1.0;
    for (int i = 0; N(lo) > k; ++i) {
        if (i > 80) fail(ErrorKind::BracketFailure, "lower bracket expansion exhausted");
        const double w = hi - lo;
        hi = lo;
        lo -= 2.0 * w;
    }
    for (int i = 0; N(hi) <= k; ++i) {
        if (i > 80) fail(ErrorKind::BracketFailure, "upper bracket expansion exhausted");
        const double w = hi - lo;
        lo = hi;
        hi += 2.0 * w;
    }
    return {lo, hi};
}

double bisect(Counter& N, int k, double lo, double hi, double tol, double rel_tol) {
    while (hi - lo > 2.0 * std::max(tol, rel_tol * std::max(std::abs(lo), std::abs(hi)))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (N(mid) <= k)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double kth_eigenvalue(const RegularProblem& rp, int k, std::pair<double, double> bracket, double tol,
                      const StepControl& ctrl, double rel_tol) {
    if (k < 0) fail(ErrorKind::PreconditionViolation, "eigenvalue index must be nonnegative");
    Counter N(rp, ctrl);
    auto [lo, hi] = expand_bracket(N, k, bracket);
    return bisect(N, k, lo, hi, tol, rel_tol);
}

std::vector<double> eigenvalues_up_to(const RegularProblem& rp, int k_max, std::pair<double, double> bracket,
                                      double tol, const StepControl& ctrl, double rel_tol) {
    Counter N(rp, ctrl);
    std::vector<double> out;
    double lo_floor = std::min(bracket.first, bracket.second);
    for (int k = 0; k <= k_max; ++k) {
        auto br = expand_bracket(N, k, {lo_floor, std::max(bracket.second, lo_floor + 1.0)});
        // Tighten with memoized counts from earlier searches.
        out.push_back(bisect(N, k, br.first, br.second, tol, rel_tol));
        lo_floor = out.back() - 2.0 * tol;
        bracket.second = std::max(bracket.second, out.back() + 1.0);
    }
    return out;
}

}  // namespace sl4
