#include "fem_oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <lapacke.h>

namespace sl4::testing {

EndForm end_form(const RegularPair& pair) {
    if (pair.A1.imag().norm() != 0.0 || pair.A2.imag().norm() != 0.0)
        throw std::invalid_argument("oracle needs real boundary conditions");
    // Lagrangian plane spanned by (U0; V0) = (-A2^T; A1^T).
    const Eigen::Matrix2d U0 = -pair.A2.real().transpose();
    const Eigen::Matrix2d V0 = pair.A1.real().transpose();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(U0, Eigen::ComputeFullU);
    const double scale = std::max(1.0, std::max(U0.norm(), V0.norm()));
    int r = 0;
    for (int i = 0; i < 2; ++i)
        if (svd.singularValues()(i) > 1e-12 * scale) ++r;
    EndForm f;
    f.E = svd.matrixU().leftCols(r);
    if (r == 0) {
        f.W.resize(0, 0);
        return f;
    }
    const Eigen::MatrixXd EtU = f.E.transpose() * U0;  // r x 2, full row rank
    const Eigen::MatrixXd pinv = EtU.transpose() * (EtU * EtU.transpose()).inverse();
    const Eigen::MatrixXd W = f.E.transpose() * V0 * pinv;
    f.W = 0.5 * (W + W.transpose());
    return f;
}

namespace {

// Hermite cubic shape functions on [0, 1] for element length h: values and
// first and second x-derivatives. The slope degrees of freedom are h y', which
// keeps stiffness and mass entries of one scale within each matrix.
void shapes(double xi, double h, double N[4], double dN[4], double d2N[4]) {
    const double x2 = xi * xi, x3 = x2 * xi;
    N[0] = 1 - 3 * x2 + 2 * x3;
    N[1] = xi - 2 * x2 + x3;
    N[2] = 3 * x2 - 2 * x3;
    N[3] = -x2 + x3;
    dN[0] = (-6 * xi + 6 * x2) / h;
    dN[1] = (1 - 4 * xi + 3 * x2) / h;
    dN[2] = (6 * xi - 6 * x2) / h;
    dN[3] = (-2 * xi + 3 * x2) / h;
    d2N[0] = (-6 + 12 * xi) / (h * h);
    d2N[1] = (-4 + 6 * xi) / (h * h);
    d2N[2] = (6 - 12 * xi) / (h * h);
    d2N[3] = (-2 + 6 * xi) / (h * h);
}

// Eigenvalues il..iu (1-based, ascending) of A x = mu B x for symmetric A and
// positive definite B with bandwidth 3.
std::vector<double> banded_generalized(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                                       int il, int iu) {
    using Sp = Eigen::SparseMatrix<double>;
    constexpr int kd = 3;
    const int ld = kd + 1;
    const int m = static_cast<int>(A.rows());
    std::vector<double> ab(static_cast<std::size_t>(ld) * m, 0.0), bb(ab.size(), 0.0);
    auto put = [&](std::vector<double>& band, const Sp& S) {
        for (int j = 0; j < S.outerSize(); ++j)
            for (Sp::InnerIterator it(S, j); it; ++it) {
                const int i = static_cast<int>(it.row());
                if (i > j) continue;
                if (j - i > kd) throw std::logic_error("bandwidth exceeded");
                band[static_cast<std::size_t>(kd + i - j + j * ld)] = it.value();
            }
    };
    put(ab, A);
    put(bb, B);
    std::vector<double> w(static_cast<std::size_t>(m)), q(1), z(1);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(m));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'N', 'I', 'U', m, kd, kd, ab.data(), ld, bb.data(), ld,
                                           q.data(), 1, 0.0, 0.0, il, iu, 0.0, &found, w.data(), z.data(), 1,
                                           ifail.data());
    if (info != 0 || found != iu - il + 1) throw std::runtime_error("dsbgvx failed: info " + std::to_string(info));
    return {w.begin(), w.begin() + found};
}

}  // namespace

std::vector<double> fem_eigenvalues(const CoefficientSet& c, double a, double b, const RegularPair& left,
                                    const RegularPair& right, int elements, int count) {
    using Sp = Eigen::SparseMatrix<double>;
    constexpr int kGauss = 5;
    const int n = 2 * (elements + 1);
    const double h = (b - a) / elements;
    static const double gx[kGauss] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                      0.9061798459386640};
    static const double gw[kGauss] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                      0.4786286704993665, 0.2369268850561891};
    // Shape data and weighted coefficients are kept per Gauss point so the energy
    // form can be re-evaluated from derivative values.
    double N[kGauss][4], dN[kGauss][4], d2N[kGauss][4];
    for (int g = 0; g < kGauss; ++g) shapes(0.5 * (gx[g] + 1.0), h, N[g], dN[g], d2N[g]);
    struct Point {
        double p, s, q, w;
    };
    std::vector<Point> pts(static_cast<std::size_t>(elements) * kGauss);
    std::vector<Eigen::Triplet<double>> kt, mt;
    for (int e = 0; e < elements; ++e) {
        double Ke[4][4] = {}, Me[4][4] = {};
        for (int g = 0; g < kGauss; ++g) {
            const double x = a + (e + 0.5 * (gx[g] + 1.0)) * h;
            const double wt = 0.5 * gw[g] * h;
            Point& pt = pts[static_cast<std::size_t>(e * kGauss + g)];
            pt = {wt * c.p(x), wt * c.s(x), wt * c.q(x), wt * c.w(x)};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    Ke[i][j] += pt.p * d2N[g][i] * d2N[g][j] + pt.s * dN[g][i] * dN[g][j] + pt.q * N[g][i] * N[g][j];
                    Me[i][j] += pt.w * N[g][i] * N[g][j];
                }
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                kt.emplace_back(2 * e + i, 2 * e + j, Ke[i][j]);
                mt.emplace_back(2 * e + i, 2 * e + j, Me[i][j]);
            }
    }
    Sp K(n, n), M(n, n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());

    // Essential conditions: the end values (y, y') are E t, so (y, h y') = diag(1, h) E t.
    const EndForm fl = end_form(left), fr = end_form(right);
    const int rl = static_cast<int>(fl.E.cols()), rr = static_cast<int>(fr.E.cols());
    const int m = n - 4 + rl + rr;
    if (count + 4 > m) throw std::invalid_argument("too few elements for the requested count");
    std::vector<Eigen::Triplet<double>> tt;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < rl; ++j) tt.emplace_back(i, j, (i == 1 ? h : 1.0) * fl.E(i, j));
    for (int i = 2; i < n - 2; ++i) tt.emplace_back(i, i - 2 + rl, 1.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < rr; ++j) tt.emplace_back(n - 2 + i, n - 4 + rl + j, (i == 1 ? h : 1.0) * fr.E(i, j));
    Sp T(n, m);
    T.setFromTriplets(tt.begin(), tt.end());
    Sp Kr = Sp(T.transpose() * K * T), Mr = Sp(T.transpose() * M * T);

    // Natural parts: Q(y) = a(y, y) + t_a^T W_a t_a - t_b^T W_b t_b.
    for (int i = 0; i < rl; ++i)
        for (int j = 0; j < rl; ++j) Kr.coeffRef(i, j) += fl.W(i, j);
    for (int i = 0; i < rr; ++i)
        for (int j = 0; j < rr; ++j) Kr.coeffRef(m - rr + i, m - rr + j) -= fr.W(i, j);

    // Energy Gram matrix of the columns of Y evaluated from y'', y', y at the
    // Gauss points. Assembled stiffness entries are of size h^-3 and cancel on
    // smooth vectors, so x^T K x loses eps h^-4 absolutely; derivative values
    // only lose eps h^-2.
    Eigen::VectorXd Pw(kGauss * elements), Sw(kGauss * elements), Qw(kGauss * elements);
    for (int r = 0; r < kGauss * elements; ++r) {
        const Point& pt = pts[static_cast<std::size_t>(r)];
        Pw(r) = pt.p;
        Sw(r) = pt.s;
        Qw(r) = pt.q;
    }
    auto energy = [&](const Eigen::MatrixXd& Y) {
        const Eigen::MatrixXd F = T * Y;
        const Eigen::Index cols = Y.cols();
        Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(kGauss * elements, cols), D1 = D2, D0 = D2;
        for (int e = 0; e < elements; ++e)
            for (int g = 0; g < kGauss; ++g) {
                const int r = e * kGauss + g;
                for (int i = 0; i < 4; ++i) {
                    D2.row(r) += d2N[g][i] * F.row(2 * e + i);
                    D1.row(r) += dN[g][i] * F.row(2 * e + i);
                    D0.row(r) += N[g][i] * F.row(2 * e + i);
                }
            }
        Eigen::MatrixXd G = D2.transpose() * Pw.asDiagonal() * D2 + D1.transpose() * Sw.asDiagonal() * D1 +
                            D0.transpose() * Qw.asDiagonal() * D0;
        G += Y.topRows(rl).transpose() * fl.W * Y.topRows(rl);
        G -= Y.bottomRows(rr).transpose() * fr.W * Y.bottomRows(rr);
        return Eigen::MatrixXd(0.5 * (G + G.transpose()));
    };

    // A rough direct solve places the shift below lambda_0; shift-inverted
    // subspace iteration then converges on the lowest modes, and the Ritz values
    // use the stable energy form.
    const int block = count + 4;
    const double rough = banded_generalized(Kr, Mr, 1, 1).front();
    double sigma = rough - 1.0 - 0.1 * std::abs(rough);
    Eigen::SimplicialLLT<Sp> llt;
    for (int attempt = 0;; ++attempt, sigma -= 10.0 * (1.0 + std::abs(sigma))) {
        if (attempt == 8) throw std::runtime_error("no positive definite shift found");
        llt.compute(Sp(Kr - sigma * Mr));
        if (llt.info() == Eigen::Success) break;
    }
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(m, block);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = nd(rng);
    Eigen::VectorXd ritz = Eigen::VectorXd::Constant(block, std::numeric_limits<double>::infinity());
    for (int it = 0; it < 500; ++it) {
        const Eigen::MatrixXd Y = llt.solve(Mr * X);
        const Eigen::MatrixXd A = energy(Y);
        Eigen::MatrixXd B = Y.transpose() * Mr * Y;
        B = 0.5 * (B + B.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
        if (ges.info() != Eigen::Success) throw std::runtime_error("Rayleigh-Ritz failed");
        X = Y * ges.eigenvectors();
        const Eigen::VectorXd next = ges.eigenvalues();
        double change = 0.0;
        for (int k = 0; k < count; ++k)
            change = std::max(change, std::abs(next(k) - ritz(k)) / std::max(1.0, std::abs(next(k))));
        ritz = next;
        if (change < 1e-14 && it > 2) break;
        for (int k = 0; k < block; ++k) X.col(k) /= X.col(k).norm();
    }
    return {ritz.data(), ritz.data() + count};
}

std::vector<double> clamped_roots(int count) {
    // cos k = 1 / cosh k has one root near (n + 1/2) pi for each n >= 1.
    auto g = [](double k) { return std::cos(k) - 1.0 / std::cosh(k); };
    std::vector<double> roots;
    for (int n = 1; static_cast<int>(roots.size()) < count; ++n) {
        double lo = (n + 0.5) * std::numbers::pi - 0.6, hi = (n + 0.5) * std::numbers::pi + 0.6;
        if (g(lo) * g(hi) > 0) throw std::logic_error("root not bracketed");
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

}  // namespace sl4::testing
