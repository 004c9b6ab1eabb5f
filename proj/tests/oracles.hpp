// Independent reference computations used only by the test suites. Nothing
// here calls into the estimator or bounds code paths it is used to check.
#ifndef FDCE_TESTS_ORACLES_HPP
#define FDCE_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "fdce/types.hpp"

namespace oracle {

using fdce::cplx;

/// Every (permutation, ratio) pair with x_k = c x_{g(k)}, by enumerating all M! permutations.
inline std::vector<cplx> brute_force_symmetry_ratios(const std::vector<cplx>& pts, double tol) {
    std::vector<std::size_t> g(pts.size());
    std::iota(g.begin(), g.end(), 0);
    std::vector<cplx> ratios;
    do {
        if (std::abs(pts[g[0]]) < tol) continue;
        const cplx c = pts[0] / pts[g[0]];
        if (std::abs(c - 1.0) < tol || std::abs(std::abs(c) - 1.0) > tol) continue;
        bool ok = true;
        for (std::size_t k = 0; k < pts.size() && ok; ++k) ok = std::abs(pts[k] - c * pts[g[k]]) < tol;
        if (ok) ratios.push_back(c);
    } while (std::next_permutation(g.begin(), g.end()));
    return ratios;
}

/// ln f(y; phi) by direct summation of exponentials (no stabilisation).
inline double naive_log_likelihood(std::span<const cplx> y, std::span<const cplx> x_a, cplx h_aa,
                                   cplx h_ba, std::span<const cplx> alphabet, double s2) {
    const double m = static_cast<double>(alphabet.size());
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = 0.0;
        for (auto xk : alphabet) f += std::exp(-std::norm(y[i] - h_ba * xk - h_aa * x_a[i]) / s2);
        total += std::log(f / (m * fdce::pi * s2));
    }
    return total;
}

/// Posterior of symbol k at observation i as a plain ratio of exponentials.
inline double direct_posterior(cplx y, cplx x_a, cplx h_aa, cplx h_ba, std::span<const cplx> alphabet,
                               double s2, std::size_t k) {
    double den = 0.0;
    for (auto xk : alphabet) den += std::exp(-std::norm(y - h_ba * xk - h_aa * x_a) / s2);
    return std::exp(-std::norm(y - h_ba * alphabet[k] - h_aa * x_a) / s2) / den;
}

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

inline Mat4 to_eigen(const std::array<std::array<double, 4>, 4>& m) {
    Mat4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(r, c) = m[r][c];
    return out;
}

/// Generic dense solve with partial-pivot LU.
inline Vec4 generic_solve(const Mat4& s, const Vec4& v) { return s.partialPivLu().solve(v); }

/**
 * Complex least squares min ||y - A h|| through a QR factorisation of the
 * N x P design, returned as interleaved real/imag parts.
 */
inline std::vector<double> complex_ls(const std::vector<std::vector<cplx>>& columns,
                                      std::span<const cplx> y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto p = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXcd a(n, p);
    Eigen::VectorXcd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b(i) = y[i];
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = columns[j][i];
    }
    const Eigen::VectorXcd h = a.colPivHouseholderQr().solve(b);
    std::vector<double> out;
    for (Eigen::Index j = 0; j < p; ++j) {
        out.push_back(h(j).real());
        out.push_back(h(j).imag());
    }
    return out;
}

/// Central finite-difference gradient.
template <class F>
Vec4 fd_gradient(F&& f, const Vec4& x, double h) {
    Vec4 g;
    for (int j = 0; j < 4; ++j) {
        Vec4 xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        g(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Central finite-difference Hessian.
template <class F>
Mat4 fd_hessian(F&& f, const Vec4& x, double h) {
    Mat4 hess;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Vec4 pp = x, pm = x, mp = x, mm = x;
            pp(a) += h; pp(b) += h;
            pm(a) += h; pm(b) -= h;
            mp(a) -= h; mp(b) += h;
            mm(a) -= h; mm(b) -= h;
            hess(a, b) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    return hess;
}

}  // namespace oracle

#endif  // FDCE_TESTS_ORACLES_HPP
