#ifndef FDCE_ESTIMATOR_HPP
#define FDCE_ESTIMATOR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "fdce/types.hpp"

namespace fdce {

// Blind EM estimation of (h_aa, h_ba) from y = h_aa x_a + h_ba x_b + w, with
// x_a known and x_b uniform over a (shifted) alphabet.

struct degenerate_update_error : estimation_error { using estimation_error::estimation_error; };

struct divergence_error : estimation_error {
    divergence_error(const std::string& what, std::vector<double> trace)
        : estimation_error(what), loglik_trace(std::move(trace)) {}
    std::vector<double> loglik_trace;
};

namespace detail {

inline void check_inputs(std::span<const cplx> y, std::span<const cplx> x_a,
                         std::span<const cplx> alphabet, double noise_var) {
    if (!(noise_var > 0.0)) throw parameter_error("noise variance must be positive");
    if (y.size() != x_a.size()) throw frame_error("y and x_a must have equal length");
    if (alphabet.empty()) throw parameter_error("alphabet must not be empty");
}

}  // namespace detail

/**
 * ln f(y; phi) = -N ln(M pi s2) + sum_i ln sum_k exp(-|y_i - h_aa x_a_i - h_ba x_k|^2 / s2),
 * evaluated with a per-observation log-sum-exp.
 */
inline double log_likelihood(std::span<const cplx> y, std::span<const cplx> x_a,
                             const ParamVector& phi, std::span<const cplx> alphabet,
                             double noise_var) {
    detail::check_inputs(y, x_a, alphabet, noise_var);
    const cplx h_aa = phi.h_aa();
    const cplx h_ba = phi.h_ba();
    const double m = static_cast<double>(alphabet.size());
    std::vector<double> expo(alphabet.size());
    double total = -static_cast<double>(y.size()) * std::log(m * pi * noise_var);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const cplx r0 = y[i] - h_aa * x_a[i];
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < alphabet.size(); ++k) {
            expo[k] = -std::norm(r0 - h_ba * alphabet[k]) / noise_var;
            mx = std::max(mx, expo[k]);
        }
        double acc = 0.0;
        for (double e : expo) acc += std::exp(e - mx);
        total += mx + std::log(acc);
    }
    return total;
}

/// E-step responsibilities T(k, i), stored column by column (one column per observation).
class PosteriorMatrix {
public:
    PosteriorMatrix() = default;
    PosteriorMatrix(std::size_t order, std::size_t n) : m_(order), n_(n), t_(order * n) {}

    std::size_t order() const { return m_; }
    std::size_t size() const { return n_; }

    double operator()(std::size_t k, std::size_t i) const { return t_[i * m_ + k]; }
    double& operator()(std::size_t k, std::size_t i) { return t_[i * m_ + k]; }

    std::span<const double> column(std::size_t i) const { return {t_.data() + i * m_, m_}; }
    std::span<double> column(std::size_t i) { return {t_.data() + i * m_, m_}; }

private:
    std::size_t m_ = 0;
    std::size_t n_ = 0;
    std::vector<double> t_;
};

/// Column-wise softmax of -|y_i - h_ba x_k - h_aa x_a_i|^2 / s2 over k.
inline PosteriorMatrix posterior_matrix(std::span<const cplx> y, std::span<const cplx> x_a,
                                        const ParamVector& phi, std::span<const cplx> alphabet,
                                        double noise_var) {
    detail::check_inputs(y, x_a, alphabet, noise_var);
    const cplx h_aa = phi.h_aa();
    const cplx h_ba = phi.h_ba();
    PosteriorMatrix t(alphabet.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto col = t.column(i);
        const cplx r0 = y[i] - h_aa * x_a[i];
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < alphabet.size(); ++k) {
            col[k] = -std::norm(r0 - h_ba * alphabet[k]) / noise_var;
            mx = std::max(mx, col[k]);
        }
        double acc = 0.0;
        for (auto& v : col) {
            v = std::exp(v - mx);
            acc += v;
        }
        for (auto& v : col) v /= acc;
    }
    return t;
}

using Matrix4 = std::array<std::array<double, 4>, 4>;

/**
 * Sufficient statistics of the M-step. The normal equations are S phi = v with
 *
 *   S = [ s1   0   s2   s3 ]
 *       [  0  s1  -s3   s2 ]
 *       [ s2 -s3   s4    0 ]
 *       [ s3  s2    0   s4 ]
 *
 * and det S = (s1 s4 - s2^2 - s3^2)^2.
 */
struct MStepAccumulators {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double v1 = 0, v2 = 0, v3 = 0, v4 = 0;

    /// s1 s4 - s2^2 - s3^2, the third leading minor of S divided by s1.
    double reduced_det() const { return s1 * s4 - s2 * s2 - s3 * s3; }

    Matrix4 S() const {
        return {{{s1, 0.0, s2, s3}, {0.0, s1, -s3, s2}, {s2, -s3, s4, 0.0}, {s3, s2, 0.0, s4}}};
    }
    std::array<double, 4> v() const { return {v1, v2, v3, v4}; }

    /// Sylvester's criterion on the Hessian 2S.
    bool hessian_psd() const { return s1 > 0.0 && reduced_det() > 0.0; }

    bool singular() const { return !(reduced_det() > 1e-12 * s1 * s1); }

    /// Closed-form S^{-1} v.
    ParamVector solve() const {
        if (singular())
            throw degenerate_update_error("M-step normal equations are singular");
        const double d = reduced_det();
        return ParamVector(std::array<double, 4>{
            (-s2 * v3 - s3 * v4 + s4 * v1) / d,
            (-s2 * v4 + s3 * v3 + s4 * v2) / d,
            (s1 * v3 - s2 * v1 + s3 * v2) / d,
            (s1 * v4 - s2 * v2 - s3 * v1) / d,
        });
    }
};

/// Shifted symbols are used throughout; pass the transmitted x_a as seen on air.
inline MStepAccumulators accumulate(const PosteriorMatrix& t, std::span<const cplx> y,
                                    std::span<const cplx> x_a, std::span<const cplx> alphabet) {
    if (t.size() != y.size() || y.size() != x_a.size() || t.order() != alphabet.size())
        throw frame_error("posterior, observations and alphabet sizes disagree");
    MStepAccumulators a;
    std::vector<double> energy(alphabet.size());
    for (std::size_t k = 0; k < alphabet.size(); ++k) energy[k] = std::norm(alphabet[k]);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto col = t.column(i);
        // posterior mean of x_b and of |x_b|^2
        cplx xb_mean{};
        double eb = 0.0;
        for (std::size_t k = 0; k < alphabet.size(); ++k) {
            xb_mean += col[k] * alphabet[k];
            eb += col[k] * energy[k];
        }
        const cplx xa_c = x_a[i] * std::conj(xb_mean);
        const cplx ya = std::conj(x_a[i]) * y[i];
        const cplx yb = y[i] * std::conj(xb_mean);
        a.s1 += std::norm(x_a[i]);
        a.s2 += xa_c.real();
        a.s3 += xa_c.imag();
        a.s4 += eb;
        a.v1 += ya.real();
        a.v2 += ya.imag();
        a.v3 += yb.real();
        a.v4 += yb.imag();
    }
    return a;
}

inline ParamVector m_step(const PosteriorMatrix& t, std::span<const cplx> y,
                          std::span<const cplx> x_a, std::span<const cplx> alphabet) {
    return accumulate(t, y, x_a, alphabet).solve();
}

struct EmOptions {
    int max_iter = 200;
    double tol = 1e-8;  ///< stop when the parameter update has infinity norm below tol
};

struct EmReport {
    ParamVector estimate;
    int iterations = 0;
    std::vector<double> loglik_trace;  ///< entry 0 is the initial point
    bool converged = false;
    bool hessian_psd = true;  ///< Sylvester conditions held at every M-step
    bool degenerate = false;  ///< an M-step hit singular normal equations
};

/**
 * EM from phi = 0. Each iteration evaluates the posteriors at the current
 * estimate and solves the weighted least-squares M-step in closed form.
 * A singular M-step ends the run with `degenerate` set; a non-finite update
 * throws divergence_error.
 */
inline EmReport em_estimate(std::span<const cplx> y, std::span<const cplx> x_a,
                            std::span<const cplx> alphabet, double noise_var,
                            const EmOptions& opts = {}) {
    detail::check_inputs(y, x_a, alphabet, noise_var);
    if (y.size() < 4) throw frame_error("EM needs at least 4 observations");
    if (opts.max_iter < 1 || !(opts.tol > 0.0)) throw parameter_error("invalid EM options");

    EmReport rep;
    ParamVector phi;
    rep.loglik_trace.push_back(log_likelihood(y, x_a, phi, alphabet, noise_var));
    for (int it = 1; it <= opts.max_iter; ++it) {
        const auto t = posterior_matrix(y, x_a, phi, alphabet, noise_var);
        const auto acc = accumulate(t, y, x_a, alphabet);
        if (acc.singular()) {
            rep.degenerate = true;
            rep.hessian_psd = false;
            break;
        }
        rep.hessian_psd = rep.hessian_psd && acc.hessian_psd();
        const ParamVector next = acc.solve();
        if (!next.finite())
            throw divergence_error("EM produced a non-finite update", rep.loglik_trace);
        double delta = 0.0;
        for (std::size_t j = 0; j < 4; ++j) delta = std::max(delta, std::abs(next[j] - phi[j]));
        phi = next;
        rep.iterations = it;
        const double ll = log_likelihood(y, x_a, phi, alphabet, noise_var);
        rep.loglik_trace.push_back(ll);
        if (!std::isfinite(ll))
            throw divergence_error("EM log-likelihood became non-finite", rep.loglik_trace);
        if (delta < opts.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.estimate = phi;
    return rep;
}

}  // namespace fdce

#endif  // FDCE_ESTIMATOR_HPP
