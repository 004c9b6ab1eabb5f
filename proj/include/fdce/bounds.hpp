#ifndef FDCE_BOUNDS_HPP
#define FDCE_BOUNDS_HPP

#include <span>

#include "fdce/estimator.hpp"
#include "fdce/types.hpp"

namespace fdce {

/// 4x4 Fisher information over phi = [Re h_aa, Im h_aa, Re h_ba, Im h_ba].
struct FisherMatrix {
    Matrix4 entries{};

    double operator()(std::size_t r, std::size_t c) const { return entries[r][c]; }
    double& operator()(std::size_t r, std::size_t c) { return entries[r][c]; }
};

/**
 * Information of y given both symbol streams:
 * I(l, l') = (2/s2) sum_i Re(conj(d_l mu_i) d_l' mu_i), where mu_i = h_aa x_a_i + h_ba x_b_i.
 */
inline FisherMatrix fim_conditional(std::span<const cplx> x_a, std::span<const cplx> x_b,
                                    double noise_var) {
    if (!(noise_var > 0.0)) throw parameter_error("noise variance must be positive");
    if (x_a.size() != x_b.size()) throw frame_error("x_a and x_b must have equal length");
    double ea = 0.0, eb = 0.0, co = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < x_a.size(); ++i) {
        const cplx z = std::conj(x_a[i]) * x_b[i];
        ea += std::norm(x_a[i]);
        eb += std::norm(x_b[i]);
        co += z.real();     // Re xa Re xb + Im xa Im xb
        cross += z.imag();  // Re xa Im xb - Im xa Re xb
    }
    const double g = 2.0 / noise_var;
    FisherMatrix f;
    f(0, 0) = f(1, 1) = g * ea;
    f(2, 2) = f(3, 3) = g * eb;
    f(0, 2) = f(2, 0) = f(1, 3) = f(3, 1) = g * co;
    f(1, 2) = f(2, 1) = g * cross;
    f(0, 3) = f(3, 0) = -g * cross;
    return f;
}

inline void check_bound_args(double n, double energy, double beta, double noise_var) {
    if (!(n > 0.0) || !(energy > 0.0) || !(noise_var > 0.0) || !(beta > 0.0 && beta <= 1.0))
        throw parameter_error("bound arguments must be positive with beta in (0, 1]");
}

/// Conditional information averaged over i.i.d. uniform shifted symbols at both nodes.
inline FisherMatrix fim_avg(double n, double energy, double beta, double noise_var) {
    check_bound_args(n, energy, beta, noise_var);
    const double g = 2.0 * n * energy / noise_var;
    FisherMatrix f;
    for (std::size_t l = 0; l < 4; ++l) f(l, l) = g * (1.0 + beta);
    f(0, 2) = f(2, 0) = f(1, 3) = f(3, 1) = g * beta;
    return f;
}

/// Closed-form inverse of fim_avg.
inline FisherMatrix fim_avg_inverse(double n, double energy, double beta, double noise_var) {
    check_bound_args(n, energy, beta, noise_var);
    const double g = noise_var / (2.0 * n * energy);
    const double diag = g * (1.0 + beta) / (1.0 + 2.0 * beta);
    const double off = -g * beta / (1.0 + 2.0 * beta);
    FisherMatrix f;
    for (std::size_t l = 0; l < 4; ++l) f(l, l) = diag;
    f(0, 2) = f(2, 0) = f(1, 3) = f(3, 1) = off;
    return f;
}

/**
 * Per-coordinate MSE lower bound (s2 / 2NE) (1+beta) / (1+2beta). `energy` is
 * the average symbol energy before the shift.
 */
inline double mse_lower_bound(double n, double energy, double beta, double noise_var) {
    check_bound_args(n, energy, beta, noise_var);
    return noise_var / (2.0 * n * energy) * (1.0 + beta) / (1.0 + 2.0 * beta);
}

/// Bound on E|h_hat - h|^2 for one complex gain: two real coordinates.
inline double mse_lower_bound_complex(double n, double energy, double beta, double noise_var) {
    return 2.0 * mse_lower_bound(n, energy, beta, noise_var);
}

}  // namespace fdce

#endif  // FDCE_BOUNDS_HPP
