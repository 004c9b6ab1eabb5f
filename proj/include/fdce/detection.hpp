#ifndef FDCE_DETECTION_HPP
#define FDCE_DETECTION_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fdce/channel.hpp"
#include "fdce/constellation.hpp"
#include "fdce/types.hpp"

namespace fdce {

struct DetectionResult {
    std::vector<std::uint32_t> symbols_hat;
    std::vector<std::uint8_t> bits_hat;
    std::size_t symbol_errors = 0;
    std::size_t bit_errors = 0;
};

/**
 * Removes the estimated SI term and picks the nearest scaled alphabet point:
 * argmin_k |y_i - h_aa x_a_i - h_ba x_k|^2, ties to the lowest index. Error
 * counts are filled when the true indices are supplied.
 */
inline DetectionResult cancel_and_detect(std::span<const cplx> y, std::span<const cplx> x_a,
                                         const ParamVector& est, const Constellation& alphabet,
                                         std::span<const std::uint32_t> true_idx = {}) {
    if (y.size() != x_a.size()) throw frame_error("y and x_a must have equal length");
    if (!true_idx.empty() && true_idx.size() != y.size())
        throw frame_error("true symbol indices must match the frame length");
    const cplx h_aa = est.h_aa();
    const cplx h_ba = est.h_ba();
    std::vector<cplx> scaled(alphabet.order());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = h_ba * alphabet[k];

    DetectionResult res;
    res.symbols_hat.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const cplx r = y[i] - h_aa * x_a[i];
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < scaled.size(); ++k) {
            const double dist = std::norm(r - scaled[k]);
            if (dist < best_d) {
                best_d = dist;
                best = static_cast<std::uint32_t>(k);
            }
        }
        res.symbols_hat[i] = best;
    }
    res.bits_hat = symbol_bits(alphabet, res.symbols_hat);

    if (!true_idx.empty()) {
        const unsigned nb = alphabet.bits_per_symbol();
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (res.symbols_hat[i] == true_idx[i]) continue;
            ++res.symbol_errors;
            const auto diff = alphabet.label(res.symbols_hat[i]) ^ alphabet.label(true_idx[i]);
            for (unsigned j = 0; j < nb; ++j) res.bit_errors += (diff >> j) & 1u;
        }
    }
    return res;
}

/// Fraction of differing positions.
inline double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size()) throw frame_error("bit streams differ in length");
    if (tx.empty()) throw frame_error("bit streams must not be empty");
    std::size_t errs = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errs += (tx[i] != rx[i]);
    return static_cast<double>(errs) / static_cast<double>(tx.size());
}

}  // namespace fdce

#endif  // FDCE_DETECTION_HPP
