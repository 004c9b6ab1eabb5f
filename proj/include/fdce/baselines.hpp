#ifndef FDCE_BASELINES_HPP
#define FDCE_BASELINES_HPP

#include <algorithm>
#include <span>
#include <vector>

#include "fdce/types.hpp"

namespace fdce {

struct PilotLayout {
    std::vector<std::size_t> positions;  ///< sorted, distinct, within the frame
    double pilot_energy_factor = 1.0;    ///< energy multiplier on pilot symbols

    std::size_t n_pilots() const { return positions.size(); }

    void validate(std::size_t frame_len) const {
        if (positions.size() < 2) throw parameter_error("pilot layout needs at least two pilots");
        for (std::size_t j = 0; j < positions.size(); ++j) {
            if (positions[j] >= frame_len) throw parameter_error("pilot position outside frame");
            if (j > 0 && positions[j] <= positions[j - 1])
                throw parameter_error("pilot positions must be sorted and distinct");
        }
        if (!(pilot_energy_factor > 0.0)) throw parameter_error("pilot energy factor must be positive");
    }
};

/**
 * Pilots on the first n_pilots indices. The energy factor makes the frame
 * carry (1 + extra_fraction) times the energy of an all-data frame, with the
 * whole surplus on the pilots.
 */
inline PilotLayout make_pilot_layout(std::size_t frame_len, std::size_t n_pilots,
                                     double extra_fraction) {
    if (n_pilots < 2 || n_pilots > frame_len)
        throw parameter_error("pilot count must lie in [2, frame length]");
    if (!(extra_fraction >= 0.0)) throw parameter_error("extra energy fraction must be >= 0");
    PilotLayout l;
    l.positions.resize(n_pilots);
    for (std::size_t j = 0; j < n_pilots; ++j) l.positions[j] = j;
    const double n = static_cast<double>(frame_len);
    const double p = static_cast<double>(n_pilots);
    l.pilot_energy_factor = (n * (1.0 + extra_fraction) - (n - p)) / p;
    return l;
}

/// Expected frame energy of the pilot scheme for unit-normalised data energy.
inline double pilot_frame_energy(const PilotLayout& l, std::size_t frame_len, double symbol_energy) {
    const double p = static_cast<double>(l.n_pilots());
    return symbol_energy * ((static_cast<double>(frame_len) - p) + p * l.pilot_energy_factor);
}

/// Expected frame energy of the shifted scheme: every symbol carries E(1 + beta).
inline double shifted_frame_energy(std::size_t frame_len, double symbol_energy, double beta) {
    return static_cast<double>(frame_len) * symbol_energy * (1.0 + beta);
}

/**
 * Joint least squares for (h_aa, h_ba) on the pilot positions. `pilots[j]` is
 * node b's known symbol at layout.positions[j].
 */
inline ParamVector ls_pilot_estimate(std::span<const cplx> y, std::span<const cplx> x_a,
                                     std::span<const cplx> pilots, const PilotLayout& layout) {
    if (y.size() != x_a.size()) throw frame_error("y and x_a must have equal length");
    if (pilots.size() != layout.n_pilots()) throw frame_error("pilot count does not match layout");
    layout.validate(y.size());

    // A^H A = [[a, b], [conj(b), d]], A^H y = [ua, ub]
    double a = 0.0, d = 0.0;
    cplx b{}, ua{}, ub{};
    for (std::size_t j = 0; j < pilots.size(); ++j) {
        const std::size_t i = layout.positions[j];
        a += std::norm(x_a[i]);
        d += std::norm(pilots[j]);
        b += std::conj(x_a[i]) * pilots[j];
        ua += std::conj(x_a[i]) * y[i];
        ub += std::conj(pilots[j]) * y[i];
    }
    const double det = a * d - std::norm(b);
    if (!(det > 1e-12 * a * d))
        throw estimation_error("pilot design is rank deficient");
    const cplx h_aa = (d * ua - b * ub) / det;
    const cplx h_ba = (a * ub - std::conj(b) * ua) / det;
    return {h_aa, h_ba};
}

inline ParamVector perfect_csi(const ChannelPair& ch) { return ch.params(); }

}  // namespace fdce

#endif  // FDCE_BASELINES_HPP
