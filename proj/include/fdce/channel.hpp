#ifndef FDCE_CHANNEL_HPP
#define FDCE_CHANNEL_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fdce/constellation.hpp"
#include "fdce/rng.hpp"
#include "fdce/types.hpp"

namespace fdce {

struct FadingConfig {
    double var_h_ba = 1.0;  ///< Rayleigh variance of the communication channel
    double sir_db = -50.0;  ///< var_h_ba / var_h_aa in dB
    double rician_k = 1.0;  ///< linear K of the residual SI channel (1 = 0 dB)
    double n0 = 1.0;

    double var_h_aa() const { return var_h_ba / db_to_linear(sir_db); }

    void validate() const {
        if (!(var_h_ba > 0.0) || !(n0 > 0.0) || !(rician_k >= 0.0) || !std::isfinite(sir_db) ||
            !(var_h_aa() > 0.0) || !std::isfinite(var_h_aa()))
            throw parameter_error("invalid fading configuration");
    }
};

/// Draw from CN(0, var); each quadrature part has variance var/2.
inline cplx sample_cn(double var, Rng& rng) {
    if (var == 0.0) return {};
    std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline cplx sample_h_ba(const FadingConfig& cfg, Rng& rng) { return sample_cn(cfg.var_h_ba, rng); }

/// Rician residual SI gain: LOS term of random phase plus a diffuse CN term.
inline cplx sample_h_aa(const FadingConfig& cfg, Rng& diffuse_rng, Rng& aoa_rng) {
    const double var = cfg.var_h_aa();
    const double k = cfg.rician_k;
    std::uniform_real_distribution<double> ud(0.0, 2.0 * pi);
    const double zeta = ud(aoa_rng);
    const cplx los = std::sqrt(k / (k + 1.0)) * std::sqrt(var) * std::polar(1.0, zeta);
    const cplx diffuse = std::sqrt(1.0 / (k + 1.0)) * sample_cn(var, diffuse_rng);
    return los + diffuse;
}

inline cplx sample_h_aa(const FadingConfig& cfg, Rng& rng) { return sample_h_aa(cfg, rng, rng); }

/// One frame of y = h_aa x_a + h_ba x_b + w as seen at node a.
struct Frame {
    std::vector<cplx> x_a;
    std::vector<cplx> x_b;
    std::vector<std::uint32_t> idx_b;  ///< symbol indices of x_b, empty if unknown
    std::vector<std::uint8_t> bits_b;  ///< MSB-first payload of node b, empty if unknown
    std::vector<cplx> y;

    std::size_t size() const { return y.size(); }
};

inline Frame synthesize_frame(std::span<const cplx> x_a, std::span<const cplx> x_b,
                              const ChannelPair& ch, Rng& rng) {
    if (x_a.size() != x_b.size())
        throw frame_error("x_a and x_b must have equal length");
    if (x_a.empty()) throw frame_error("frame must contain at least one symbol");
    if (!(ch.noise_var >= 0.0)) throw parameter_error("noise variance must be non-negative");
    Frame f;
    f.x_a.assign(x_a.begin(), x_a.end());
    f.x_b.assign(x_b.begin(), x_b.end());
    f.y.resize(x_a.size());
    for (std::size_t i = 0; i < x_a.size(); ++i)
        f.y[i] = ch.h_aa * x_a[i] + ch.h_ba * x_b[i] + sample_cn(ch.noise_var, rng);
    return f;
}

/// Uniform i.i.d. symbol indices in [0, order).
inline std::vector<std::uint32_t> draw_indices(std::size_t order, std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::uint32_t> ud(0, static_cast<std::uint32_t>(order - 1));
    std::vector<std::uint32_t> idx(n);
    for (auto& v : idx) v = ud(rng);
    return idx;
}

inline std::vector<cplx> map_symbols(const Constellation& c, std::span<const std::uint32_t> idx) {
    std::vector<cplx> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = c[idx[i]];
    return out;
}

/// Expand symbol indices to their MSB-first label bits.
inline std::vector<std::uint8_t> symbol_bits(const Constellation& c,
                                             std::span<const std::uint32_t> idx) {
    const unsigned b = c.bits_per_symbol();
    std::vector<std::uint8_t> bits;
    bits.reserve(idx.size() * b);
    for (auto k : idx) {
        const auto lab = c.label(k);
        for (unsigned j = b; j-- > 0;) bits.push_back(static_cast<std::uint8_t>((lab >> j) & 1u));
    }
    return bits;
}

/// SINR = 1 / (1/SIR + 1/SNR) with SNR = var_h_ba log2(M) Eb / N0.
inline double sinr(const FadingConfig& cfg, double bit_energy, int order) {
    const double snr = cfg.var_h_ba * std::log2(static_cast<double>(order)) * bit_energy / cfg.n0;
    const double sir = db_to_linear(cfg.sir_db);
    return 1.0 / (1.0 / sir + 1.0 / snr);
}

inline double sinr_from_linear(double sir, double snr) { return 1.0 / (1.0 / sir + 1.0 / snr); }

}  // namespace fdce

#endif  // FDCE_CHANNEL_HPP
