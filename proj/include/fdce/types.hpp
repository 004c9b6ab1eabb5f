#ifndef FDCE_TYPES_HPP
#define FDCE_TYPES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace fdce {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Base class for every error raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct constellation_error : error { using error::error; };
struct parameter_error : error { using error::error; };
struct frame_error : error { using error::error; };
struct estimation_error : error { using error::error; };
struct config_error : error { using error::error; };

/// Real parameter vector [Re h_aa, Im h_aa, Re h_ba, Im h_ba].
struct ParamVector {
    std::array<double, 4> phi{};

    ParamVector() = default;
    explicit ParamVector(const std::array<double, 4>& v) : phi(v) {}
    ParamVector(cplx h_aa, cplx h_ba) : phi{h_aa.real(), h_aa.imag(), h_ba.real(), h_ba.imag()} {}

    cplx h_aa() const { return {phi[0], phi[1]}; }
    cplx h_ba() const { return {phi[2], phi[3]}; }

    double& operator[](std::size_t i) { return phi[i]; }
    double operator[](std::size_t i) const { return phi[i]; }

    bool finite() const {
        for (double v : phi)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Residual SI gain, communication gain and receiver noise variance.
struct ChannelPair {
    cplx h_aa{};
    cplx h_ba{};
    double noise_var = 1.0;

    ParamVector params() const { return {h_aa, h_ba}; }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace fdce

#endif  // FDCE_TYPES_HPP
