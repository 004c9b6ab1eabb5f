#ifndef FDCE_CONSTELLATION_HPP
#define FDCE_CONSTELLATION_HPP

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fdce/types.hpp"

namespace fdce {

/**
 * An ordered modulation alphabet. Point k carries the bit label labels[k]
 * (bits_per_symbol bits, MSB first). For QAM built by make_qam the label of
 * point k is k itself, so a symbol index doubles as its bit pattern.
 */
class Constellation {
public:
    Constellation() = default;

    /// Arbitrary point set; labels default to the point index.
    static Constellation from_points(std::vector<cplx> points, double tol = 1e-12) {
        if (points.size() < 2)
            throw constellation_error("constellation needs at least two points");
        for (std::size_t a = 0; a < points.size(); ++a)
            for (std::size_t b = a + 1; b < points.size(); ++b)
                if (std::abs(points[a] - points[b]) <= tol)
                    throw constellation_error("constellation points must be distinct");
        Constellation c;
        c.points_ = std::move(points);
        c.labels_.resize(c.points_.size());
        std::iota(c.labels_.begin(), c.labels_.end(), 0u);
        unsigned bits = 0;
        while ((std::size_t{1} << bits) < c.points_.size()) ++bits;
        c.bits_ = bits;
        c.energy_ = mean_energy(c.points_);
        return c;
    }

    const std::vector<cplx>& points() const { return points_; }
    const cplx& operator[](std::size_t k) const { return points_[k]; }
    std::size_t order() const { return points_.size(); }
    unsigned bits_per_symbol() const { return bits_; }
    std::uint32_t label(std::size_t k) const { return labels_[k]; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }

    /// (1/M) sum |x_k|^2
    double avg_energy() const { return energy_; }

    cplx mean() const {
        cplx acc{};
        for (const auto& p : points_) acc += p;
        return acc / static_cast<double>(points_.size());
    }

    static double mean_energy(const std::vector<cplx>& pts) {
        double acc = 0.0;
        for (const auto& p : pts) acc += std::norm(p);
        return acc / static_cast<double>(pts.size());
    }

private:
    friend Constellation make_qam(int order, double bit_energy);
    friend class ShiftedConstellation;

    std::vector<cplx> points_;
    std::vector<std::uint32_t> labels_;
    unsigned bits_ = 0;
    double energy_ = 0.0;
};

/**
 * Square QAM with reflected-Gray labelling on each axis, scaled so that the
 * average symbol energy equals bit_energy * log2(order). Supported orders are
 * 4, 16 and 64.
 */
inline Constellation make_qam(int order, double bit_energy) {
    if (order != 4 && order != 16 && order != 64)
        throw constellation_error("unsupported QAM order " + std::to_string(order) +
                                  " (expected 4, 16 or 64)");
    if (!(bit_energy > 0.0) || !std::isfinite(bit_energy))
        throw parameter_error("bit energy must be positive");

    const unsigned bits = static_cast<unsigned>(std::log2(order) + 0.5);
    const unsigned half = bits / 2;
    const int side = 1 << half;
    const double energy = bit_energy * bits;
    // unscaled grid {±1, ±3, ...} has mean energy 2(M-1)/3
    const double scale = std::sqrt(energy / (2.0 * (order - 1) / 3.0));

    std::vector<int> level_of_gray(side);
    for (int i = 0; i < side; ++i) level_of_gray[i ^ (i >> 1)] = i;

    Constellation c;
    c.points_.resize(order);
    c.labels_.resize(order);
    for (int label = 0; label < order; ++label) {
        const int gi = label >> half;
        const int gq = label & (side - 1);
        const double re = 2.0 * level_of_gray[gi] - (side - 1);
        const double im = 2.0 * level_of_gray[gq] - (side - 1);
        c.points_[label] = scale * cplx(re, im);
        c.labels_[label] = static_cast<std::uint32_t>(label);
    }
    c.bits_ = bits;
    c.energy_ = Constellation::mean_energy(c.points_);
    return c;
}

/// Base alphabet translated along the positive real axis by s = sqrt(beta * E).
class ShiftedConstellation {
public:
    ShiftedConstellation(const Constellation& base, double beta) : base_(base), beta_(beta) {
        if (!(beta > 0.0 && beta <= 1.0))
            throw parameter_error("shift fraction beta must lie in (0, 1]");
        if (std::abs(base.mean()) > 1e-9 * std::max(1.0, std::sqrt(base.avg_energy())))
            throw parameter_error("shift requires a zero-mean base constellation");
        shift_ = std::sqrt(beta * base.avg_energy());
        alphabet_ = base;
        for (auto& p : alphabet_.points_) p += shift_;
        alphabet_.energy_ = Constellation::mean_energy(alphabet_.points_);
    }

    const Constellation& base() const { return base_; }
    /// Shifted points with the base labels.
    const Constellation& alphabet() const { return alphabet_; }
    const std::vector<cplx>& points() const { return alphabet_.points(); }
    std::size_t order() const { return alphabet_.order(); }
    double beta() const { return beta_; }
    double shift() const { return shift_; }
    /// Pre-shift energy E.
    double base_energy() const { return base_.avg_energy(); }
    double avg_energy() const { return alphabet_.avg_energy(); }

private:
    Constellation base_;
    Constellation alphabet_;
    double beta_ = 0.0;
    double shift_ = 0.0;
};

inline ShiftedConstellation shift(const Constellation& base, double beta) { return {base, beta}; }

/// x_k = ratio * x_{perm[k]} for every k, with |ratio| = 1 and ratio != 1.
struct SymmetryWitness {
    std::vector<std::size_t> perm;
    cplx ratio{};
    std::size_t orbit_length = 0;
};

/**
 * Searches for a unit-modulus ratio c != 1 and a permutation g with
 * x_k = c x_{g(k)} for all k. Candidate ratios are x_r / x_m for a nonzero
 * reference point x_r and every x_m of the same modulus, tried nearest to -1
 * first; a candidate is accepted if c * A equals A as a set within tol.
 */
inline std::optional<SymmetryWitness> check_symmetry(const std::vector<cplx>& pts,
                                                     double tol = 1e-9) {
    if (!(tol > 0.0)) throw parameter_error("symmetry tolerance must be positive");
    const std::size_t m = pts.size();
    if (m == 0) return std::nullopt;

    std::size_t ref = m;
    for (std::size_t k = 0; k < m; ++k)
        if (std::abs(pts[k]) > tol) {
            ref = k;
            break;
        }
    if (ref == m) return std::nullopt;

    const double ref_mag = std::abs(pts[ref]);
    std::vector<cplx> ratios;
    for (std::size_t cand = 0; cand < m; ++cand) {
        if (cand == ref || std::abs(std::abs(pts[cand]) - ref_mag) > tol) continue;
        const cplx c = pts[ref] / pts[cand];
        if (std::abs(c - 1.0) <= tol || std::abs(std::abs(c) - 1.0) > tol) continue;
        ratios.push_back(c);
    }
    // report c = -1 when it is a witness
    std::stable_sort(ratios.begin(), ratios.end(),
                     [](cplx a, cplx b) { return std::abs(a + 1.0) < std::abs(b + 1.0); });

    std::vector<std::size_t> perm(m);
    std::vector<char> used(m);
    for (const cplx c : ratios) {

        std::fill(used.begin(), used.end(), 0);
        bool ok = true;
        for (std::size_t k = 0; k < m && ok; ++k) {
            std::size_t best = m;
            double best_err = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                if (used[j]) continue;
                const double err = std::abs(pts[k] - c * pts[j]);
                if (err < best_err) {
                    best_err = err;
                    best = j;
                }
            }
            if (best == m || best_err >= tol) {
                ok = false;
            } else {
                used[best] = 1;
                perm[k] = best;
            }
        }
        if (!ok) continue;

        SymmetryWitness w;
        w.perm = perm;
        w.ratio = c;
        std::size_t len = 1;
        for (std::size_t k = perm[ref]; k != ref && len <= m; k = perm[k]) ++len;
        w.orbit_length = len;
        return w;
    }
    return std::nullopt;
}

inline std::optional<SymmetryWitness> check_symmetry(const Constellation& c, double tol = 1e-9) {
    return check_symmetry(c.points(), tol);
}

/// One "re,im" line per point, 17 significant digits.
inline void write_points(std::ostream& os, const std::vector<cplx>& pts) {
    const auto old = os.precision(17);
    for (const auto& p : pts) os << p.real() << ',' << p.imag() << '\n';
    os.precision(old);
}

inline std::vector<cplx> read_points(std::istream& is) {
    std::vector<cplx> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw constellation_error("line " + std::to_string(lineno) + ": expected re,im");
        try {
            std::size_t used_re = 0, used_im = 0;
            const std::string re_s = line.substr(0, comma);
            const std::string im_s = line.substr(comma + 1);
            const double re = std::stod(re_s, &used_re);
            const double im = std::stod(im_s, &used_im);
            if (re_s.find_first_not_of(" \t\r", used_re) != std::string::npos ||
                im_s.find_first_not_of(" \t\r", used_im) != std::string::npos)
                throw std::invalid_argument("trailing characters");
            pts.emplace_back(re, im);
        } catch (const std::exception&) {
            throw constellation_error("line " + std::to_string(lineno) + ": malformed point '" +
                                      line + "'");
        }
    }
    return pts;
}

}  // namespace fdce

#endif  // FDCE_CONSTELLATION_HPP
