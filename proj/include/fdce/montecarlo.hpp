#ifndef FDCE_MONTECARLO_HPP
#define FDCE_MONTECARLO_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fdce/baselines.hpp"
#include "fdce/bounds.hpp"
#include "fdce/channel.hpp"
#include "fdce/constellation.hpp"
#include "fdce/detection.hpp"
#include "fdce/estimator.hpp"
#include "fdce/rng.hpp"

namespace fdce {

enum class EstimatorKind { em, pilot, perfect };

inline const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::em: return "em";
        case EstimatorKind::pilot: return "pilot";
        case EstimatorKind::perfect: return "perfect";
    }
    return "?";
}

inline std::optional<EstimatorKind> parse_estimator(const std::string& s) {
    if (s == "em") return EstimatorKind::em;
    if (s == "pilot") return EstimatorKind::pilot;
    if (s == "perfect") return EstimatorKind::perfect;
    return std::nullopt;
}

struct ExperimentConfig {
    int order = 16;
    std::size_t frame_length = 128;
    std::vector<double> betas{0.2};
    std::vector<double> eb_n0_db{0.0};
    std::vector<double> sir_db{-50.0};
    double rician_k = 1.0;
    double var_h_ba = 1.0;
    double n0 = 1.0;
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    std::vector<EstimatorKind> estimators{EstimatorKind::em, EstimatorKind::pilot,
                                          EstimatorKind::perfect};
    std::size_t n_pilots = 64;
    std::optional<double> pilot_extra;  ///< defaults to the point's beta
    std::optional<double> beta_a;       ///< node a shift fraction, defaults to the point's beta
    EmOptions em;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    /// Reuse trial t's channel, symbol and noise streams at every grid point.
    bool common_random_numbers = true;

    void validate() const {
        if (betas.empty() || eb_n0_db.empty() || sir_db.empty())
            throw config_error("sweep grids must not be empty");
        if (trials < 1) throw config_error("trials must be >= 1");
        if (frame_length < 4) throw config_error("frame length must be >= 4");
        if (order != 4 && order != 16 && order != 64) throw config_error("order must be 4, 16 or 64");
        for (double b : betas)
            if (!(b > 0.0 && b <= 1.0)) throw config_error("beta values must lie in (0, 1]");
        if (beta_a && !(*beta_a > 0.0 && *beta_a <= 1.0))
            throw config_error("beta_a must lie in (0, 1]");
        if (estimators.empty()) throw config_error("no estimators selected");
        if (std::find(estimators.begin(), estimators.end(), EstimatorKind::pilot) !=
                estimators.end() &&
            (n_pilots < 2 || n_pilots > frame_length))
            throw config_error("n_pilots must lie in [2, frame_length]");
        if (!(rician_k >= 0.0) || !(var_h_ba > 0.0) || !(n0 > 0.0))
            throw config_error("invalid channel parameters");
        if (em.max_iter < 1 || !(em.tol > 0.0)) throw config_error("invalid EM options");
    }
};

struct SweepPoint {
    double beta = 0.2;
    double eb_n0_db = 0.0;
    double sir_db = -50.0;
};

struct EstimatorOutcome {
    EstimatorKind kind{};
    bool valid = false;  ///< false when the estimator failed on this frame
    ParamVector estimate;
    double sq_err_h_ba = 0.0;  ///< |h_ba_hat - h_ba|^2
    double sq_err_h_aa = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;  ///< 0 when BER is undefined (no data symbols)
};

struct TrialResult {
    ChannelPair truth;
    std::vector<EstimatorOutcome> outcomes;  ///< one per configured estimator, same order
    int em_iterations = 0;
    bool degenerate = false;  ///< the EM run failed on this frame

    friend bool operator==(const TrialResult& a, const TrialResult& b) {
        if (a.truth.h_aa != b.truth.h_aa || a.truth.h_ba != b.truth.h_ba ||
            a.truth.noise_var != b.truth.noise_var || a.em_iterations != b.em_iterations ||
            a.degenerate != b.degenerate || a.outcomes.size() != b.outcomes.size())
            return false;
        for (std::size_t j = 0; j < a.outcomes.size(); ++j) {
            const auto& x = a.outcomes[j];
            const auto& y = b.outcomes[j];
            if (x.kind != y.kind || x.valid != y.valid || !(x.estimate == y.estimate) ||
                x.sq_err_h_ba != y.sq_err_h_ba || x.sq_err_h_aa != y.sq_err_h_aa ||
                x.bit_errors != y.bit_errors || x.bits != y.bits)
                return false;
        }
        return true;
    }
};

/// Symbol energy and noise variance at one point: N0 fixed, E = Eb log2 M.
struct LinkBudget {
    double bit_energy;
    double symbol_energy;
    double noise_var;
};

inline LinkBudget link_budget(const ExperimentConfig& cfg, const SweepPoint& pt) {
    const double eb = db_to_linear(pt.eb_n0_db) * cfg.n0;
    return {eb, eb * std::log2(static_cast<double>(cfg.order)), cfg.n0};
}

namespace detail {

inline void fill_errors(EstimatorOutcome& o, const ChannelPair& truth) {
    o.sq_err_h_ba = std::norm(o.estimate.h_ba() - truth.h_ba);
    o.sq_err_h_aa = std::norm(o.estimate.h_aa() - truth.h_aa);
}


}  // namespace detail

/**
 * One frame at one sweep point. Channels, symbol indices and noise come from
 * per-purpose streams of `seed`, so every estimator sees the same realisation:
 * the shifted scheme and the pilot scheme differ only in how the drawn
 * indices are mapped to transmitted symbols.
 */
inline TrialResult run_trial(const ExperimentConfig& cfg, const SweepPoint& pt, std::uint64_t seed) {
    const auto budget = link_budget(cfg, pt);
    const std::size_t n = cfg.frame_length;

    FadingConfig fading;
    fading.var_h_ba = cfg.var_h_ba;
    fading.sir_db = pt.sir_db;
    fading.rician_k = cfg.rician_k;
    fading.n0 = cfg.n0;
    fading.validate();

    const Constellation base = make_qam(cfg.order, budget.bit_energy);
    const ShiftedConstellation shifted_b(base, pt.beta);
    const ShiftedConstellation shifted_a(base, cfg.beta_a.value_or(pt.beta));

    auto rng_hba = make_stream(seed, Stream::h_ba);
    auto rng_haa = make_stream(seed, Stream::h_aa);
    auto rng_aoa = make_stream(seed, Stream::aoa);
    auto rng_sa = make_stream(seed, Stream::symbols_a);
    auto rng_sb = make_stream(seed, Stream::symbols_b);
    auto rng_w = make_stream(seed, Stream::noise);

    TrialResult res;
    res.truth.h_ba = sample_h_ba(fading, rng_hba);
    res.truth.h_aa = sample_h_aa(fading, rng_haa, rng_aoa);
    res.truth.noise_var = budget.noise_var;

    const auto idx_a = draw_indices(base.order(), n, rng_sa);
    const auto idx_b = draw_indices(base.order(), n, rng_sb);

    // shifted scheme; each scheme copies the noise stream so both see the same w
    const auto xa_s = map_symbols(shifted_a.alphabet(), idx_a);
    const auto xb_s = map_symbols(shifted_b.alphabet(), idx_b);
    auto noise_s = rng_w;
    const auto y_s = synthesize_frame(xa_s, xb_s, res.truth, noise_s).y;

    for (auto kind : cfg.estimators) {
        EstimatorOutcome o;
        o.kind = kind;
        switch (kind) {
            case EstimatorKind::em: {
                try {
                    const auto rep = em_estimate(y_s, xa_s, shifted_b.points(), budget.noise_var, cfg.em);
                    res.em_iterations = rep.iterations;
                    if (rep.degenerate) {
                        res.degenerate = true;
                        break;
                    }
                    o.estimate = rep.estimate;
                } catch (const estimation_error&) {
                    res.degenerate = true;
                    break;
                }
                o.valid = true;
                detail::fill_errors(o, res.truth);
                const auto det = cancel_and_detect(y_s, xa_s, o.estimate, shifted_b.alphabet(), idx_b);
                o.bit_errors = det.bit_errors;
                o.bits = n * base.bits_per_symbol();
                break;
            }
            case EstimatorKind::perfect: {
                o.valid = true;
                o.estimate = perfect_csi(res.truth);
                detail::fill_errors(o, res.truth);
                const auto det = cancel_and_detect(y_s, xa_s, o.estimate, shifted_b.alphabet(), idx_b);
                o.bit_errors = det.bit_errors;
                o.bits = n * base.bits_per_symbol();
                break;
            }
            case EstimatorKind::pilot: {
                const auto layout = make_pilot_layout(n, cfg.n_pilots, cfg.pilot_extra.value_or(pt.beta));
                const double amp = std::sqrt(layout.pilot_energy_factor);
                auto xa_p = map_symbols(base, idx_a);
                auto xb_p = map_symbols(base, idx_b);
                std::vector<cplx> pilots(layout.n_pilots());
                for (std::size_t j = 0; j < layout.n_pilots(); ++j) {
                    const auto i = layout.positions[j];
                    xa_p[i] *= amp;
                    xb_p[i] *= amp;
                    pilots[j] = xb_p[i];
                }
                auto noise_p = rng_w;
                const auto y_p = synthesize_frame(xa_p, xb_p, res.truth, noise_p).y;
                try {
                    o.estimate = ls_pilot_estimate(y_p, xa_p, pilots, layout);
                } catch (const estimation_error&) {
                    break;
                }
                o.valid = true;
                detail::fill_errors(o, res.truth);
                const std::size_t first_data = layout.n_pilots();  // pilots occupy the head
                if (first_data < n) {
                    const std::span<const cplx> yd(y_p.data() + first_data, n - first_data);
                    const std::span<const cplx> xad(xa_p.data() + first_data, n - first_data);
                    const std::span<const std::uint32_t> idd(idx_b.data() + first_data, n - first_data);
                    const auto det = cancel_and_detect(yd, xad, o.estimate, base, idd);
                    o.bit_errors = det.bit_errors;
                    o.bits = (n - first_data) * base.bits_per_symbol();
                }
                break;
            }
        }
        res.outcomes.push_back(o);
    }
    return res;
}

struct AggregateRow {
    SweepPoint point;
    EstimatorKind estimator{};
    double mse_h_ba = 0.0;  ///< per real coordinate: mean |err|^2 / 2
    double mse_h_aa = 0.0;
    double mse_h_ba_complex = 0.0;  ///< mean |err|^2
    double mse_h_aa_complex = 0.0;
    double ber = std::numeric_limits<double>::quiet_NaN();  ///< NaN when undefined
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double bound = 0.0;  ///< per real coordinate, pre-shift energy
    std::size_t trials_used = 0;
    std::size_t degenerate = 0;
    double mean_em_iterations = 0.0;

    double mse_h_ba_db() const { return linear_to_db(mse_h_ba); }
    double mse_h_aa_db() const { return linear_to_db(mse_h_aa); }
    double bound_db() const { return linear_to_db(bound); }
};

/// Grid points in beta-major, then Eb/N0, then SIR order.
inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> pts;
    for (double b : cfg.betas)
        for (double e : cfg.eb_n0_db)
            for (double s : cfg.sir_db) pts.push_back({b, e, s});
    return pts;
}

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial) {
    return derive_seed({master, point, trial});
}

inline std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t point, std::size_t trial) {
    return cfg.common_random_numbers ? derive_seed({cfg.seed, trial}) : trial_seed(cfg.seed, point, trial);
}

/// Reduces one point's trials; order of `trials` fixes the summation order.
inline std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const SweepPoint& pt,
                                           std::span<const TrialResult> trials) {
    const auto budget = link_budget(cfg, pt);
    const double bound =
        mse_lower_bound(static_cast<double>(cfg.frame_length), budget.symbol_energy, pt.beta,
                        budget.noise_var);
    std::vector<AggregateRow> rows;
    for (std::size_t j = 0; j < cfg.estimators.size(); ++j) {
        AggregateRow r;
        r.point = pt;
        r.estimator = cfg.estimators[j];
        r.bound = bound;
        double sba = 0.0, saa = 0.0, iters = 0.0;
        for (const auto& t : trials) {
            const auto& o = t.outcomes[j];
            if (o.kind == EstimatorKind::em) iters += t.em_iterations;
            if (!o.valid) {
                ++r.degenerate;
                continue;
            }
            ++r.trials_used;
            sba += o.sq_err_h_ba;
            saa += o.sq_err_h_aa;
            r.bit_errors += o.bit_errors;
            r.bits += o.bits;
        }
        if (r.trials_used > 0) {
            const double used = static_cast<double>(r.trials_used);
            r.mse_h_ba_complex = sba / used;
            r.mse_h_aa_complex = saa / used;
            r.mse_h_ba = r.mse_h_ba_complex / 2.0;
            r.mse_h_aa = r.mse_h_aa_complex / 2.0;
        } else {
            r.mse_h_ba = r.mse_h_aa = r.mse_h_ba_complex = r.mse_h_aa_complex =
                std::numeric_limits<double>::quiet_NaN();
        }
        if (r.bits > 0) r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.bits);
        if (!trials.empty()) r.mean_em_iterations = iters / static_cast<double>(trials.size());
        rows.push_back(r);
    }
    return rows;
}

/**
 * Runs every (point, trial) pair, in parallel when threads allow, into
 * pre-assigned slots, then folds each point in trial order. The output does
 * not depend on the thread count.
 */
inline std::vector<AggregateRow> sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto pts = sweep_points(cfg);
    const std::size_t per = cfg.trials;
    const std::size_t total = pts.size() * per;
    std::vector<TrialResult> slots(total);

    unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, total));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total || failed.load()) return;
            const std::size_t p = job / per;
            const std::size_t t = job % per;
            try {
                slots[job] = run_trial(cfg, pts[p], trial_seed(cfg, p, t));
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<AggregateRow> rows;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto part = aggregate(cfg, pts[p], std::span<const TrialResult>(slots.data() + p * per, per));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

inline constexpr const char* csv_header =
    "beta,eb_n0_db,sir_db,estimator,mse_hba,mse_hba_db,mse_haa,mse_haa_db,ber,bound,bound_db,"
    "trials_used,degenerate";

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// mse_* and bound are per real coordinate; BER is blank where undefined.
inline void write_csv(std::ostream& os, std::span<const AggregateRow> rows) {
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << format_g17(r.point.beta) << ',' << format_g17(r.point.eb_n0_db) << ','
           << format_g17(r.point.sir_db) << ',' << to_string(r.estimator) << ','
           << format_g17(r.mse_h_ba) << ',' << format_g17(r.mse_h_ba_db()) << ','
           << format_g17(r.mse_h_aa) << ',' << format_g17(r.mse_h_aa_db()) << ','
           << (std::isnan(r.ber) ? std::string() : format_g17(r.ber)) << ','
           << format_g17(r.bound) << ',' << format_g17(r.bound_db()) << ',' << r.trials_used
           << ',' << r.degenerate << '\n';
    }
}

}  // namespace fdce

#endif  // FDCE_MONTECARLO_HPP
