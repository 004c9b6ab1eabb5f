#ifndef FDCE_CONFIG_HPP
#define FDCE_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "fdce/montecarlo.hpp"

namespace fdce {

// Flat "key = value" experiment files. '#' starts a comment, grids are
// comma-separated lists.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw config_error("key '" + key + "': not a number: '" + v + "'");
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] != '-') {
            const auto u = std::stoull(v, &used);
            if (trim(v.substr(used)).empty()) return u;
        }
    } catch (const std::exception&) {
    }
    throw config_error("key '" + key + "': not a non-negative integer: '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> parse_grid(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
    if (out.empty()) throw config_error("key '" + key + "': empty list");
    return out;
}

}  // namespace detail

/// Applies one key; throws config_error for unknown keys or bad values.
inline void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "order") cfg.order = static_cast<int>(parse_uint(key, value));
    else if (key == "frame_length") cfg.frame_length = parse_uint(key, value);
    else if (key == "beta") cfg.betas = parse_grid(key, value);
    else if (key == "eb_n0_db") cfg.eb_n0_db = parse_grid(key, value);
    else if (key == "sir_db") cfg.sir_db = parse_grid(key, value);
    else if (key == "rician_k") cfg.rician_k = parse_double(key, value);
    else if (key == "rician_k_db") cfg.rician_k = db_to_linear(parse_double(key, value));
    else if (key == "var_hba") cfg.var_h_ba = parse_double(key, value);
    else if (key == "n0") cfg.n0 = parse_double(key, value);
    else if (key == "trials") cfg.trials = parse_uint(key, value);
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "n_pilots") cfg.n_pilots = parse_uint(key, value);
    else if (key == "pilot_extra") cfg.pilot_extra = parse_double(key, value);
    else if (key == "beta_a") cfg.beta_a = parse_double(key, value);
    else if (key == "em_max_iter") cfg.em.max_iter = static_cast<int>(parse_uint(key, value));
    else if (key == "em_tol") cfg.em.tol = parse_double(key, value);
    else if (key == "common_random_numbers") {
        const auto v = parse_uint(key, value);
        if (v > 1) throw config_error("key 'common_random_numbers': expected 0 or 1");
        cfg.common_random_numbers = v == 1;
    } else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_uint(key, value));
    else if (key == "estimators") {
        cfg.estimators.clear();
        for (const auto& item : split_list(value)) {
            const auto k = parse_estimator(item);
            if (!k) throw config_error("unknown estimator '" + item + "'");
            cfg.estimators.push_back(*k);
        }
    } else {
        throw config_error("unknown config key '" + key + "'");
    }
}

inline ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        apply_config_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

/// Canonical echo of every field; parse_config(echo) reproduces the config.
inline std::string config_echo(const ExperimentConfig& cfg) {
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_g17(v[i]);
        return s;
    };
    std::ostringstream os;
    os << "order = " << cfg.order << '\n'
       << "frame_length = " << cfg.frame_length << '\n'
       << "beta = " << list(cfg.betas) << '\n'
       << "eb_n0_db = " << list(cfg.eb_n0_db) << '\n'
       << "sir_db = " << list(cfg.sir_db) << '\n'
       << "rician_k = " << format_g17(cfg.rician_k) << '\n'
       << "var_hba = " << format_g17(cfg.var_h_ba) << '\n'
       << "n0 = " << format_g17(cfg.n0) << '\n'
       << "trials = " << cfg.trials << '\n'
       << "seed = " << cfg.seed << '\n';
    os << "estimators = ";
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i)
        os << (i ? "," : "") << to_string(cfg.estimators[i]);
    os << '\n' << "n_pilots = " << cfg.n_pilots << '\n';
    if (cfg.pilot_extra) os << "pilot_extra = " << format_g17(*cfg.pilot_extra) << '\n';
    if (cfg.beta_a) os << "beta_a = " << format_g17(*cfg.beta_a) << '\n';
    os << "common_random_numbers = " << (cfg.common_random_numbers ? 1 : 0) << '\n';
    os << "em_max_iter = " << cfg.em.max_iter << '\n' << "em_tol = " << format_g17(cfg.em.tol) << '\n';
    return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace fdce

#endif  // FDCE_CONFIG_HPP
