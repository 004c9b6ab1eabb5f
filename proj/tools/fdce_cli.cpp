#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdce/fdce.hpp"

namespace fs = std::filesystem;
using namespace fdce;

namespace {

std::string sci17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string format_ratio(cplx c) {
    auto clean = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    const double re = clean(c.real());
    const double im = clean(c.imag());
    char buf[96];
    if (im == 0.0) std::snprintf(buf, sizeof buf, "%.12g", re);
    else if (re == 0.0) std::snprintf(buf, sizeof buf, "%.12gj", im);
    else std::snprintf(buf, sizeof buf, "%.12g%+.12gj", re, im);
    return buf;
}

struct SweepArgs {
    std::string config;
    std::string out;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool full = false;
};

int run_sweep(const SweepArgs& a) {
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("cannot open config '" + a.config + "'");
    ExperimentConfig cfg = parse_config(in);
    if (a.full) cfg.trials = 5000;
    if (a.trials) cfg.trials = *a.trials;
    if (a.seed) cfg.seed = *a.seed;
    if (a.threads) cfg.threads = *a.threads;
    cfg.validate();

    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + a.out + "': " + ec.message());

    const auto rows = sweep(cfg);

    const fs::path csv_path = fs::path(a.out) / "results.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write '" + csv_path.string() + "'");
    write_csv(csv, rows);
    csv.close();
    if (!csv) throw std::runtime_error("write failed for '" + csv_path.string() + "'");

    const std::string echo = config_echo(cfg);
    const fs::path meta_path = fs::path(a.out) / "meta.txt";
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("cannot write '" + meta_path.string() + "'");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(echo)));
    meta << "# fdce " << version << '\n'
         << "# config_hash = " << hash << '\n'
         << "# master_seed = " << cfg.seed << '\n'
         << "# labelling = reflected Gray per axis, label = symbol index\n"
         << echo;
    meta.close();
    if (!meta) throw std::runtime_error("write failed for '" + meta_path.string() + "'");

    std::cout << "wrote " << rows.size() << " rows to " << csv_path.string() << '\n';
    return 0;
}

struct BoundArgs {
    std::vector<double> n, e, beta, sigma2;
    std::string out;
};

int run_bound(const BoundArgs& a) {
    std::ostringstream os;
    const bool single = a.n.size() == 1 && a.e.size() == 1 && a.beta.size() == 1 && a.sigma2.size() == 1;
    if (single) {
        os << sci17(mse_lower_bound(a.n[0], a.e[0], a.beta[0], a.sigma2[0])) << '\n';
    } else {
        os << "n,e,beta,sigma2,bound,bound_db\n";
        for (double n : a.n)
            for (double e : a.e)
                for (double b : a.beta)
                    for (double s : a.sigma2) {
                        const double v = mse_lower_bound(n, e, b, s);
                        os << format_g17(n) << ',' << format_g17(e) << ',' << format_g17(b) << ','
                           << format_g17(s) << ',' << sci17(v) << ',' << format_g17(linear_to_db(v)) << '\n';
                    }
    }
    if (a.out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
        f << os.str();
        if (!f) throw std::runtime_error("write failed for '" + a.out + "'");
    }
    return 0;
}

struct CheckArgs {
    std::string file;
    int qam = 0;
    double eb = 1.0;
    std::optional<double> beta;
    double tol = 1e-9;
    bool dump = false;
};

int run_check(const CheckArgs& a) {
    Constellation c;
    if (!a.file.empty()) {
        std::ifstream in(a.file);
        if (!in) throw std::runtime_error("cannot open '" + a.file + "'");
        c = Constellation::from_points(read_points(in));
    } else {
        c = make_qam(a.qam, a.eb);
    }
    if (a.beta) c = shift(c, *a.beta).alphabet();
    if (a.dump) write_points(std::cout, c.points());

    const auto w = check_symmetry(c, a.tol);
    if (w) {
        std::cout << "witness c=" << format_ratio(w->ratio) << " orbit=" << w->orbit_length
                  << " (not identifiable)\n";
    } else {
        std::cout << "identifiable\n";
    }
    return 0;
}

struct DemoArgs {
    std::uint64_t seed = 1;
    int order = 16;
    std::size_t n = 128;
    double beta = 0.2;
    double eb_n0_db = 20.0;
    double sir_db = -50.0;
    int max_iter = 200;
    double tol = 1e-8;
};

int run_demo(const DemoArgs& a) {
    ExperimentConfig cfg;
    cfg.order = a.order;
    cfg.frame_length = a.n;
    cfg.betas = {a.beta};
    cfg.eb_n0_db = {a.eb_n0_db};
    cfg.sir_db = {a.sir_db};
    cfg.seed = a.seed;
    cfg.em.max_iter = a.max_iter;
    cfg.em.tol = a.tol;
    cfg.validate();
    const SweepPoint pt{a.beta, a.eb_n0_db, a.sir_db};
    const auto budget = link_budget(cfg, pt);

    FadingConfig fading;
    fading.sir_db = a.sir_db;
    const auto sh = shift(make_qam(a.order, budget.bit_energy), a.beta);
    const std::uint64_t seed = derive_seed({a.seed, 0});
    auto rng_hba = make_stream(seed, Stream::h_ba);
    auto rng_haa = make_stream(seed, Stream::h_aa);
    auto rng_aoa = make_stream(seed, Stream::aoa);
    auto rng_sa = make_stream(seed, Stream::symbols_a);
    auto rng_sb = make_stream(seed, Stream::symbols_b);
    auto rng_w = make_stream(seed, Stream::noise);
    ChannelPair ch;
    ch.h_ba = sample_h_ba(fading, rng_hba);
    ch.h_aa = sample_h_aa(fading, rng_haa, rng_aoa);
    ch.noise_var = budget.noise_var;
    const auto xa = map_symbols(sh.alphabet(), draw_indices(sh.order(), a.n, rng_sa));
    const auto idx_b = draw_indices(sh.order(), a.n, rng_sb);
    const auto xb = map_symbols(sh.alphabet(), idx_b);
    const auto frame = synthesize_frame(xa, xb, ch, rng_w);

    const auto rep = em_estimate(frame.y, frame.x_a, sh.points(), budget.noise_var, cfg.em);
    std::printf("true h_aa = %s  h_ba = %s\n", format_ratio(ch.h_aa).c_str(), format_ratio(ch.h_ba).c_str());
    std::printf("%5s  %24s\n", "iter", "log-likelihood");
    for (std::size_t it = 0; it < rep.loglik_trace.size(); ++it)
        std::printf("%5zu  %24.12f\n", it, rep.loglik_trace[it]);
    const auto est = rep.estimate;
    std::printf("estimate h_aa = %s  h_ba = %s\n", format_ratio(est.h_aa()).c_str(),
                format_ratio(est.h_ba()).c_str());
    std::printf("sq_err h_aa = %.6e  h_ba = %.6e  bound/coord = %.6e\n", std::norm(est.h_aa() - ch.h_aa),
                std::norm(est.h_ba() - ch.h_ba),
                mse_lower_bound(static_cast<double>(a.n), sh.base_energy(), a.beta, budget.noise_var));
    std::printf("converged = %s  iterations = %d  degenerate = %s\n", rep.converged ? "yes" : "no",
                rep.iterations, rep.degenerate ? "yes" : "no");
    const auto det = cancel_and_detect(frame.y, frame.x_a, est, sh.alphabet(), idx_b);
    std::printf("bit errors = %zu / %zu\n", det.bit_errors, a.n * sh.alphabet().bits_per_symbol());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-duplex channel estimation with shifted constellations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a config file");
    sweep_cmd->add_option("--config", sw.config, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sw.out, "Output directory")->required();
    sweep_cmd->add_option("--trials", sw.trials, "Override trials per point");
    sweep_cmd->add_option("--seed", sw.seed, "Override master seed");
    sweep_cmd->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");
    sweep_cmd->add_flag("--full", sw.full, "Use 5000 trials per point");

    BoundArgs bd;
    auto* bound_cmd = app.add_subcommand("bound", "Evaluate the per-coordinate MSE lower bound");
    bound_cmd->add_option("--n", bd.n, "Frame length")->required()->delimiter(',');
    bound_cmd->add_option("--e", bd.e, "Pre-shift symbol energy")->required()->delimiter(',');
    bound_cmd->add_option("--beta", bd.beta, "Shift fraction")->required()->delimiter(',');
    bound_cmd->add_option("--sigma2", bd.sigma2, "Noise variance")->required()->delimiter(',');
    bound_cmd->add_option("--out", bd.out, "Write to file instead of stdout");

    CheckArgs ck;
    auto* check_cmd = app.add_subcommand("check-constellation", "Search for a symmetry witness");
    auto* file_opt = check_cmd->add_option("--file", ck.file, "Points file, one re,im per line")->check(CLI::ExistingFile);
    auto* qam_opt = check_cmd->add_option("--qam", ck.qam, "Built-in square QAM order")->check(CLI::IsMember({4, 16, 64}));
    file_opt->excludes(qam_opt);
    check_cmd->add_option("--eb", ck.eb, "Bit energy for --qam");
    check_cmd->add_option("--beta", ck.beta, "Apply a shift before checking");
    check_cmd->add_option("--tol", ck.tol, "Matching tolerance");
    check_cmd->add_flag("--dump", ck.dump, "Print the checked points");

    DemoArgs dm;
    auto* demo_cmd = app.add_subcommand("demo-em", "Run EM on one synthetic frame and print the trace");
    demo_cmd->add_option("--seed", dm.seed, "Seed");
    demo_cmd->add_option("--order", dm.order, "QAM order")->check(CLI::IsMember({4, 16, 64}));
    demo_cmd->add_option("--n", dm.n, "Frame length");
    demo_cmd->add_option("--beta", dm.beta, "Shift fraction");
    demo_cmd->add_option("--eb-n0-db", dm.eb_n0_db, "Eb/N0 in dB");
    demo_cmd->add_option("--sir-db", dm.sir_db, "SIR in dB");
    demo_cmd->add_option("--max-iter", dm.max_iter, "EM iteration cap");
    demo_cmd->add_option("--tol", dm.tol, "EM stopping tolerance");

    try {
        app.parse(argc, argv);
        if (*check_cmd && ck.file.empty() && ck.qam == 0)
            throw CLI::RequiredError("check-constellation needs --file or --qam");
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep_cmd) return run_sweep(sw);
        if (*bound_cmd) return run_bound(bd);
        if (*check_cmd) return run_check(ck);
        if (*demo_cmd) return run_demo(dm);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
