#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(FDCE_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, {}};
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fdce_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

const std::string cfg_dir = FDCE_CONFIG_DIR;

}  // namespace

TEST(Cli, BoundPrintsClosedForm) {
    const auto r = run("bound --n 128 --e 1 --beta 0.2 --sigma2 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "3.3482142857142860e-03\n");
    EXPECT_EQ(std::stod(r.out), (1.0 / 256.0) * (1.2 / 1.4));
}

TEST(Cli, BoundGridIsCsv) {
    const auto r = run("bound --n 128 --e 1 --beta 0.05,0.2,0.8 --sigma2 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("n,e,beta,sigma2,bound,bound_db\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, BoundRejectsBadBetaAsRuntimeError) {
    EXPECT_EQ(run("bound --n 128 --e 1 --beta 2 --sigma2 1").code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("bound --n 128").code, 2);
    EXPECT_EQ(run("bound --n 128 --e 1 --beta 0.2 --sigma2 1 --bogus").code, 2);
    EXPECT_EQ(run("check-constellation").code, 2);
}

TEST(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST(Cli, CheckConstellationFromFile) {
    const auto dir = scratch("check");
    fs::create_directories(dir);
    const auto file = dir / "qam16.txt";
    {
        std::ofstream f(file);
        for (int re : {-3, -1, 1, 3})
            for (int im : {-3, -1, 1, 3}) f << re << ',' << im << '\n';
    }
    const auto plain = run("check-constellation --file " + file.string());
    EXPECT_EQ(plain.code, 0);
    EXPECT_NE(plain.out.find("witness c=-1"), std::string::npos) << plain.out;
    const auto shifted = run("check-constellation --file " + file.string() + " --beta 0.2");
    EXPECT_EQ(shifted.code, 0);
    EXPECT_EQ(shifted.out, "identifiable\n");
    EXPECT_EQ(run("check-constellation --qam 16").code, 0);
    fs::remove_all(dir);
}

TEST(Cli, CheckConstellationBadFileIsRuntimeError) {
    const auto dir = scratch("badfile");
    fs::create_directories(dir);
    const auto file = dir / "bad.txt";
    std::ofstream(file) << "1,2\nnot a point\n";
    EXPECT_EQ(run("check-constellation --file " + file.string()).code, 1);
    EXPECT_EQ(run("check-constellation --file " + (dir / "missing.txt").string()).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, DemoEmTraceIsNonDecreasing) {
    const auto r = run("demo-em --seed 3");
    ASSERT_EQ(r.code, 0) << r.out;
    std::istringstream in(r.out);
    std::string line;
    double prev = -1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        int it;
        double ll;
        if (std::sscanf(line.c_str(), "%d %lf", &it, &ll) == 2) {
            EXPECT_GE(ll, prev - 1e-8 * std::abs(prev));
            prev = ll;
            ++rows;
        }
    }
    EXPECT_GE(rows, 2);
}

TEST(Cli, SweepWritesCsvAndMeta) {
    const auto dir = scratch("sweep");
    const auto r = run("sweep --config " + cfg_dir + "/smoke.cfg --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto csv = slurp(dir / "results.csv");
    EXPECT_EQ(csv.rfind("beta,eb_n0_db,sir_db,estimator,mse_hba,mse_hba_db,mse_haa,mse_haa_db,ber,bound,"
                        "bound_db,trials_used,degenerate\n",
                        0),
              0u);
    // 2 beta points x 3 estimators
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    const auto meta = slurp(dir / "meta.txt");
    EXPECT_NE(meta.find("config_hash"), std::string::npos);
    EXPECT_NE(meta.find("seed = 7"), std::string::npos);
    EXPECT_NE(meta.find("trials = 20"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, SweepIsByteIdenticalAcrossRunsAndThreads) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    ASSERT_EQ(run("sweep --config " + cfg_dir + "/smoke.cfg --out " + a.string() + " --threads 1").code, 0);
    ASSERT_EQ(run("sweep --config " + cfg_dir + "/smoke.cfg --out " + b.string() + " --threads 3").code, 0);
    EXPECT_EQ(slurp(a / "results.csv"), slurp(b / "results.csv"));
    EXPECT_EQ(slurp(a / "meta.txt"), slurp(b / "meta.txt"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, SweepFig2aHasOneRowPerBeta) {
    const auto dir = scratch("fig2a");
    ASSERT_EQ(run("sweep --config " + cfg_dir + "/fig2a.cfg --out " + dir.string() + " --trials 4").code, 0);
    const auto csv = slurp(dir / "results.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    fs::remove_all(dir);
}

TEST(Cli, SweepOverridesSeed) {
    const auto a = scratch("seed_a");
    const auto b = scratch("seed_b");
    ASSERT_EQ(run("sweep --config " + cfg_dir + "/smoke.cfg --out " + a.string() + " --trials 3").code, 0);
    ASSERT_EQ(run("sweep --config " + cfg_dir + "/smoke.cfg --out " + b.string() + " --trials 3 --seed 8").code, 0);
    EXPECT_NE(slurp(a / "results.csv"), slurp(b / "results.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, SweepConfigErrorsAreRuntimeErrors) {
    const auto dir = scratch("cfgerr");
    fs::create_directories(dir);
    const auto file = dir / "bad.cfg";
    std::ofstream(file) << "unknown_key = 3\n";
    EXPECT_EQ(run("sweep --config " + file.string() + " --out " + (dir / "out").string()).code, 1);
    EXPECT_EQ(run("sweep --config " + (dir / "nope.cfg").string() + " --out " + dir.string()).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, SweepUnwritableOutputIsRuntimeError) {
    const auto dir = scratch("unwritable");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    EXPECT_EQ(run("sweep --config " + cfg_dir + "/smoke.cfg --out " + (dir / "file" / "sub").string()).code, 1);
    fs::remove_all(dir);
}
