#include <gtest/gtest.h>

#include "fdce/baselines.hpp"
#include "fdce/channel.hpp"
#include "fdce/constellation.hpp"
#include "fdce/detection.hpp"

using namespace fdce;

TEST(Detect, NoiselessPerfectCsiHasNoErrors) {
    for (int m : {4, 16, 64}) {
        const auto sh = shift(make_qam(m, 1.0), 0.2);
        Rng rng(m);
        for (int r = 0; r < 10; ++r) {
            const ChannelPair ch{sample_cn(1e4, rng), sample_cn(1.0, rng), 0.0};
            const auto xa = map_symbols(sh.alphabet(), draw_indices(m, 64, rng));
            const auto idx = draw_indices(m, 64, rng);
            const auto xb = map_symbols(sh.alphabet(), idx);
            const auto y = synthesize_frame(xa, xb, ch, rng).y;
            const auto det = cancel_and_detect(y, xa, perfect_csi(ch), sh.alphabet(), idx);
            EXPECT_EQ(det.symbol_errors, 0u);
            EXPECT_EQ(det.bit_errors, 0u);
            EXPECT_EQ(det.symbols_hat, idx);
            EXPECT_EQ(det.bits_hat, symbol_bits(sh.alphabet(), idx));
        }
    }
}

TEST(Detect, TieGoesToLowestIndex) {
    const auto c = Constellation::from_points({{1, 0}, {-1, 0}});
    const std::vector<cplx> y{{0, 0}}, xa{{0, 0}};
    const auto det = cancel_and_detect(y, xa, ParamVector({}, {1, 0}), c);
    EXPECT_EQ(det.symbols_hat[0], 0u);
}

TEST(Detect, SignFlipOnUnshiftedQam16) {
    // the c = -1 orbit maps each point to its negation; count label differences exhaustively
    const auto c = make_qam(16, 10.0);
    std::size_t flipped_bits = 0;
    for (std::size_t k = 0; k < 16; ++k) {
        std::size_t neg = 16;
        for (std::size_t j = 0; j < 16; ++j)
            if (std::abs(c[k] + c[j]) < 1e-9) neg = j;
        ASSERT_LT(neg, 16u);
        flipped_bits += std::popcount(c.label(k) ^ c.label(neg));
    }
    const double oracle_ber = static_cast<double>(flipped_bits) / 64.0;
    EXPECT_DOUBLE_EQ(oracle_ber, 0.5);

    Rng rng(3);
    const ChannelPair ch{{2.0, 1.0}, {0.8, -0.6}, 1e-4};
    const auto xa = map_symbols(c, draw_indices(16, 4096, rng));
    const auto idx = draw_indices(16, 4096, rng);
    const auto y = synthesize_frame(xa, map_symbols(c, idx), ch, rng).y;
    const auto det = cancel_and_detect(y, xa, ParamVector(ch.h_aa, -ch.h_ba), c, idx);
    EXPECT_NEAR(static_cast<double>(det.bit_errors) / (4096.0 * 4.0), 0.5, 0.02);
    EXPECT_EQ(det.symbol_errors, 4096u);
}

TEST(Detect, InvariantToSelfInterferenceTerm) {
    const auto sh = shift(make_qam(16, 1.0), 0.2);
    Rng rng(12);
    const ChannelPair ch{{30.0, 10.0}, {0.9, 0.1}, 0.5};
    const auto xa = map_symbols(sh.alphabet(), draw_indices(16, 256, rng));
    const auto idx = draw_indices(16, 256, rng);
    auto y = synthesize_frame(xa, map_symbols(sh.alphabet(), idx), ch, rng).y;
    const ParamVector est(ch.h_aa + cplx(0.1, -0.2), ch.h_ba * cplx(0.95, 0.05));
    const auto ref = cancel_and_detect(y, xa, est, sh.alphabet(), idx);
    const cplx delta(0.5, -0.25);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += delta * xa[i];
    const auto moved = cancel_and_detect(y, xa, ParamVector(est.h_aa() + delta, est.h_ba()), sh.alphabet(), idx);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < y.size(); ++i) differ += ref.symbols_hat[i] != moved.symbols_hat[i];
    EXPECT_EQ(differ, 0u);
}

TEST(Detect, RejectsLengthMismatch) {
    const auto c = make_qam(4, 1.0);
    const std::vector<cplx> y(4), xa(3);
    EXPECT_THROW(cancel_and_detect(y, xa, {}, c), frame_error);
    const std::vector<std::uint32_t> idx(2);
    EXPECT_THROW(cancel_and_detect(y, y, {}, c, idx), frame_error);
}

TEST(Ber, BasicCases) {
    std::vector<std::uint8_t> a(512, 0), b(512, 0);
    EXPECT_EQ(ber(a, b), 0.0);
    b[100] = 1;
    EXPECT_DOUBLE_EQ(ber(a, b), 1.0 / 512.0);
    for (auto& v : b) v = 1;
    EXPECT_EQ(ber(a, b), 1.0);
}

TEST(Ber, RejectsMismatchAndEmpty) {
    const std::vector<std::uint8_t> a(3), b(4), e;
    EXPECT_THROW(ber(a, b), frame_error);
    EXPECT_THROW(ber(e, e), frame_error);
}
