#include "mlfec/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlfec/decoders.hpp"
#include "mlfec/rng.hpp"
#include "testutil.hpp"

using namespace mlfec;

namespace {

LayeredNet slnn_for(const char* id) { return build_slnn(CodewordStream(make_code(id))); }
LayeredNet mlnn_for(const char* id) {
    return build_mlnn(CodewordStream(make_code(id)), AlphaMode::Matched);
}

}  // namespace

TEST(EdgeCounts, SingleLabel) {
    EXPECT_EQ(edge_count(slnn_for("hamming74")).total, 56u);
    EXPECT_EQ(edge_count(slnn_for("polar168")).total, 2048u);
    EXPECT_EQ(edge_count(slnn_for("bch3121")).total, 32505856u);
}

TEST(EdgeCounts, MultiLabel) {
    const EdgeCount hamming = edge_count(mlnn_for("hamming74"));
    ASSERT_EQ(hamming.per_layer.size(), 2u);
    EXPECT_EQ(hamming.per_layer[0], 56u);
    EXPECT_EQ(hamming.per_layer[1], 32u);  // k * 2^(k-1)
    EXPECT_EQ(hamming.total, 88u);
    EXPECT_EQ(edge_count(mlnn_for("polar168")).total, 3072u);
    EXPECT_EQ(edge_count(mlnn_for("bch3121")).total, 54525952u);
}

TEST(EdgeCounts, AgreeWithCodeStatsAndClosedForm) {
    for (const char* id : {"hamming74", "polar168", "bch3121"}) {
        const GeneratorMatrix g = make_code(id);
        const EdgeCount edges = edge_count(mlnn_for(id));
        EXPECT_EQ(edges.per_layer[0], code_stats(g).weight_sum) << id;
        EXPECT_EQ(edges.per_layer[1],
                  static_cast<std::uint64_t>(g.k) * (std::uint64_t{1} << (g.k - 1)))
            << id;
    }
}

TEST(LayeredNet, ShapesAndWeights) {
    const LayeredNet s = slnn_for("hamming74");
    EXPECT_EQ(s.layer_sizes(), (std::vector<std::uint64_t>{7, 16}));
    EXPECT_EQ(s.w1_column(1), 0u);  // all-zero codeword: unconnected output neuron

    const LayeredNet m = mlnn_for("polar168");
    EXPECT_EQ(m.layer_sizes(), (std::vector<std::uint64_t>{16, 256, 8}));
    for (std::uint64_t j = 1; j <= 256; ++j) {
        EXPECT_EQ(m.w1_column(j), m.stream.codeword(j));
        EXPECT_EQ(m.w2_row(j), j - 1);
    }
}

TEST(ForwardSlnn, NoiseFreeSeparatesEveryCodeword) {
    const LayeredNet net = slnn_for("hamming74");
    for (std::uint64_t j = 1; j <= 16; ++j) {
        std::vector<double> r = bpsk_map(net.stream.codeword(j), 7);
        for (double& x : r) x *= 50.0;  // large gain
        EXPECT_EQ(forward_slnn(net, r).argmax_index, j);
    }
}

TEST(ForwardSlnn, ZeroInputTiesToFirstIndex) {
    const LayeredNet net = slnn_for("hamming74");
    const std::vector<double> r(7, 0.0);
    const SlnnForward out = forward_slnn(net, r);
    EXPECT_EQ(out.argmax_index, 1u);
    for (double s : out.scores) EXPECT_EQ(s, 0.0);
}

TEST(ForwardSlnn, MatchesBruteForceLikelihood) {
    const LayeredNet net = slnn_for("hamming74");
    const CodewordStream stream(net.stream);
    const double sigma = 1.0;
    rng::Stream gen(17);
    int near_ties = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto r = testutil::received_vector(net.stream.code, sigma, gen, nullptr);
        const SlnnForward fwd = forward_slnn(net, r);
        const DecodeOutcome oracle = oracle_ml(stream, r, sigma);
        if (fwd.argmax_index - 1 != oracle.message) {
            ASSERT_LT(fwd.best - fwd.second, 1e-9) << "disagreement beyond near-tie band";
            ++near_ties;
        }
    }
    EXPECT_LE(near_ties, 1);
}

TEST(ForwardSlnn, ArgmaxIsScaleInvariant) {
    const LayeredNet net = slnn_for("polar168");
    rng::Stream gen(18);
    for (int t = 0; t < 2000; ++t) {
        const auto r = testutil::received_vector(net.stream.code, 1.0, gen, nullptr);
        auto scaled = r;
        const double a = 0.001 + 500.0 * gen.next_unit();
        for (double& x : scaled) x *= a;
        EXPECT_EQ(forward_slnn(net, r).argmax_index, forward_slnn(net, scaled).argmax_index);
    }
}

TEST(ForwardMlnn, HiddenActivationsFormDistribution) {
    const LayeredNet net = mlnn_for("hamming74");
    rng::Stream gen(19);
    for (int t = 0; t < 200; ++t) {
        const auto r = testutil::received_vector(net.stream.code, 0.8, gen, nullptr);
        const MlnnForward out = forward_mlnn(net, r, 0.8);
        ASSERT_EQ(out.hidden.size(), 16u);
        double sum = 0.0;
        for (double h : out.hidden) {
            EXPECT_GE(h, 0.0);
            sum += h;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(ForwardMlnn, NoiseFreeRecoversAllMessages) {
    const LayeredNet net = mlnn_for("hamming74");
    for (word m = 0; m < 16; ++m) {
        const auto r = bpsk_map(net.stream.code.encode_value(m), 7);
        EXPECT_EQ(forward_mlnn(net, r, 0.1).bits, m);
    }
}

TEST(ForwardMlnn, MatchesBruteForceBitwiseComparison) {
    const LayeredNet net = mlnn_for("hamming74");
    const CodewordStream stream(net.stream);
    const double sigma = ebn0_to_sigma(4.0, 4.0 / 7.0);
    rng::Stream gen(20);
    int near_ties = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto r = testutil::received_vector(net.stream.code, sigma, gen, nullptr);
        const MlnnForward fwd = forward_mlnn(net, r, sigma);
        const word oracle = oracle_map(stream, r, sigma);
        if (fwd.bits != oracle) {
            double min_margin = 1.0;
            for (double p : fwd.posteriors) min_margin = std::min(min_margin, std::abs(p - 0.5));
            ASSERT_LT(min_margin, 1e-9) << "disagreement beyond near-tie band";
            ++near_ties;
        }
    }
    EXPECT_LE(near_ties, 1);
}

TEST(ForwardMlnn, PosteriorComplementarity) {
    const LayeredNet net = mlnn_for("polar168");
    rng::Stream gen(21);
    for (int t = 0; t < 300; ++t) {
        const auto r = testutil::received_vector(net.stream.code, 1.0, gen, nullptr);
        const MlnnForward out = forward_mlnn(net, r, 1.0);
        // P(b_i = 0 | r) accumulated the same way from the complement set
        for (int i = 1; i <= 8; ++i) {
            double p0 = 0.0;
            for (word m = 0; m < 256; ++m)
                if (!((m >> (8 - i)) & 1)) p0 += out.hidden[m];
            EXPECT_NEAR(out.posteriors[i - 1] + p0, 1.0, 1e-9);
        }
    }
}

TEST(ForwardMlnn, SoftmaxStableAtExtremeScores) {
    const LayeredNet net = mlnn_for("hamming74");
    // |alpha * score| up to ~1e4
    std::vector<double> r = bpsk_map(net.stream.codeword(16), 7);
    for (double& x : r) x *= 715.0;  // alpha = 2 at sigma = 1 -> max |a| = 2 * 7 * 715 ~ 1e4
    const MlnnForward out = forward_mlnn(net, r, 1.0);
    for (double p : out.posteriors) {
        EXPECT_TRUE(std::isfinite(p));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
    EXPECT_EQ(out.bits, net.stream.message_value(16));
}

TEST(Nesting, MultiLabelIsSingleLabelPlusOutputLayer) {
    const LayeredNet slnn = slnn_for("polar168");
    const LayeredNet mlnn = mlnn_for("polar168");
    rng::Stream gen(22);
    const double sigma = 0.9;
    for (int t = 0; t < 100; ++t) {
        const auto r = testutil::received_vector(slnn.stream.code, sigma, gen, nullptr);
        const SlnnForward first = forward_slnn(slnn, r);
        const MlnnForward full = forward_mlnn(mlnn, r, sigma);

        // softmax over the first-layer scores, then the binary output layer
        const double alpha = 2.0 / (sigma * sigma);
        double amax = -1e300;
        for (double s : first.scores) amax = std::max(amax, alpha * s);
        std::vector<double> h(first.scores.size());
        double z = 0.0;
        for (size_t m = 0; m < h.size(); ++m) {
            h[m] = std::exp(alpha * first.scores[m] - amax);
            z += h[m];
        }
        for (size_t m = 0; m < h.size(); ++m) {
            ASSERT_NEAR(h[m] / z, full.hidden[m], 1e-12);
        }
        for (int i = 1; i <= 8; ++i) {
            double p1 = 0.0;
            for (size_t m = 0; m < h.size(); ++m)
                if ((m >> (8 - i)) & 1) p1 += h[m] / z;
            ASSERT_NEAR(p1, full.posteriors[i - 1], 1e-9);
        }
    }
}

TEST(ForwardMlnn, FixedAlphaUsesFrozenScale) {
    const double rate = 4.0 / 7.0;
    const double sigma4 = ebn0_to_sigma(4.0, rate);
    const LayeredNet fixed =
        build_mlnn(CodewordStream(make_code("hamming74")), AlphaMode::Fixed,
                   2.0 / (sigma4 * sigma4));
    const LayeredNet matched = mlnn_for("hamming74");
    rng::Stream gen(23);
    const auto r = testutil::received_vector(fixed.stream.code, sigma4, gen, nullptr);
    // at the design point the two coincide
    const MlnnForward a = forward_mlnn(fixed, r, sigma4);
    const MlnnForward b = forward_mlnn(matched, r, sigma4);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(a.posteriors[i], b.posteriors[i], 1e-12);
    // fixed nets don't need sigma
    EXPECT_NO_THROW(forward_mlnn(fixed, r, 0.0));
}

TEST(Build, InputValidation) {
    EXPECT_THROW(build_mlnn(CodewordStream(make_code("hamming74")), AlphaMode::Fixed, 0.0),
                 std::invalid_argument);
    const LayeredNet s = slnn_for("hamming74");
    const std::vector<double> bad(6, 0.0);
    EXPECT_THROW(forward_slnn(s, bad), std::invalid_argument);
    const LayeredNet m = mlnn_for("hamming74");
    const std::vector<double> r(7, 0.0);
    EXPECT_THROW(forward_mlnn(m, r, 0.0), std::invalid_argument);  // matched needs sigma > 0
}
