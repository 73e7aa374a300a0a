#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlfec/codes.hpp"
#include "mlfec/graywalk.hpp"

namespace mlfec {

enum class AlphaMode { Matched, Fixed };

/// Layered network with binary, codebook-defined weights and zero biases.
///
/// Single-label: [n, 2^k]; the first-layer weight matrix W1 has column j
/// equal to codeword j of the canonical stream, and decoding reads the
/// argmax of the output scores.
///
/// Multi-label: [n, 2^k, k]; the hidden layer applies a scaled softmax
/// (alpha = 2/sigma^2 when matched to the channel) and W2 has row j equal
/// to message j, so the output neurons carry per-bit posteriors that are
/// thresholded at 1/2.
///
/// Weights are held in packed form via the stream; w1_column / w2_row
/// materialize individual columns and rows on demand.
struct LayeredNet {
    enum class Arch { SingleLabel, MultiLabel };

    Arch arch = Arch::SingleLabel;
    CodewordStream stream;
    AlphaMode alpha_mode = AlphaMode::Matched;
    double fixed_alpha = 0.0;

    explicit LayeredNet(CodewordStream s) : stream(std::move(s)) {}

    int input_size() const { return stream.code.n; }
    std::uint64_t hidden_size() const { return stream.count(); }

    std::vector<std::uint64_t> layer_sizes() const {
        if (arch == Arch::SingleLabel)
            return {static_cast<std::uint64_t>(stream.code.n), stream.count()};
        return {static_cast<std::uint64_t>(stream.code.n), stream.count(),
                static_cast<std::uint64_t>(stream.code.k)};
    }

    word w1_column(std::uint64_t j) const { return stream.codeword(j); }
    word w2_row(std::uint64_t j) const { return stream.message_value(j); }

    double alpha_for(double sigma) const {
        if (alpha_mode == AlphaMode::Fixed) return fixed_alpha;
        if (!(sigma > 0.0)) throw std::invalid_argument("matched alpha requires sigma > 0");
        return 2.0 / (sigma * sigma);
    }

    std::string alpha_mode_label() const {
        if (arch == Arch::SingleLabel) return "n/a";
        return alpha_mode == AlphaMode::Matched ? "matched" : "fixed";
    }
};

inline LayeredNet build_slnn(CodewordStream stream) {
    LayeredNet net(std::move(stream));
    net.arch = LayeredNet::Arch::SingleLabel;
    return net;
}

inline LayeredNet build_mlnn(CodewordStream stream, AlphaMode mode, double fixed_alpha = 0.0) {
    LayeredNet net(std::move(stream));
    net.arch = LayeredNet::Arch::MultiLabel;
    net.alpha_mode = mode;
    if (mode == AlphaMode::Fixed) {
        if (!(fixed_alpha > 0.0))
            throw std::invalid_argument("build_mlnn: fixed alpha must be positive");
        net.fixed_alpha = fixed_alpha;
    }
    return net;
}

// ---------------------------------------------------------------------------
// Edge accounting: nonzero weight entries, counted per layer by streaming
// the packed matrices.
// ---------------------------------------------------------------------------

struct EdgeCount {
    std::vector<std::uint64_t> per_layer;
    std::uint64_t total = 0;
};

inline EdgeCount edge_count(const LayeredNet& net) {
    const GeneratorMatrix& g = net.stream.code;
    EdgeCount out;

    std::uint64_t w1 = 0;
    word c = 0;
    const std::uint64_t count = net.stream.count();
    for (std::uint64_t s = 1; s < count; ++s) {
        c ^= g.rows[static_cast<size_t>(g.k - 1 - std::countr_zero(s))];
        w1 += static_cast<std::uint64_t>(popcount(c));
    }
    out.per_layer.push_back(w1);

    if (net.arch == LayeredNet::Arch::MultiLabel) {
        std::uint64_t w2 = 0;
        for (std::uint64_t m = 0; m < count; ++m) w2 += static_cast<std::uint64_t>(popcount(m));
        out.per_layer.push_back(w2);
    }
    for (std::uint64_t e : out.per_layer) out.total += e;
    return out;
}

// ---------------------------------------------------------------------------
// Forward passes
// ---------------------------------------------------------------------------

struct SlnnForward {
    std::vector<double> scores;      // scores[m] for message value m
    std::uint64_t argmax_index = 1;  // 1-based codebook index, ties to lowest
    double best = 0.0;
    double second = 0.0;
};

/// First-layer scores r * W1 plus the argmax readout. The walk and the
/// argmax update rule are shared with ml_decode, so the two agree exactly.
inline void forward_slnn(const LayeredNet& net, std::span<const double> r, SlnnForward& out) {
    if (net.arch != LayeredNet::Arch::SingleLabel)
        throw std::invalid_argument("forward_slnn: network is not single-label");
    if (static_cast<int>(r.size()) != net.stream.code.n)
        throw std::invalid_argument("forward_slnn: received vector length != n");

    const GrayWalkPlan plan(net.stream.code);
    out.scores.assign(static_cast<size_t>(net.stream.count()), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    word best_m = 0;
    gray_score_walk(plan, r.data(), [&](word m, word /*c*/, double score) {
        out.scores[static_cast<size_t>(m)] = score;
        if (score > best) {
            second = best;
            best = score;
            best_m = m;
        } else {
            if (score == best && m < best_m) best_m = m;
            if (score > second) second = score;
        }
    });
    out.argmax_index = best_m + 1;
    out.best = best;
    out.second = second;
}

inline SlnnForward forward_slnn(const LayeredNet& net, std::span<const double> r) {
    SlnnForward out;
    forward_slnn(net, r, out);
    return out;
}

struct MlnnForward {
    std::vector<double> posteriors;  // per information bit, P(b_i = 1 | r)
    word bits = 0;
    std::vector<double> hidden;  // softmax activations by message value; k <= 16 only
};

/// Hidden layer h = softmax(alpha * r W1), output posteriors h W2, bits by
/// thresholding at 1/2 (a posterior of exactly 1/2 gives bit 0). Streamed
/// in two passes so the 2^k activations never need to be materialized:
/// pass one finds the softmax maximum, pass two accumulates the normalizer
/// and the k output sums.
inline MlnnForward forward_mlnn(const LayeredNet& net, std::span<const double> r, double sigma) {
    if (net.arch != LayeredNet::Arch::MultiLabel)
        throw std::invalid_argument("forward_mlnn: network is not multi-label");
    if (static_cast<int>(r.size()) != net.stream.code.n)
        throw std::invalid_argument("forward_mlnn: received vector length != n");
    const double alpha = net.alpha_for(sigma);
    const int k = net.stream.code.k;
    const GrayWalkPlan plan(net.stream.code);

    double max_score = -std::numeric_limits<double>::infinity();
    gray_score_walk(plan, r.data(), [&](word, word, double score) {
        if (score > max_score) max_score = score;
    });
    const double a_max = alpha * max_score;

    MlnnForward out;
    const bool keep_hidden = k <= 16;
    if (keep_hidden) out.hidden.assign(static_cast<size_t>(net.stream.count()), 0.0);

    std::vector<double> sums(static_cast<size_t>(k), 0.0);
    double normalizer = 0.0;
    gray_score_walk(plan, r.data(), [&](word m, word, double score) {
        const double h = std::exp(alpha * score - a_max);
        normalizer += h;
        if (keep_hidden) out.hidden[static_cast<size_t>(m)] = h;
        word mm = m;
        while (mm) {
            sums[static_cast<size_t>(std::countr_zero(mm))] += h;
            mm &= mm - 1;
        }
    });

    if (keep_hidden)
        for (double& h : out.hidden) h /= normalizer;

    out.posteriors.resize(static_cast<size_t>(k));
    for (int i = 1; i <= k; ++i) {
        const int p = k - i;
        const double posterior = sums[static_cast<size_t>(p)] / normalizer;
        out.posteriors[static_cast<size_t>(i - 1)] = posterior;
        if (posterior > 0.5) out.bits |= word{1} << p;
    }
    return out;
}

}  // namespace mlfec
