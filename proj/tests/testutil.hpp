#pragma once

#include <cstdint>
#include <vector>

#include "mlfec/channel.hpp"
#include "mlfec/codes.hpp"
#include "mlfec/rng.hpp"

namespace testutil {

/// Channel-realistic received vector: a uniformly drawn codeword sent over
/// the AWGN channel at the given sigma.
inline std::vector<double> received_vector(const mlfec::GeneratorMatrix& g, double sigma,
                                           mlfec::rng::Stream& stream, mlfec::word* sent_message) {
    const mlfec::word m = stream.next_bits(g.k);
    if (sent_message) *sent_message = m;
    std::vector<double> r = mlfec::bpsk_map(g.encode_value(m), g.n);
    for (double& x : r) x += sigma * stream.next_gaussian();
    return r;
}

/// Independent codebook scan: enumerates every message by direct row XOR
/// (no Gray-code shortcuts) and reports min distance plus total weight.
struct ScanResult {
    int min_distance;
    std::uint64_t weight_sum;
};

inline ScanResult brute_force_scan(const mlfec::GeneratorMatrix& g) {
    ScanResult out{g.n + 1, 0};
    const std::uint64_t count = std::uint64_t{1} << g.k;
    for (std::uint64_t m = 1; m < count; ++m) {
        mlfec::word c = 0;
        for (int t = 0; t < g.k; ++t)
            if ((m >> (g.k - 1 - t)) & 1) c ^= g.rows[static_cast<size_t>(t)];
        const int w = mlfec::popcount(c);
        out.weight_sum += static_cast<std::uint64_t>(w);
        if (w < out.min_distance) out.min_distance = w;
    }
    return out;
}

}  // namespace testutil
