#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlfec/bits.hpp"
#include "mlfec/gf2.hpp"

namespace mlfec {

/// An (n, k) binary linear block code given by its generator rows.
/// Row t is the codeword of the unit message with information bit t+1 set.
/// Rows are validated to be linearly independent.
struct GeneratorMatrix {
    std::string name;
    int k = 0;
    int n = 0;
    std::vector<word> rows;
    std::vector<int> frozen_bits;  // polar construction metadata; empty otherwise

    double rate() const { return static_cast<double>(k) / static_cast<double>(n); }

    /// m * G for a message given as a value (information bit 1 = MSB).
    word encode_value(word m) const {
        word c = 0;
        for (int t = 0; t < k; ++t)
            if ((m >> (k - 1 - t)) & 1) c ^= rows[static_cast<size_t>(t)];
        return c;
    }
};

inline GeneratorMatrix make_generator(std::string name, int k, int n, std::vector<word> rows,
                                      std::vector<int> frozen_bits = {}) {
    if (k < 1 || k >= n || n > 64)
        throw std::invalid_argument("generator matrix needs 1 <= k < n <= 64");
    if (static_cast<int>(rows.size()) != k)
        throw std::invalid_argument("generator matrix needs exactly k rows");
    for (word r : rows)
        if (r & ~low_mask(n)) throw std::invalid_argument("generator row exceeds n bits");
    if (gf2::rank(rows, n) != k)
        throw std::invalid_argument("generator rows must be linearly independent");
    GeneratorMatrix g;
    g.name = std::move(name);
    g.k = k;
    g.n = n;
    g.rows = std::move(rows);
    g.frozen_bits = std::move(frozen_bits);
    return g;
}

/// Enumerates (index, message, codeword) triples in canonical order:
/// index j in [1, 2^k] carries message value j - 1 and its encoding.
struct CodewordStream {
    GeneratorMatrix code;

    explicit CodewordStream(GeneratorMatrix g) : code(std::move(g)) {}

    std::uint64_t count() const { return std::uint64_t{1} << code.k; }
    word message_value(std::uint64_t index) const { return index - 1; }
    word codeword(std::uint64_t index) const { return code.encode_value(index - 1); }
};

/// Right inverse of G; maps any codeword back to its message value.
struct MessageRecovery {
    int n = 0;
    int k = 0;
    std::vector<word> rinv;  // rinv[p] = k-bit contribution of coordinate p

    word recover(word c) const {
        word m = 0;
        word x = c;
        while (x) {
            const int p = std::countr_zero(x);
            m ^= rinv[static_cast<size_t>(p)];
            x &= x - 1;
        }
        return m;
    }
};

inline MessageRecovery make_recovery(const GeneratorMatrix& g) {
    MessageRecovery r;
    r.n = g.n;
    r.k = g.k;
    r.rinv = gf2::right_inverse(g.rows, g.n);
    return r;
}

inline word encode(const GeneratorMatrix& g, std::span<const std::uint8_t> message_bits) {
    if (static_cast<int>(message_bits.size()) != g.k)
        throw std::invalid_argument("encode: message length does not match k");
    word m = 0;
    for (int i = 0; i < g.k; ++i)
        if (message_bits[static_cast<size_t>(i)]) m |= word{1} << (g.k - 1 - i);
    return g.encode_value(m);
}

inline word recover_message(const MessageRecovery& r, word c) { return r.recover(c); }

inline word recover_message(const GeneratorMatrix& g, word c) {
    return make_recovery(g).recover(c);
}

// ---------------------------------------------------------------------------
// Code constructions
// ---------------------------------------------------------------------------

/// (7,4) Hamming code in systematic form [I | P].
inline GeneratorMatrix build_hamming_7_4() {
    // Parity columns per row: distinct nonzero triples of weight >= 2.
    constexpr std::array<word, 4> parity = {0b011, 0b101, 0b110, 0b111};
    std::vector<word> rows;
    for (int t = 0; t < 4; ++t) rows.push_back((word{1} << t) | (parity[static_cast<size_t>(t)] << 4));
    return make_generator("hamming74", 4, 7, std::move(rows));
}

namespace detail {

/// GF(2^5) with primitive polynomial x^5 + x^2 + 1.
struct GF32 {
    static constexpr unsigned kPrim = 0b100101;

    std::array<unsigned, 31> antilog{};

    GF32() {
        unsigned x = 1;
        for (int i = 0; i < 31; ++i) {
            antilog[static_cast<size_t>(i)] = x;
            x <<= 1;
            if (x & 0b100000) x ^= kPrim;
        }
    }

    unsigned mul(unsigned a, unsigned b) const {
        unsigned r = 0;
        while (b) {
            if (b & 1) r ^= a;
            a <<= 1;
            if (a & 0b100000) a ^= kPrim;
            b >>= 1;
        }
        return r;
    }

    /// Minimal polynomial of an element, as a GF(2) polynomial packed with
    /// the coefficient of x^i at bit i.
    word min_poly(unsigned e) const {
        std::vector<unsigned> conjugates;
        unsigned x = e;
        do {
            conjugates.push_back(x);
            x = mul(x, x);
        } while (x != e);

        // prod (X + c); coefficients stay in GF(32) during the product.
        std::vector<unsigned> poly = {1};
        for (unsigned c : conjugates) {
            std::vector<unsigned> next(poly.size() + 1, 0);
            for (size_t i = 0; i < poly.size(); ++i) {
                next[i + 1] ^= poly[i];
                next[i] ^= mul(poly[i], c);
            }
            poly = std::move(next);
        }
        word packed = 0;
        for (size_t i = 0; i < poly.size(); ++i) {
            if (poly[i] > 1) throw std::logic_error("minimal polynomial not binary");
            if (poly[i]) packed |= word{1} << i;
        }
        return packed;
    }
};

inline word poly_mul_gf2(word a, word b) {
    word r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

inline word poly_mod_gf2(word a, word m) {
    const int dm = 63 - std::countl_zero(m);
    while (true) {
        if (a == 0) return 0;
        const int da = 63 - std::countl_zero(a);
        if (da < dm) return a;
        a ^= m << (da - dm);
    }
}

inline int poly_degree(word p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

}  // namespace detail

/// Generator polynomial of the narrow-sense double-error-correcting BCH
/// code of length 31: lcm of the minimal polynomials of alpha and alpha^3.
inline word bch_31_21_generator_poly() {
    detail::GF32 f;
    const word m1 = f.min_poly(f.antilog[1]);
    const word m3 = f.min_poly(f.antilog[3]);
    if (m1 == m3) return m1;  // distinct cyclotomic cosets expected
    return detail::poly_mul_gf2(m1, m3);
}

/// (31,21) BCH code; rows are the cyclic shifts x^i * g(x), i = 0..20.
inline GeneratorMatrix build_bch_31_21() {
    const word g = bch_31_21_generator_poly();
    if (detail::poly_degree(g) != 10)
        throw std::logic_error("BCH generator polynomial must have degree 10");
    std::vector<word> rows;
    for (int i = 0; i < 21; ++i) rows.push_back(g << i);
    return make_generator("bch3121", 21, 31, std::move(rows));
}

/// (16,8) polar code. The information set is chosen by the Bhattacharyya
/// parameter recursion (Z- = 2Z - Z^2, Z+ = Z^2) starting from the BPSK/AWGN
/// value Z = exp(-1/(2 sigma^2)) at the design Eb/N0; the 8 synthetic
/// channels with the largest Z are frozen to 0, ties frozen at the lower
/// channel index. Rows are the unfrozen rows of the 4-fold Kronecker power
/// of [[1,0],[1,1]].
inline GeneratorMatrix build_polar_16_8(double design_ebn0_db = 0.0) {
    if (!std::isfinite(design_ebn0_db))
        throw std::invalid_argument("polar design Eb/N0 must be finite");
    constexpr int m = 4, n = 16, k = 8;
    const double rate = static_cast<double>(k) / n;
    const double sigma_sq = 1.0 / (2.0 * rate * std::pow(10.0, design_ebn0_db / 10.0));
    std::vector<double> z = {std::exp(-1.0 / (2.0 * sigma_sq))};
    for (int level = 0; level < m; ++level) {
        std::vector<double> nz(z.size() * 2);
        for (size_t i = 0; i < z.size(); ++i) {
            nz[2 * i] = 2.0 * z[i] - z[i] * z[i];
            nz[2 * i + 1] = z[i] * z[i];
        }
        z = std::move(nz);
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (z[static_cast<size_t>(a)] != z[static_cast<size_t>(b)]) return z[static_cast<size_t>(a)] > z[static_cast<size_t>(b)];
        return a < b;  // worse (larger Z) first; ties freeze the lower index
    });
    std::vector<int> frozen(order.begin(), order.begin() + (n - k));
    std::sort(frozen.begin(), frozen.end());

    std::vector<word> rows;
    std::vector<bool> is_frozen(n, false);
    for (int f : frozen) is_frozen[static_cast<size_t>(f)] = true;
    for (int i = 0; i < n; ++i) {
        if (is_frozen[static_cast<size_t>(i)]) continue;
        word row = 0;
        for (int j = 0; j < n; ++j)
            if ((i & j) == j) row |= word{1} << j;  // Kronecker power: entry (i,j) = [j subset of i]
        rows.push_back(row);
    }
    return make_generator("polar168", k, n, std::move(rows), std::move(frozen));
}

/// Look up one of the built-in codes by id.
inline GeneratorMatrix make_code(const std::string& id) {
    if (id == "hamming74") return build_hamming_7_4();
    if (id == "polar168") return build_polar_16_8();
    if (id == "bch3121") return build_bch_31_21();
    throw std::invalid_argument("unknown code '" + id + "' (expected hamming74, polar168 or bch3121)");
}

// ---------------------------------------------------------------------------
// Codebook statistics
// ---------------------------------------------------------------------------

struct CodeStats {
    int min_distance = 0;
    std::uint64_t weight_sum = 0;
    std::optional<std::vector<std::uint64_t>> weight_enumerator;  // filled for k <= 16
};

/// Streams the full codebook in Gray-code order; O(2^k) popcounts.
inline CodeStats code_stats(const GeneratorMatrix& g) {
    if (g.k > 24) throw std::invalid_argument("code_stats: 2^k enumeration limited to k <= 24");
    CodeStats stats;
    std::vector<std::uint64_t> enumerator;
    const bool want_enum = g.k <= 16;
    if (want_enum) enumerator.assign(static_cast<size_t>(g.n) + 1, 0);

    word c = 0;
    int min_w = g.n + 1;
    std::uint64_t sum = 0;
    if (want_enum) enumerator[0] = 1;  // the all-zero codeword
    const std::uint64_t total = std::uint64_t{1} << g.k;
    for (std::uint64_t s = 1; s < total; ++s) {
        const int p = std::countr_zero(s);
        c ^= g.rows[static_cast<size_t>(g.k - 1 - p)];
        const int w = popcount(c);
        sum += static_cast<std::uint64_t>(w);
        if (w < min_w) min_w = w;
        if (want_enum) ++enumerator[static_cast<size_t>(w)];
    }
    stats.min_distance = min_w;
    stats.weight_sum = sum;
    if (want_enum) stats.weight_enumerator = std::move(enumerator);
    return stats;
}

}  // namespace mlfec
