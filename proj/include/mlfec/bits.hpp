#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlfec {

/// Packed GF(2) vector. Coordinate i of a codeword lives at bit i, so a
/// codeword string "1000110" parses with its first character at bit 0.
using word = std::uint64_t;

/// Message values are plain integers rendered MSB-first: for a k-bit
/// message, information bit i (1-based) is bit (k - i) of the value.
/// The canonical codebook index j (1-based) carries message value j - 1.

inline int popcount(word x) noexcept { return std::popcount(x); }

inline word gray_code(word s) noexcept { return s ^ (s >> 1); }

inline word low_mask(int bits) noexcept {
    return bits >= 64 ? ~word{0} : (word{1} << bits) - 1;
}

/// Codeword rendering: coordinate 0 first.
inline std::string codeword_string(word c, int n) {
    std::string s(static_cast<size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((c >> i) & 1) s[static_cast<size_t>(i)] = '1';
    return s;
}

inline word parse_codeword_string(const std::string& s) {
    if (s.size() > 64) throw std::invalid_argument("codeword string longer than 64 bits");
    word c = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            c |= word{1} << i;
        else if (s[i] != '0')
            throw std::invalid_argument("codeword string must contain only 0/1");
    }
    return c;
}

/// Message rendering: information bit 1 first (MSB of the value).
inline std::string message_string(word v, int k) {
    std::string s(static_cast<size_t>(k), '0');
    for (int i = 0; i < k; ++i)
        if ((v >> (k - 1 - i)) & 1) s[static_cast<size_t>(i)] = '1';
    return s;
}

}  // namespace mlfec
