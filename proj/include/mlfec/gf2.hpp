#pragma once

#include <utility>
#include <vector>

#include "mlfec/bits.hpp"

namespace mlfec::gf2 {

/// Row-reduces a copy of the given rows (n columns, packed). Returns the
/// reduced rows together with the pivot column of each nonzero row.
struct Reduced {
    std::vector<word> rows;
    std::vector<int> pivots;
    int rank() const { return static_cast<int>(pivots.size()); }
};

inline Reduced row_reduce(std::vector<word> rows, int ncols) {
    Reduced out;
    size_t r = 0;
    for (int col = 0; col < ncols && r < rows.size(); ++col) {
        size_t pivot = r;
        while (pivot < rows.size() && !((rows[pivot] >> col) & 1)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[r], rows[pivot]);
        for (size_t i = 0; i < rows.size(); ++i)
            if (i != r && ((rows[i] >> col) & 1)) rows[i] ^= rows[r];
        out.pivots.push_back(col);
        ++r;
    }
    out.rows = std::move(rows);
    return out;
}

inline int rank(const std::vector<word>& rows, int ncols) {
    return row_reduce(rows, ncols).rank();
}

/// Right inverse of a full-rank k x n matrix G: an n-entry table R with
/// G * R = I_k. Entries are k-bit words in message-value bit order, so
/// XOR-ing R[p] over the set coordinates p of any codeword recovers its
/// message value.
inline std::vector<word> right_inverse(const std::vector<word>& grows, int ncols) {
    const int k = static_cast<int>(grows.size());
    std::vector<word> m = grows;
    std::vector<word> aug(grows.size());
    for (int t = 0; t < k; ++t) aug[static_cast<size_t>(t)] = word{1} << (k - 1 - t);

    std::vector<int> pivots;
    size_t r = 0;
    for (int col = 0; col < ncols && r < m.size(); ++col) {
        size_t pivot = r;
        while (pivot < m.size() && !((m[pivot] >> col) & 1)) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[r], m[pivot]);
        std::swap(aug[r], aug[pivot]);
        for (size_t i = 0; i < m.size(); ++i) {
            if (i != r && ((m[i] >> col) & 1)) {
                m[i] ^= m[r];
                aug[i] ^= aug[r];
            }
        }
        pivots.push_back(col);
        ++r;
    }
    if (static_cast<int>(pivots.size()) != k)
        throw std::invalid_argument("right_inverse requires a full-rank matrix");

    std::vector<word> rinv(static_cast<size_t>(ncols), 0);
    for (int i = 0; i < k; ++i) rinv[static_cast<size_t>(pivots[static_cast<size_t>(i)])] = aug[static_cast<size_t>(i)];
    return rinv;
}

/// Basis of the null space { h : G h^T = 0 } of a full-rank k x n matrix,
/// i.e. parity-check rows. Returns n - k packed rows.
inline std::vector<word> null_space(const std::vector<word>& grows, int ncols) {
    Reduced red = row_reduce(grows, ncols);
    std::vector<bool> is_pivot(static_cast<size_t>(ncols), false);
    for (int p : red.pivots) is_pivot[static_cast<size_t>(p)] = true;

    std::vector<word> h;
    for (int f = 0; f < ncols; ++f) {
        if (is_pivot[static_cast<size_t>(f)]) continue;
        word row = word{1} << f;
        for (size_t i = 0; i < red.pivots.size(); ++i)
            if ((red.rows[i] >> f) & 1) row |= word{1} << red.pivots[i];
        h.push_back(row);
    }
    return h;
}

}  // namespace mlfec::gf2
