#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlfec/codes.hpp"

namespace mlfec {

#ifdef NDEBUG
inline constexpr bool kGrayWalkAuditDefault = false;
#else
inline constexpr bool kGrayWalkAuditDefault = true;
#endif

/// Per-row position lists for incremental correlation updates.
struct GrayWalkPlan {
    int k = 0;
    int n = 0;
    std::vector<word> row_masks;
    std::vector<std::uint8_t> positions;  // concatenated set-coordinate lists
    std::vector<int> offsets;             // row t spans positions[offsets[t]..offsets[t+1])

    explicit GrayWalkPlan(const GeneratorMatrix& g) : k(g.k), n(g.n), row_masks(g.rows) {
        offsets.push_back(0);
        for (word row : g.rows) {
            word x = row;
            while (x) {
                positions.push_back(static_cast<std::uint8_t>(std::countr_zero(x)));
                x &= x - 1;
            }
            offsets.push_back(static_cast<int>(positions.size()));
        }
    }
};

/// Visits all 2^k messages in binary-reflected Gray order, maintaining the
/// correlation score = sum_i r[i] * c_i incrementally. Step s flips value
/// bit p = countr_zero(s), i.e. generator row t = k-1-p, and the score
/// changes by sum_{i in row} +-r[i] against the pre-flip codeword bits,
/// evaluated as row_sum[t] - 2 * sum_{i in row, c_i = 1} r[i]. The visitor
/// is called as visit(message_value, codeword, score), starting with
/// (0, 0, 0.0).
///
/// With audit enabled the incrementally maintained score is checked against
/// a from-scratch correlation every 2^10 steps.
template <class Visitor>
void gray_score_walk(const GrayWalkPlan& plan, const double* r, Visitor&& visit,
                     bool audit = kGrayWalkAuditDefault) {
    std::array<double, 64> row_sum{};
    for (int t = 0; t < plan.k; ++t) {
        double a = 0.0;
        for (int q = plan.offsets[static_cast<size_t>(t)]; q < plan.offsets[static_cast<size_t>(t) + 1]; ++q)
            a += r[plan.positions[static_cast<size_t>(q)]];
        row_sum[static_cast<size_t>(t)] = a;
    }

    word m = 0;
    word c = 0;
    double score = 0.0;
    visit(m, c, score);

    const std::uint64_t total = std::uint64_t{1} << plan.k;
    for (std::uint64_t s = 1; s < total; ++s) {
        const int p = std::countr_zero(s);
        const int t = plan.k - 1 - p;
        double masked = 0.0;
        word u = plan.row_masks[static_cast<size_t>(t)] & c;
        while (u) {
            masked += r[std::countr_zero(u)];
            u &= u - 1;
        }
        const double delta = row_sum[static_cast<size_t>(t)] - 2.0 * masked;
        c ^= plan.row_masks[static_cast<size_t>(t)];
        m ^= word{1} << p;
        score += delta;

        if (audit && (s & 0x3FF) == 0) {
            double fresh = 0.0;
            for (int i = 0; i < plan.n; ++i)
                if ((c >> i) & 1) fresh += r[i];
            if (std::abs(fresh - score) > 1e-9)
                throw std::logic_error("gray_score_walk: incremental score drifted");
        }
        visit(m, c, score);
    }
}

}  // namespace mlfec
