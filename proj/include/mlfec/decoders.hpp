#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlfec/channel.hpp"
#include "mlfec/codes.hpp"
#include "mlfec/fastexp.hpp"
#include "mlfec/graywalk.hpp"

namespace mlfec {

struct DecodeOutcome {
    word message = 0;
    word codeword = 0;
    bool bdd_failure = false;
    double metric = 0.0;
    std::vector<double> posteriors;  // per information bit; bit-wise decoders only
};

/// Terms more than this far (in log domain) below the running maximum are
/// treated as exact zeros in likelihood sums. The dropped mass is bounded
/// by 2^k * e^-45 < 7e-14 of the grand total (k <= 24), four orders of
/// magnitude under the 1e-9 near-tie band that decisions are compared at.
inline constexpr double kLogDropCutoff = 45.0;

// ---------------------------------------------------------------------------
// Lane-parallel fused ML + MAP kernel. Decodes L frames with one Gray-code
// codebook walk; r_lanes[i * L + lane] holds coordinate i of each lane's
// received vector. All arithmetic is element-wise (GCC vector extensions,
// built with -ffp-contract=off), so a frame decodes to bit-identical
// results whichever lane it lands in -- the scalar entry points below are
// just the L = 1 instantiation.
//
// ML side: running (best score, lowest message value) per lane.
// MAP side: compares sum_{c: b_i=1} exp(alpha r c) against the b_i=0 side
// per information bit. One walk feeds k per-bit accumulators plus a grand
// total. Exponents are shifted by alpha * sum_i max(r_i, 0), an upper
// bound on every alpha * score, so nothing overflows and no mid-stream
// rescaling is needed; terms kLogDropCutoff below the running maximum
// contribute exact zeros. If the bound is so slack that even the leading
// term underflows (possible only for tiny sigma), the caller re-runs that
// lane with the now-known exact maximum as the shift.
// ---------------------------------------------------------------------------

inline constexpr int kBatchLanes = 8;
inline constexpr int kMaxK = 24;

template <int L>
struct MlMapLanes {
    std::array<word, static_cast<size_t>(L)> ml_message{};
    std::array<double, static_cast<size_t>(L)> ml_score{};
    std::array<word, static_cast<size_t>(L)> map_bits{};
    std::array<double, static_cast<size_t>(kMaxK) * L> map_acc{};  // value bit p of lane l at [p*L + l]
    std::array<double, static_cast<size_t>(L)> map_total{};
    std::array<double, static_cast<size_t>(L)> map_amax{};  // max alpha*score seen
};

template <int L>
inline void ml_map_decode_lanes(const GrayWalkPlan& plan, const double* r_lanes, bool want_ml,
                                bool want_map, double alpha, MlMapLanes<L>& out,
                                const double* shift_override = nullptr) {
    using V = LaneVec<L>;
    using vd = typename V::vd;
    using vi = typename V::vi;
    using vu = typename V::vu;
    const int k = plan.k;
    const int n = plan.n;
    if (k > kMaxK) throw std::invalid_argument("decode: 2^k enumeration limited to k <= 24");

    const auto load = [](const double* p) {
        vd v;
        __builtin_memcpy(&v, p, sizeof(vd));
        return v;
    };

    vd score = V::splat(0.0);
    vd best = V::splat(-std::numeric_limits<double>::infinity());
    vu best_m = V::splat_u(0);
    vd a_max = V::splat(-std::numeric_limits<double>::infinity());
    vd shift = V::splat(0.0);
    vd total = V::splat(0.0);
    vd acc[kMaxK] = {};

    vd row_sum[kMaxK];
    for (int t = 0; t < k; ++t) {
        vd a = V::splat(0.0);
        for (int q = plan.offsets[static_cast<size_t>(t)];
             q < plan.offsets[static_cast<size_t>(t) + 1]; ++q)
            a = a + load(r_lanes + plan.positions[static_cast<size_t>(q)] * L);
        row_sum[t] = a;
    }

    if (want_map) {
        if (shift_override) {
            for (int l = 0; l < L; ++l) shift[l] = shift_override[l];
        } else {
            vd pos_sum = V::splat(0.0);
            for (int i = 0; i < n; ++i) {
                const vd rv = load(r_lanes + i * L);
                pos_sum = pos_sum + (rv > V::splat(0.0) ? rv : V::splat(0.0));
            }
            shift = alpha * pos_sum;
        }
    }

    word m = 0;
    word c = 0;
    const std::uint64_t count = std::uint64_t{1} << k;
    for (std::uint64_t s = 0; s < count; ++s) {
        if (s != 0) {
            const int p = std::countr_zero(s);
            const int t = k - 1 - p;
            vd masked = V::splat(0.0);
            word u = plan.row_masks[static_cast<size_t>(t)] & c;
            while (u) {
                masked = masked + load(r_lanes + std::countr_zero(u) * L);
                u &= u - 1;
            }
            const vd delta = row_sum[t] - 2.0 * masked;
            c ^= plan.row_masks[static_cast<size_t>(t)];
            m ^= word{1} << p;
            score = score + delta;
        }

        if (want_ml) {
            const vu vm = V::splat_u(m);
            const vi greater = score > best;
            const vi tie_lower = (score == best) & std::bit_cast<vi>(vm < best_m);
            best_m = (greater | tie_lower) ? vm : best_m;
            best = greater ? score : best;
        }
        if (want_map) {
            const vd a = alpha * score;
            a_max = a > a_max ? a : a_max;
            const vi dropped = a < a_max - kLogDropCutoff;
            // Skipping a visit whose terms are all zero leaves every
            // accumulator bitwise unchanged, so the branch cannot perturb
            // results across lane widths.
            if (!all_lanes_set<L>(dropped)) {
                vd e = fast_exp_lanes<L>(a - shift);
                e = dropped ? V::splat(0.0) : e;
                total = total + e;
                word mm = m;
                while (mm) {
                    const int p = std::countr_zero(mm);
                    acc[p] = acc[p] + e;
                    mm &= mm - 1;
                }
            }
        }
    }

    if (want_ml) {
        for (int l = 0; l < L; ++l) {
            out.ml_message[static_cast<size_t>(l)] = best_m[l];
            out.ml_score[static_cast<size_t>(l)] = best[l];
        }
    }
    if (want_map) {
        for (int p = 0; p < k; ++p)
            for (int l = 0; l < L; ++l)
                out.map_acc[static_cast<size_t>(p) * L + static_cast<size_t>(l)] = acc[p][l];
        for (int l = 0; l < L; ++l) {
            out.map_total[static_cast<size_t>(l)] = total[l];
            out.map_amax[static_cast<size_t>(l)] = a_max[l];
            word bits = 0;
            for (int p = 0; p < k; ++p) {
                const double posterior = acc[p][l] / total[l];
                if (posterior > 0.5) bits |= word{1} << p;
            }
            out.map_bits[static_cast<size_t>(l)] = bits;
        }
    }
}

/// Re-decodes lanes whose likelihood total underflowed to zero, anchoring
/// the shift at that lane's exact maximum so the leading term is 1. The
/// per-lane retry rule is identical at every lane width, preserving
/// scalar/batch bit-identity.
template <int L>
inline void retry_underflowed_map_lanes(const GrayWalkPlan& plan, const double* r_lanes,
                                        double alpha, MlMapLanes<L>& out) {
    for (int l = 0; l < L; ++l) {
        if (out.map_total[static_cast<size_t>(l)] != 0.0) continue;
        std::vector<double> r(static_cast<size_t>(plan.n));
        for (int i = 0; i < plan.n; ++i) r[static_cast<size_t>(i)] = r_lanes[i * L + l];
        MlMapLanes<1> redo;
        const double shift = out.map_amax[static_cast<size_t>(l)];
        ml_map_decode_lanes<1>(plan, r.data(), false, true, alpha, redo, &shift);
        out.map_bits[static_cast<size_t>(l)] = redo.map_bits[0];
        out.map_total[static_cast<size_t>(l)] = redo.map_total[0];
        out.map_amax[static_cast<size_t>(l)] = redo.map_amax[0];
        for (int p = 0; p < plan.k; ++p)
            out.map_acc[static_cast<size_t>(p) * L + static_cast<size_t>(l)] =
                redo.map_acc[static_cast<size_t>(p)];
    }
}

// ---------------------------------------------------------------------------
// Codeword-wise maximum likelihood: argmax_j sum_i r_i c_i^(j), walked in
// Gray-code order with O(row weight) score updates; ties go to the lowest
// codebook index.
// ---------------------------------------------------------------------------

inline DecodeOutcome ml_decode(const CodewordStream& stream, std::span<const double> r) {
    if (static_cast<int>(r.size()) != stream.code.n)
        throw std::invalid_argument("ml_decode: received vector length != n");
    const GrayWalkPlan plan(stream.code);
    MlMapLanes<1> lanes;
    ml_map_decode_lanes<1>(plan, r.data(), true, false, 1.0, lanes);

    DecodeOutcome out;
    out.message = lanes.ml_message[0];
    out.codeword = stream.code.encode_value(out.message);
    out.metric = lanes.ml_score[0];
    return out;
}

// ---------------------------------------------------------------------------
// Bit-wise MAP: decision rule of the multi-label network, evaluated in the
// log domain. Posterior ties at exactly 1/2 give bit 0.
// ---------------------------------------------------------------------------

inline DecodeOutcome map_decode_with_alpha(const CodewordStream& stream,
                                           std::span<const double> r, double alpha) {
    const int k = stream.code.k;
    if (static_cast<int>(r.size()) != stream.code.n)
        throw std::invalid_argument("map_decode: received vector length != n");
    if (!(alpha > 0.0)) throw std::invalid_argument("map_decode: alpha must be positive");
    const GrayWalkPlan plan(stream.code);
    MlMapLanes<1> lanes;
    ml_map_decode_lanes<1>(plan, r.data(), false, true, alpha, lanes);
    retry_underflowed_map_lanes<1>(plan, r.data(), alpha, lanes);

    DecodeOutcome out;
    out.message = lanes.map_bits[0];
    out.codeword = stream.code.encode_value(out.message);
    out.posteriors.resize(static_cast<size_t>(k));
    double min_margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= k; ++i) {
        const int p = k - i;  // information bit i lives at value bit k - i
        const double posterior = lanes.map_acc[static_cast<size_t>(p)] / lanes.map_total[0];
        out.posteriors[static_cast<size_t>(i - 1)] = posterior;
        min_margin = std::min(min_margin, std::abs(posterior - 0.5));
    }
    out.metric = min_margin;
    return out;
}

inline DecodeOutcome map_decode(const CodewordStream& stream, std::span<const double> r,
                                double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("map_decode: sigma must be positive");
    return map_decode_with_alpha(stream, r, 2.0 / (sigma * sigma));
}

// ---------------------------------------------------------------------------
// Brute-force oracles (verification only, k <= 12). Both evaluate the full
// Gaussian likelihood p(r|s) = prod_i exp(-(r_i - s_i)^2 / (2 sigma^2)) /
// sqrt(2 pi sigma^2) with no algebraic simplification.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_oracle_scale(const CodewordStream& stream, std::span<const double> r,
                               double sigma) {
    if (stream.code.k > 12)
        throw std::invalid_argument("oracle decoders are limited to k <= 12");
    if (static_cast<int>(r.size()) != stream.code.n)
        throw std::invalid_argument("oracle: received vector length != n");
    if (!(sigma > 0.0)) throw std::invalid_argument("oracle: sigma must be positive");
}

inline double gaussian_likelihood(const CodewordStream& stream, std::uint64_t index,
                                  std::span<const double> r, double sigma) {
    const word c = stream.codeword(index);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    double likelihood = 1.0;
    for (size_t i = 0; i < r.size(); ++i) {
        const double s = ((c >> i) & 1) ? 1.0 : -1.0;
        const double d = r[i] - s;
        likelihood *= norm * std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    return likelihood;
}

}  // namespace detail

inline DecodeOutcome oracle_ml(const CodewordStream& stream, std::span<const double> r,
                               double sigma) {
    detail::check_oracle_scale(stream, r, sigma);
    double best = -1.0;
    std::uint64_t best_j = 1;
    for (std::uint64_t j = 1; j <= stream.count(); ++j) {
        const double likelihood = detail::gaussian_likelihood(stream, j, r, sigma);
        if (likelihood > best) {
            best = likelihood;
            best_j = j;
        }
    }
    DecodeOutcome out;
    out.message = stream.message_value(best_j);
    out.codeword = stream.codeword(best_j);
    out.metric = best;
    return out;
}

inline word oracle_map(const CodewordStream& stream, std::span<const double> r, double sigma) {
    detail::check_oracle_scale(stream, r, sigma);
    const int k = stream.code.k;
    std::array<double, 12> ones{};
    std::array<double, 12> zeros{};
    for (std::uint64_t j = 1; j <= stream.count(); ++j) {
        const double likelihood = detail::gaussian_likelihood(stream, j, r, sigma);
        const word m = stream.message_value(j);
        for (int p = 0; p < k; ++p) {
            if ((m >> p) & 1)
                ones[static_cast<size_t>(p)] += likelihood;
            else
                zeros[static_cast<size_t>(p)] += likelihood;
        }
    }
    word bits = 0;
    for (int p = 0; p < k; ++p)
        if (ones[static_cast<size_t>(p)] > zeros[static_cast<size_t>(p)]) bits |= word{1} << p;
    return bits;
}

// ---------------------------------------------------------------------------
// Bounded distance decoding on hard decisions.
// ---------------------------------------------------------------------------

class BddDecoder {
  public:
    enum class Strategy { SyndromeTable, CodebookSearch };

    /// Radius defaults to floor((dmin - 1) / 2) with dmin found by codebook
    /// scan. The default strategy is a syndrome lookup table; passing
    /// CodebookSearch scans the codebook for a codeword within the radius
    /// instead (preferable when no compact table structure is wanted).
    explicit BddDecoder(GeneratorMatrix g, int radius = -1,
                        std::optional<Strategy> strategy = std::nullopt)
        : code_(std::move(g)), recovery_(make_recovery(code_)) {
        radius_ = radius >= 0 ? radius : (code_stats(code_).min_distance - 1) / 2;
        strategy_ = strategy.value_or(Strategy::SyndromeTable);
        if (strategy_ == Strategy::SyndromeTable) build_table();
    }

    const GeneratorMatrix& code() const { return code_; }
    int radius() const { return radius_; }
    Strategy strategy() const { return strategy_; }

    DecodeOutcome decode(word hard_bits) const {
        std::optional<word> corrected;
        if (strategy_ == Strategy::SyndromeTable) {
            const word syn = syndrome(hard_bits);
            if (has_entry_[static_cast<size_t>(syn)])
                corrected = hard_bits ^ table_[static_cast<size_t>(syn)];
        } else {
            word c = 0;
            const std::uint64_t total = std::uint64_t{1} << code_.k;
            if (popcount(c ^ hard_bits) <= radius_) corrected = c;
            for (std::uint64_t s = 1; s < total && !corrected; ++s) {
                c ^= code_.rows[static_cast<size_t>(code_.k - 1 - std::countr_zero(s))];
                if (popcount(c ^ hard_bits) <= radius_) corrected = c;
            }
        }

        DecodeOutcome out;
        if (corrected) {
            out.codeword = *corrected;
            out.message = recovery_.recover(*corrected);
            out.metric = static_cast<double>(popcount(*corrected ^ hard_bits));
        } else {
            // Decoding failure: no codeword within the radius. Score bit
            // errors against the linear projection of the hard decisions.
            out.bdd_failure = true;
            out.codeword = hard_bits;
            out.message = recovery_.recover(hard_bits);
            out.metric = static_cast<double>(radius_ + 1);
        }
        return out;
    }

  private:
    word syndrome(word v) const {
        word s = 0;
        for (size_t i = 0; i < parity_rows_.size(); ++i)
            s |= static_cast<word>(popcount(parity_rows_[i] & v) & 1) << i;
        return s;
    }

    void build_table() {
        parity_rows_ = gf2::null_space(code_.rows, code_.n);
        const size_t syndromes = size_t{1} << parity_rows_.size();
        table_.assign(syndromes, 0);
        has_entry_.assign(syndromes, false);
        add_patterns(0, 0, radius_);
    }

    void add_patterns(word pattern, int next_pos, int remaining) {
        const word syn = syndrome(pattern);
        if (has_entry_[static_cast<size_t>(syn)] && table_[static_cast<size_t>(syn)] != pattern)
            throw std::logic_error("BDD radius exceeds the code's packing radius");
        has_entry_[static_cast<size_t>(syn)] = true;
        table_[static_cast<size_t>(syn)] = pattern;
        if (remaining == 0) return;
        for (int p = next_pos; p < code_.n; ++p)
            add_patterns(pattern | (word{1} << p), p + 1, remaining - 1);
    }

    GeneratorMatrix code_;
    MessageRecovery recovery_;
    int radius_ = 0;
    Strategy strategy_ = Strategy::SyndromeTable;
    std::vector<word> parity_rows_;
    std::vector<word> table_;
    std::vector<bool> has_entry_;
};

/// Strategy used by the simulation harness: table-driven except for codes
/// built from a frozen-bit construction, which are searched directly.
inline BddDecoder::Strategy default_bdd_strategy(const GeneratorMatrix& g) {
    return g.frozen_bits.empty() ? BddDecoder::Strategy::SyndromeTable
                                 : BddDecoder::Strategy::CodebookSearch;
}

inline DecodeOutcome bdd_decode(const GeneratorMatrix& g, word hard_bits, int radius = -1) {
    return BddDecoder(g, radius, default_bdd_strategy(g)).decode(hard_bits);
}

}  // namespace mlfec
