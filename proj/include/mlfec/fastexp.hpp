#pragma once

#include <bit>
#include <cstdint>

namespace mlfec {

/// Deterministic exp for log-domain accumulation. Valid for x <= 709;
/// arguments below -708 return exactly 0 (the true value is < 3.1e-308,
/// negligible for any sum this library feeds it into). Relative error is a
/// few ulp.
///
/// fast_exp and fast_exp_lanes must stay operation-for-operation in
/// lockstep: together with -ffp-contract=off they guarantee that a value
/// decoded in a SIMD lane equals the scalar result bit for bit.
inline double fast_exp(double x) {
    constexpr double kLog2e = 1.4426950408889634074;
    constexpr double kLn2Hi = 6.93147180369123816490e-01;
    constexpr double kLn2Lo = 1.90821492927058770002e-10;
    constexpr double kRound = 6755399441055744.0;  // 1.5 * 2^52

    // Clamp keeps the exponent arithmetic below well-defined; the final
    // select still returns 0 for anything under -708.
    double xc = x < -746.0 ? -746.0 : x;
    xc = xc > 710.0 ? 710.0 : xc;
    const double kd = (xc * kLog2e + kRound) - kRound;  // round to nearest integer
    const auto ki = static_cast<std::int64_t>(kd);
    double f = xc - kd * kLn2Hi;
    f = f - kd * kLn2Lo;

    // e^f on |f| <= (ln 2)/2 via the Taylor series through f^12/12!.
    double p = 2.08767569878681e-9;
    p = p * f + 2.505210838544172e-8;
    p = p * f + 2.755731922398589e-7;
    p = p * f + 2.755731922398589e-6;
    p = p * f + 2.48015873015873e-5;
    p = p * f + 1.984126984126984e-4;
    p = p * f + 1.388888888888889e-3;
    p = p * f + 8.333333333333333e-3;
    p = p * f + 4.1666666666666664e-2;
    p = p * f + 1.6666666666666666e-1;
    p = p * f + 0.5;
    p = p * f + 1.0;
    p = p * f + 1.0;

    const double scaled =
        std::bit_cast<double>(std::bit_cast<std::int64_t>(p) + (ki << 52));
    return x < -708.0 ? 0.0 : scaled;
}

#if defined(__GNUC__) || defined(__clang__)

// vector_size must be a non-dependent constant, hence one specialization
// per supported lane count.
template <int L>
struct LaneVec;

#define MLFEC_DEFINE_LANE_VEC(L)                                               \
    template <>                                                                \
    struct LaneVec<L> {                                                        \
        typedef double vd __attribute__((vector_size(8 * (L))));               \
        typedef std::int64_t vi __attribute__((vector_size(8 * (L))));         \
        typedef std::uint64_t vu __attribute__((vector_size(8 * (L))));        \
        static vd splat(double x) {                                            \
            vd v;                                                              \
            for (int l = 0; l < (L); ++l) v[l] = x;                            \
            return v;                                                          \
        }                                                                      \
        static vu splat_u(std::uint64_t x) {                                   \
            vu v;                                                              \
            for (int l = 0; l < (L); ++l) v[l] = x;                            \
            return v;                                                          \
        }                                                                      \
    };

MLFEC_DEFINE_LANE_VEC(1)
MLFEC_DEFINE_LANE_VEC(2)
MLFEC_DEFINE_LANE_VEC(4)
MLFEC_DEFINE_LANE_VEC(8)
#undef MLFEC_DEFINE_LANE_VEC

/// True when every lane of a comparison mask is set.
template <int L>
inline bool all_lanes_set(typename LaneVec<L>::vi mask) {
    std::int64_t folded = mask[0];
    for (int l = 1; l < L; ++l) folded &= mask[l];
    return folded != 0;
}

/// Element-wise twin of fast_exp; see the lockstep note above.
template <int L>
inline typename LaneVec<L>::vd fast_exp_lanes(typename LaneVec<L>::vd x) {
    using V = LaneVec<L>;
    using vd = typename V::vd;
    using vi = typename V::vi;

    vd xc = x < V::splat(-746.0) ? V::splat(-746.0) : x;
    xc = xc > V::splat(710.0) ? V::splat(710.0) : xc;
    const vd kd = (xc * 1.4426950408889634074 + 6755399441055744.0) - 6755399441055744.0;
    const vi ki = __builtin_convertvector(kd, vi);
    vd f = xc - kd * 6.93147180369123816490e-01;
    f = f - kd * 1.90821492927058770002e-10;

    vd p = V::splat(2.08767569878681e-9);
    p = p * f + 2.505210838544172e-8;
    p = p * f + 2.755731922398589e-7;
    p = p * f + 2.755731922398589e-6;
    p = p * f + 2.48015873015873e-5;
    p = p * f + 1.984126984126984e-4;
    p = p * f + 1.388888888888889e-3;
    p = p * f + 8.333333333333333e-3;
    p = p * f + 4.1666666666666664e-2;
    p = p * f + 1.6666666666666666e-1;
    p = p * f + 0.5;
    p = p * f + 1.0;
    p = p * f + 1.0;

    const vd scaled = std::bit_cast<vd>(std::bit_cast<vi>(p) + (ki << 52));
    return x < V::splat(-708.0) ? V::splat(0.0) : scaled;
}

#endif  // __GNUC__ || __clang__

}  // namespace mlfec
