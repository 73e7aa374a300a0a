#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlfec/bits.hpp"
#include "mlfec/rng.hpp"

namespace mlfec {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Noise level for a given Eb/N0 in dB at unit symbol energy:
/// sigma = sqrt(1 / (2 R 10^(dB/10))).
inline double ebn0_to_sigma(double ebn0_db, double rate) {
    if (!(rate > 0.0) || rate > 1.0)
        throw std::invalid_argument("ebn0_to_sigma: rate must be in (0, 1]");
    return std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0)));
}

inline double sigma_to_ebn0(double sigma, double rate) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma_to_ebn0: sigma must be positive");
    if (!(rate > 0.0) || rate > 1.0)
        throw std::invalid_argument("sigma_to_ebn0: rate must be in (0, 1]");
    return 10.0 * std::log10(1.0 / (2.0 * rate * sigma * sigma));
}

struct ChannelParams {
    double ebn0_db = 0.0;
    double rate = 0.5;
    double sigma = 1.0;

    static ChannelParams from_ebn0(double ebn0_db, double rate) {
        ChannelParams p;
        p.ebn0_db = ebn0_db;
        p.rate = rate;
        p.sigma = ebn0_to_sigma(ebn0_db, rate);
        return p;
    }
};

struct ReceivedVector {
    std::vector<double> r;
    ChannelParams params;
};

/// BPSK map s_i = 2 c_i - 1 for the first n coordinates of a packed word.
inline void bpsk_map(word c, int n, double* s) {
    for (int i = 0; i < n; ++i) s[i] = ((c >> i) & 1) ? 1.0 : -1.0;
}

inline std::vector<double> bpsk_map(word c, int n) {
    std::vector<double> s(static_cast<size_t>(n));
    bpsk_map(c, n, s.data());
    return s;
}

/// r_i = s_i + w_i with w_i ~ N(0, sigma^2) drawn from the given stream.
inline void add_noise(std::span<const double> s, double sigma, rng::Stream& stream, double* r) {
    if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be nonnegative");
    for (size_t i = 0; i < s.size(); ++i) r[i] = s[i] + sigma * stream.next_gaussian();
}

inline ReceivedVector transmit(std::span<const double> s, const ChannelParams& params,
                               rng::Stream& stream) {
    ReceivedVector rv;
    rv.params = params;
    rv.r.resize(s.size());
    add_noise(s, params.sigma, stream, rv.r.data());
    return rv;
}

/// Per-coordinate sign decision; an exact 0 maps to bit 0.
inline word hard_decision(std::span<const double> r) {
    word c = 0;
    for (size_t i = 0; i < r.size(); ++i)
        if (r[i] > 0.0) c |= word{1} << i;
    return c;
}

struct PreFecRates {
    double ber = 0.0;
    double fer = 0.0;
};

/// Raw-channel error rates before decoding: bit error probability Q(1/sigma)
/// and the n-bit frame error probability 1 - (1 - p)^n, evaluated as
/// -expm1(n log1p(-p)) to stay accurate when p is small.
inline PreFecRates prefec_rates(double sigma, int n) {
    if (!(sigma > 0.0)) throw std::invalid_argument("prefec_rates: sigma must be positive");
    PreFecRates out;
    out.ber = q_function(1.0 / sigma);
    out.fer = n == 1 ? out.ber : -std::expm1(static_cast<double>(n) * std::log1p(-out.ber));
    return out;
}

}  // namespace mlfec
