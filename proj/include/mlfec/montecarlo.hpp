#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mlfec/channel.hpp"
#include "mlfec/codes.hpp"
#include "mlfec/decoders.hpp"
#include "mlfec/network.hpp"
#include "mlfec/rng.hpp"

namespace mlfec {

enum class DecoderKind { Ml, Map, Bdd };

inline std::string decoder_name(DecoderKind d) {
    switch (d) {
        case DecoderKind::Ml: return "ml";
        case DecoderKind::Map: return "map";
        case DecoderKind::Bdd: return "bdd";
    }
    return "?";
}

inline DecoderKind parse_decoder(const std::string& s) {
    if (s == "ml") return DecoderKind::Ml;
    if (s == "map") return DecoderKind::Map;
    if (s == "bdd") return DecoderKind::Bdd;
    throw std::invalid_argument("unknown decoder '" + s + "' (expected ml, map or bdd)");
}

struct StopRule {
    std::uint64_t min_frame_errors = 100;
    std::uint64_t max_frames = 10'000'000;
};

struct AlphaSpec {
    AlphaMode mode = AlphaMode::Matched;
    double fixed_ebn0_db = 0.0;  // the Eb/N0 whose matched alpha gets frozen
};

struct SimConfig {
    std::string code_id = "hamming74";
    std::vector<DecoderKind> decoders = {DecoderKind::Ml};
    double ebn0_start = 0.0;
    double ebn0_step = 1.0;
    double ebn0_stop = 0.0;
    StopRule stop;
    std::uint64_t master_seed = 1;
    AlphaSpec alpha;
    int workers = 0;  // <= 0 selects std::thread::hardware_concurrency()

    void validate() const {
        if (ebn0_stop < ebn0_start) throw std::invalid_argument("ebn0 grid: stop < start");
        if (ebn0_stop != ebn0_start && !(ebn0_step > 0.0))
            throw std::invalid_argument("ebn0 grid: step must be positive");
        if (stop.min_frame_errors < 1)
            throw std::invalid_argument("stop rule: min_frame_errors must be >= 1");
        if (stop.max_frames < stop.min_frame_errors)
            throw std::invalid_argument("stop rule: max_frames must be >= min_frame_errors");
    }

    std::vector<double> grid() const {
        validate();
        if (ebn0_stop == ebn0_start) return {ebn0_start};
        std::vector<double> points;
        const auto steps =
            static_cast<std::uint64_t>(std::floor((ebn0_stop - ebn0_start) / ebn0_step + 1e-9));
        for (std::uint64_t i = 0; i <= steps; ++i)
            points.push_back(ebn0_start + static_cast<double>(i) * ebn0_step);
        return points;
    }
};

/// One measurement: (code, decoder, Eb/N0) with its error counts.
struct SimRecord {
    std::string code;
    std::string decoder;
    double ebn0_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    double fer = 0.0;
    double ber = 0.0;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Wilson score interval
// ---------------------------------------------------------------------------

namespace detail {

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9).
inline double probit(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("probit: p must be in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

inline std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials,
                                                 double confidence) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (errors > trials) throw std::invalid_argument("wilson_interval: errors > trials");
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw std::invalid_argument("wilson_interval: confidence must be in (0, 1)");
    const double z = detail::probit(0.5 + confidence / 2.0);
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / nt;
    const double z2n = z * z / nt;
    const double denom = 1.0 + z2n;
    const double center = (p + z2n / 2.0) / denom;
    const double hw = z * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt)) / denom;
    return {std::max(0.0, center - hw), std::min(1.0, center + hw)};
}

/// Half-width of the Wilson interval, as a shorthand for tolerance checks.
inline double wilson_half_width(std::uint64_t errors, std::uint64_t trials, double confidence) {
    const auto [lo, hi] = wilson_interval(errors, trials, confidence);
    return (hi - lo) / 2.0;
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

namespace detail {

/// Frames are processed in fixed-size batches; the stop rule is evaluated
/// at batch boundaries only, which makes the processed frame count a pure
/// function of the configuration (never of worker count or timing).
inline constexpr std::uint64_t kBatchFrames = 4096;

struct DecoderTallies {
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;

    void operator+=(const DecoderTallies& o) {
        frame_errors += o.frame_errors;
        bit_errors += o.bit_errors;
    }
};

struct SimContext {
    GeneratorMatrix code;
    GrayWalkPlan plan;
    std::optional<BddDecoder> bdd;
    bool want_ml = false;
    bool want_map = false;
    bool want_bdd = false;

    explicit SimContext(const SimConfig& cfg) : code(make_code(cfg.code_id)), plan(code) {
        for (DecoderKind d : cfg.decoders) {
            if (d == DecoderKind::Ml) want_ml = true;
            if (d == DecoderKind::Map) want_map = true;
            if (d == DecoderKind::Bdd) want_bdd = true;
        }
        if (want_bdd) bdd.emplace(code, -1, default_bdd_strategy(code));
    }
};

/// Decodes frames [first, last) of one SNR point and accumulates error
/// counts. Pure function of (point_seed, frame index range); safe to call
/// concurrently on disjoint ranges.
inline void process_frames(const SimContext& ctx, std::uint64_t point_seed, double sigma,
                           double alpha, std::uint64_t first, std::uint64_t last,
                           DecoderTallies& ml, DecoderTallies& map, DecoderTallies& bdd) {
    constexpr int L = kBatchLanes;
    const int n = ctx.code.n;
    const int k = ctx.code.k;

    std::vector<double> r_lanes(static_cast<size_t>(n) * L);
    std::vector<double> symbols(static_cast<size_t>(n));
    word messages[L];
    MlMapLanes<L> lanes;

    for (std::uint64_t base = first; base < last; base += L) {
        const int active = static_cast<int>(std::min<std::uint64_t>(L, last - base));
        for (int l = 0; l < L; ++l) {
            if (l >= active) {
                messages[l] = 0;
                for (int i = 0; i < n; ++i) r_lanes[static_cast<size_t>(i) * L + static_cast<size_t>(l)] = 0.0;
                continue;
            }
            rng::Stream stream(rng::derive(point_seed, base + static_cast<std::uint64_t>(l)));
            const word m = stream.next_bits(k);
            messages[l] = m;
            bpsk_map(ctx.code.encode_value(m), n, symbols.data());
            for (int i = 0; i < n; ++i)
                r_lanes[static_cast<size_t>(i) * L + static_cast<size_t>(l)] =
                    symbols[static_cast<size_t>(i)] + sigma * stream.next_gaussian();
        }

        if (ctx.want_ml || ctx.want_map) {
            ml_map_decode_lanes<L>(ctx.plan, r_lanes.data(), ctx.want_ml, ctx.want_map, alpha,
                                   lanes);
            if (ctx.want_map) retry_underflowed_map_lanes<L>(ctx.plan, r_lanes.data(), alpha, lanes);
        }

        for (int l = 0; l < active; ++l) {
            const word truth = messages[l];
            if (ctx.want_ml) {
                ml.bit_errors += static_cast<std::uint64_t>(popcount(lanes.ml_message[static_cast<size_t>(l)] ^ truth));
                ml.frame_errors += lanes.ml_message[static_cast<size_t>(l)] != truth;
            }
            if (ctx.want_map) {
                map.bit_errors += static_cast<std::uint64_t>(popcount(lanes.map_bits[static_cast<size_t>(l)] ^ truth));
                map.frame_errors += lanes.map_bits[static_cast<size_t>(l)] != truth;
            }
            if (ctx.want_bdd) {
                word hard = 0;
                for (int i = 0; i < n; ++i)
                    if (r_lanes[static_cast<size_t>(i) * L + static_cast<size_t>(l)] > 0.0)
                        hard |= word{1} << i;
                const DecodeOutcome out = ctx.bdd->decode(hard);
                bdd.bit_errors += static_cast<std::uint64_t>(popcount(out.message ^ truth));
                bdd.frame_errors += out.bdd_failure || out.message != truth;
            }
        }
    }
}

inline std::vector<SimRecord> run_point_impl(const SimConfig& cfg, const SimContext& ctx,
                                             std::uint64_t snr_index, double ebn0_db) {
    const auto start_time = std::chrono::steady_clock::now();
    const double sigma = ebn0_to_sigma(ebn0_db, ctx.code.rate());
    const double alpha_sigma =
        cfg.alpha.mode == AlphaMode::Matched
            ? sigma
            : ebn0_to_sigma(cfg.alpha.fixed_ebn0_db, ctx.code.rate());
    const double alpha = 2.0 / (alpha_sigma * alpha_sigma);
    const std::uint64_t point_seed = rng::derive(cfg.master_seed, snr_index);

    int workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    DecoderTallies ml, map, bdd;
    std::uint64_t frames = 0;
    while (frames < cfg.stop.max_frames) {
        const std::uint64_t batch = std::min(kBatchFrames, cfg.stop.max_frames - frames);
        const std::uint64_t first = frames;
        const std::uint64_t last = frames + batch;

        if (workers == 1 || batch < 2 * kBatchLanes) {
            process_frames(ctx, point_seed, sigma, alpha, first, last, ml, map, bdd);
        } else {
            const int nw = std::min<int>(workers, static_cast<int>(batch / kBatchLanes));
            std::vector<DecoderTallies> wml(static_cast<size_t>(nw)), wmap(static_cast<size_t>(nw)),
                wbdd(static_cast<size_t>(nw));
            std::vector<std::thread> pool;
            const std::uint64_t chunk = (batch + static_cast<std::uint64_t>(nw) - 1) / static_cast<std::uint64_t>(nw);
            for (int w = 0; w < nw; ++w) {
                const std::uint64_t lo = first + static_cast<std::uint64_t>(w) * chunk;
                const std::uint64_t hi = std::min(last, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, w, lo, hi] {
                    process_frames(ctx, point_seed, sigma, alpha, lo, hi, wml[static_cast<size_t>(w)],
                                   wmap[static_cast<size_t>(w)], wbdd[static_cast<size_t>(w)]);
                });
            }
            for (auto& t : pool) t.join();
            for (int w = 0; w < nw; ++w) {
                ml += wml[static_cast<size_t>(w)];
                map += wmap[static_cast<size_t>(w)];
                bdd += wbdd[static_cast<size_t>(w)];
            }
        }
        frames = last;

        bool all_done = true;
        for (DecoderKind d : cfg.decoders) {
            const DecoderTallies& t =
                d == DecoderKind::Ml ? ml : (d == DecoderKind::Map ? map : bdd);
            if (t.frame_errors < cfg.stop.min_frame_errors) all_done = false;
        }
        if (all_done && !cfg.decoders.empty()) break;
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();

    std::vector<SimRecord> records;
    for (DecoderKind d : cfg.decoders) {
        const DecoderTallies& t = d == DecoderKind::Ml ? ml : (d == DecoderKind::Map ? map : bdd);
        SimRecord rec;
        rec.code = ctx.code.name;
        rec.decoder = decoder_name(d);
        rec.ebn0_db = ebn0_db;
        rec.frames = frames;
        rec.frame_errors = t.frame_errors;
        rec.bit_errors = t.bit_errors;
        rec.fer = static_cast<double>(t.frame_errors) / static_cast<double>(frames);
        rec.ber = static_cast<double>(t.bit_errors) /
                  (static_cast<double>(frames) * static_cast<double>(ctx.code.k));
        rec.seed = cfg.master_seed;
        rec.elapsed_seconds = elapsed;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace detail

/// Runs one grid point. Every decoder in the set sees the same received
/// vectors (paired noise); frames stop once all decoders have accumulated
/// min_frame_errors, or at max_frames.
inline std::vector<SimRecord> run_point(const SimConfig& cfg, double ebn0_db) {
    cfg.validate();
    const auto grid = cfg.grid();
    std::uint64_t snr_index = 0;
    bool found = false;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i] - ebn0_db) < 1e-9) {
            snr_index = i;
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("run_point: ebn0_db is not on the configured grid");
    detail::SimContext ctx(cfg);
    return detail::run_point_impl(cfg, ctx, snr_index, ebn0_db);
}

/// Runs the whole grid; on_point (if given) observes each point's records
/// as they complete, in grid order. Returned records are sorted by
/// (decoder, ebn0).
inline std::vector<SimRecord> run_sweep(
    const SimConfig& cfg,
    const std::function<void(const std::vector<SimRecord>&)>& on_point = nullptr) {
    cfg.validate();
    detail::SimContext ctx(cfg);
    std::vector<SimRecord> all;
    const auto grid = cfg.grid();
    for (size_t i = 0; i < grid.size(); ++i) {
        if (cfg.decoders.empty()) break;
        auto records = detail::run_point_impl(cfg, ctx, i, grid[i]);
        if (on_point) on_point(records);
        for (auto& r : records) all.push_back(std::move(r));
    }
    std::sort(all.begin(), all.end(), [](const SimRecord& a, const SimRecord& b) {
        if (a.decoder != b.decoder) return a.decoder < b.decoder;
        return a.ebn0_db < b.ebn0_db;
    });
    return all;
}

}  // namespace mlfec
