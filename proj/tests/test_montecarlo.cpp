#include "mlfec/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mlfec;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.code_id = "hamming74";
    cfg.decoders = {DecoderKind::Ml, DecoderKind::Map, DecoderKind::Bdd};
    cfg.ebn0_start = 0.0;
    cfg.ebn0_step = 2.0;
    cfg.ebn0_stop = 6.0;
    cfg.stop.min_frame_errors = 100;
    cfg.stop.max_frames = 200'000;
    cfg.master_seed = 11;
    return cfg;
}

}  // namespace

TEST(Wilson, ZeroErrorsPinLowerBoundAtZero) {
    const auto [lo, hi] = wilson_interval(0, 100, 0.95);
    EXPECT_EQ(lo, 0.0);
    EXPECT_GT(hi, 0.0);
}

TEST(Wilson, SymmetricAtHalf) {
    const auto [lo, hi] = wilson_interval(50, 100, 0.95);
    EXPECT_NEAR(lo + hi, 1.0, 1e-12);
    EXPECT_NEAR(lo, 0.4038315303659956, 1e-9);
    EXPECT_NEAR(hi, 0.5961684696340044, 1e-9);
}

TEST(Wilson, ClosedFormReferencePoint) {
    const auto [lo, hi] = wilson_interval(100, 1'000'000, 0.95);
    EXPECT_NEAR(lo, 8.22278598932588e-05, 1e-12);
    EXPECT_NEAR(hi, 1.2161281588187336e-04, 1e-12);
}

TEST(Wilson, InputValidation) {
    EXPECT_THROW(wilson_interval(1, 0, 0.95), std::invalid_argument);
    EXPECT_THROW(wilson_interval(5, 4, 0.95), std::invalid_argument);
    EXPECT_THROW(wilson_interval(1, 10, 1.0), std::invalid_argument);
}

TEST(SimConfig, GridConstruction) {
    SimConfig cfg = base_config();
    EXPECT_EQ(cfg.grid(), (std::vector<double>{0.0, 2.0, 4.0, 6.0}));
    cfg.ebn0_start = cfg.ebn0_stop = 3.0;
    EXPECT_EQ(cfg.grid(), (std::vector<double>{3.0}));  // zero-range grid: one point
    cfg.ebn0_stop = 2.0;
    EXPECT_THROW(cfg.grid(), std::invalid_argument);
    cfg.ebn0_stop = 4.0;
    cfg.ebn0_step = 0.0;
    EXPECT_THROW(cfg.grid(), std::invalid_argument);
    cfg.ebn0_step = 1.0;
    cfg.stop.min_frame_errors = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.stop.min_frame_errors = 10;
    cfg.stop.max_frames = 5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RunPoint, NoiselessPointHasNoErrors) {
    SimConfig cfg = base_config();
    cfg.ebn0_start = cfg.ebn0_stop = 60.0;  // sigma ~ 2e-4: error-free at this scale
    cfg.stop.min_frame_errors = 1;
    cfg.stop.max_frames = 20'000;
    const auto records = run_point(cfg, 60.0);
    ASSERT_EQ(records.size(), 3u);
    for (const SimRecord& rec : records) {
        EXPECT_EQ(rec.frames, 20'000u);
        EXPECT_EQ(rec.frame_errors, 0u);
        EXPECT_EQ(rec.bit_errors, 0u);
        EXPECT_EQ(rec.fer, 0.0);
        EXPECT_EQ(rec.ber, 0.0);
    }
}

TEST(RunPoint, RequiresGridMembership) {
    const SimConfig cfg = base_config();
    EXPECT_THROW(run_point(cfg, 1.0), std::invalid_argument);
}

TEST(RunPoint, BitwiseBerReferenceAtFourDb) {
    SimConfig cfg = base_config();
    cfg.decoders = {DecoderKind::Map};
    cfg.ebn0_start = cfg.ebn0_stop = 4.0;
    cfg.stop.min_frame_errors = 1'000'000;  // run out the frame budget
    cfg.stop.max_frames = 1'000'000;
    cfg.master_seed = 5;
    const auto records = run_point(cfg, 4.0);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_GE(records[0].frames, 1'000'000u);
    EXPECT_GT(records[0].ber, 0.0047);
    EXPECT_LT(records[0].ber, 0.0057);
}

TEST(RunPoint, RecordInvariants) {
    SimConfig cfg = base_config();
    cfg.ebn0_start = cfg.ebn0_stop = 2.0;
    cfg.stop.min_frame_errors = 200;
    cfg.stop.max_frames = 100'000;
    for (const SimRecord& rec : run_point(cfg, 2.0)) {
        EXPECT_LE(rec.frame_errors, rec.frames);
        EXPECT_LE(rec.bit_errors, rec.frame_errors * 4);
        EXPECT_DOUBLE_EQ(rec.fer, double(rec.frame_errors) / double(rec.frames));
        EXPECT_DOUBLE_EQ(rec.ber, double(rec.bit_errors) / (double(rec.frames) * 4));
        EXPECT_TRUE(rec.frame_errors >= 200 || rec.frames == 100'000);
        EXPECT_EQ(rec.seed, cfg.master_seed);
    }
}

TEST(RunPoint, DeterministicAcrossWorkerCounts) {
    SimConfig cfg = base_config();
    cfg.ebn0_start = cfg.ebn0_stop = 3.0;
    cfg.stop.min_frame_errors = 150;
    cfg.stop.max_frames = 60'000;

    cfg.workers = 1;
    const auto a = run_point(cfg, 3.0);
    cfg.workers = 3;
    const auto b = run_point(cfg, 3.0);
    cfg.workers = 1;
    const auto c = run_point(cfg, 3.0);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].frames, b[i].frames);
        EXPECT_EQ(a[i].frame_errors, b[i].frame_errors);
        EXPECT_EQ(a[i].bit_errors, b[i].bit_errors);
        EXPECT_EQ(a[i].frame_errors, c[i].frame_errors);
        EXPECT_EQ(a[i].bit_errors, c[i].bit_errors);
    }
}

TEST(RunSweep, EmptyDecoderSetGivesEmptyOutput) {
    SimConfig cfg = base_config();
    cfg.decoders.clear();
    EXPECT_TRUE(run_sweep(cfg).empty());
}

TEST(RunSweep, SortedAndRerunnable) {
    SimConfig cfg = base_config();
    cfg.stop.min_frame_errors = 50;
    cfg.stop.max_frames = 30'000;

    int points_seen = 0;
    const auto records = run_sweep(cfg, [&](const std::vector<SimRecord>& point) {
        ++points_seen;
        ASSERT_EQ(point.size(), 3u);
    });
    EXPECT_EQ(points_seen, 4);
    ASSERT_EQ(records.size(), 12u);
    for (size_t i = 1; i < records.size(); ++i) {
        const bool ordered = records[i - 1].decoder < records[i].decoder ||
                             (records[i - 1].decoder == records[i].decoder &&
                              records[i - 1].ebn0_db < records[i].ebn0_db);
        EXPECT_TRUE(ordered) << "records must sort by (decoder, ebn0)";
    }

    const auto rerun = run_sweep(cfg);
    ASSERT_EQ(rerun.size(), records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(records[i].frames, rerun[i].frames);
        EXPECT_EQ(records[i].frame_errors, rerun[i].frame_errors);
        EXPECT_EQ(records[i].bit_errors, rerun[i].bit_errors);
    }
}

TEST(RunSweep, PairedNoiseDominanceOnHamming) {
    SimConfig cfg = base_config();
    cfg.stop.min_frame_errors = 300;
    cfg.stop.max_frames = 400'000;
    const auto records = run_sweep(cfg);

    auto find = [&](const std::string& dec, double db) -> const SimRecord& {
        for (const auto& rec : records)
            if (rec.decoder == dec && rec.ebn0_db == db) return rec;
        throw std::logic_error("record not found");
    };
    for (double db : {0.0, 2.0, 4.0, 6.0}) {
        const SimRecord& ml = find("ml", db);
        const SimRecord& map = find("map", db);
        const SimRecord& bdd = find("bdd", db);
        const auto binom_sd = [](const SimRecord& rec, double p) {
            return std::sqrt(p * (1.0 - p) / static_cast<double>(rec.frames));
        };
        // codeword-wise ML minimizes FER; bit-wise MAP minimizes BER
        EXPECT_LE(ml.fer, bdd.fer + 3.0 * binom_sd(bdd, bdd.fer)) << db;
        EXPECT_LE(ml.fer, map.fer + 3.0 * binom_sd(map, map.fer)) << db;
        EXPECT_LE(map.ber, ml.ber + 3.0 * binom_sd(ml, ml.ber)) << db;
    }
}

TEST(RunSweep, MatchedAndFixedAlphaSharePairedNoise) {
    SimConfig cfg = base_config();
    cfg.decoders = {DecoderKind::Map};
    cfg.ebn0_start = 2.0;
    cfg.ebn0_step = 2.0;
    cfg.ebn0_stop = 4.0;
    cfg.stop.min_frame_errors = 400'000;
    cfg.stop.max_frames = 400'000;

    const auto matched = run_sweep(cfg);
    cfg.alpha = {AlphaMode::Fixed, 4.0};
    const auto fixed = run_sweep(cfg);
    ASSERT_EQ(matched.size(), fixed.size());
    for (size_t i = 0; i < matched.size(); ++i) {
        ASSERT_EQ(matched[i].frames, fixed[i].frames);
        // same received vectors; mismatched alpha changes few decisions
        const double gap =
            std::abs(matched[i].ber - fixed[i].ber) / std::max(matched[i].ber, 1e-12);
        EXPECT_LT(gap, 0.10) << matched[i].ebn0_db << " dB";
    }
}
