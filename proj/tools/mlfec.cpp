// Command-line workbench for codebook-defined maximum likelihood decoding:
// code construction and statistics, network edge accounting, file-driven
// decoding, Monte Carlo FER/BER sweeps, and self-verification.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mlfec/channel.hpp"
#include "mlfec/codes.hpp"
#include "mlfec/decoders.hpp"
#include "mlfec/montecarlo.hpp"
#include "mlfec/network.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsageError = 2;

using nlohmann::json;
using namespace mlfec;

// ---------------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------------

std::vector<DecoderKind> parse_decoder_list(const std::string& list) {
    std::vector<DecoderKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_decoder(item));
    }
    if (out.empty()) throw std::invalid_argument("--decoders: empty decoder list");
    return out;
}

struct Ebn0Grid {
    double start = 0.0, step = 1.0, stop = 0.0;
};

Ebn0Grid parse_ebn0(const std::string& spec) {
    Ebn0Grid g;
    const auto c1 = spec.find(':');
    if (c1 == std::string::npos) {
        // single point
        g.start = g.stop = std::stod(spec);
        g.step = 1.0;
        return g;
    }
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("--ebn0 expects start:step:stop or a single value");
    g.start = std::stod(spec.substr(0, c1));
    g.step = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    g.stop = std::stod(spec.substr(c2 + 1));
    return g;
}

AlphaSpec parse_alpha(const std::string& spec) {
    AlphaSpec a;
    if (spec == "matched") {
        a.mode = AlphaMode::Matched;
        return a;
    }
    if (spec.rfind("fixed@", 0) == 0) {
        a.mode = AlphaMode::Fixed;
        a.fixed_ebn0_db = std::stod(spec.substr(6));
        return a;
    }
    throw std::invalid_argument("--alpha expects 'matched' or 'fixed@<dB>'");
}

std::string alpha_to_string(const AlphaSpec& a) {
    if (a.mode == AlphaMode::Matched) return "matched";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "fixed@%g", a.fixed_ebn0_db);
    return buf;
}

json code_metadata(const GeneratorMatrix& g) {
    const CodeStats stats = code_stats(g);
    json j{{"name", g.name},
           {"n", g.n},
           {"k", g.k},
           {"rate", g.rate()},
           {"dmin", stats.min_distance},
           {"weight_sum", stats.weight_sum}};
    if (!g.frozen_bits.empty()) j["frozen_bits"] = g.frozen_bits;
    return j;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// ---------------------------------------------------------------------------
// codebook dump | codebook stats
// ---------------------------------------------------------------------------

int cmd_codebook_dump(const std::string& code_id) {
    const GeneratorMatrix g = make_code(code_id);
    const CodewordStream stream(g);
    for (std::uint64_t j = 1; j <= stream.count(); ++j)
        std::cout << codeword_string(stream.codeword(j), g.n) << "\n";
    return 0;
}

int cmd_codebook_stats(const std::string& code_id) {
    const GeneratorMatrix g = make_code(code_id);
    std::cout << code_metadata(g).dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// net describe
// ---------------------------------------------------------------------------

int cmd_net_describe(const std::string& code_id, const std::string& arch,
                     const std::string& alpha_str) {
    const GeneratorMatrix g = make_code(code_id);
    CodewordStream stream(g);

    LayeredNet net = [&] {
        if (arch == "slnn") return build_slnn(std::move(stream));
        if (arch == "mlnn") {
            const AlphaSpec a = parse_alpha(alpha_str);
            if (a.mode == AlphaMode::Matched)
                return build_mlnn(std::move(stream), AlphaMode::Matched);
            const double sigma = ebn0_to_sigma(a.fixed_ebn0_db, g.rate());
            return build_mlnn(std::move(stream), AlphaMode::Fixed, 2.0 / (sigma * sigma));
        }
        throw std::invalid_argument("--arch expects 'slnn' or 'mlnn'");
    }();

    const EdgeCount edges = edge_count(net);
    json j{{"code", g.name},
           {"arch", arch},
           {"layer_sizes", net.layer_sizes()},
           {"edges_per_layer", edges.per_layer},
           {"total_edges", edges.total},
           {"alpha_mode", net.alpha_mode_label()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// table1: edge accounting for both architectures on all built-in codes,
// checked against the published reference counts.
// ---------------------------------------------------------------------------

int cmd_table1() {
    struct Row {
        const char* code;
        const char* arch;
        std::uint64_t expected;
    };
    // W1 carries one edge per codeword bit (sum of codeword weights); the
    // multi-label output layer adds k*2^(k-1).
    const Row rows[] = {
        {"hamming74", "single-label", 56},      {"hamming74", "multi-label", 88},
        {"polar168", "single-label", 2048},     {"polar168", "multi-label", 3072},
        {"bch3121", "single-label", 32505856},  {"bch3121", "multi-label", 54525952},
    };

    std::printf("%-10s %-13s %-14s %-6s %-12s %-8s %s\n", "code", "architecture", "layers",
                "train", "edges", "weights", "check");
    bool all_ok = true;
    for (const Row& row : rows) {
        const GeneratorMatrix g = make_code(row.code);
        CodewordStream stream(g);
        const bool multi = std::string(row.arch) == "multi-label";
        const LayeredNet net = multi ? build_mlnn(std::move(stream), AlphaMode::Matched)
                                     : build_slnn(std::move(stream));
        const EdgeCount edges = edge_count(net);

        std::string layers;
        for (size_t i = 0; i < net.layer_sizes().size(); ++i)
            layers += (i ? "-" : "") + std::to_string(net.layer_sizes()[i]);

        const bool ok = edges.total == row.expected;
        all_ok = all_ok && ok;
        std::printf("%-10s %-13s %-14s %-6s %-12llu %-8s %s\n", row.code, row.arch,
                    layers.c_str(), "no", static_cast<unsigned long long>(edges.total), "binary",
                    ok ? "ok" : "MISMATCH");
        if (!ok)
            std::fprintf(stderr, "table1: %s %s expected %llu edges, computed %llu\n", row.code,
                         row.arch, static_cast<unsigned long long>(row.expected),
                         static_cast<unsigned long long>(edges.total));
    }
    return all_ok ? 0 : kExitVerificationFailure;
}

// ---------------------------------------------------------------------------
// decode: whitespace-separated real vectors, one frame per line
// ---------------------------------------------------------------------------

int cmd_decode(const std::string& code_id, const std::string& decoder_str,
               std::optional<double> ebn0_db, std::optional<double> sigma_opt,
               const std::string& in_path) {
    const GeneratorMatrix g = make_code(code_id);
    const CodewordStream stream(g);
    const DecoderKind kind = parse_decoder(decoder_str);

    double sigma = 0.0;
    if (sigma_opt) {
        sigma = *sigma_opt;
    } else if (ebn0_db) {
        sigma = ebn0_to_sigma(*ebn0_db, g.rate());
    } else if (kind == DecoderKind::Map) {
        throw std::invalid_argument("decoder 'map' needs --ebn0 or --sigma");
    }

    std::ifstream file;
    if (!in_path.empty()) {
        file.open(in_path);
        if (!file) throw std::runtime_error("cannot open input file '" + in_path + "'");
    }
    std::istream& in = in_path.empty() ? std::cin : file;

    std::optional<BddDecoder> bdd;
    if (kind == DecoderKind::Bdd) bdd.emplace(g, -1, default_bdd_strategy(g));

    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::vector<double> r;
        double v;
        while (ss >> v) r.push_back(v);
        if (static_cast<int>(r.size()) != g.n) {
            std::ostringstream msg;
            msg << "line " << lineno << ": expected " << g.n << " values, got " << r.size();
            throw std::runtime_error(msg.str());
        }

        DecodeOutcome out;
        switch (kind) {
            case DecoderKind::Ml: out = ml_decode(stream, r); break;
            case DecoderKind::Map: out = map_decode(stream, r, sigma); break;
            case DecoderKind::Bdd: out = bdd->decode(hard_decision(r)); break;
        }
        json j{{"decoder", decoder_name(kind)},
               {"message_bits", message_string(out.message, g.k)},
               {"codeword_bits", codeword_string(out.codeword, g.n)},
               {"flags", {{"bdd_failure", out.bdd_failure}}}};
        std::cout << j.dump() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string code = "hamming74";
    std::string decoders = "ml";
    std::string ebn0 = "0:1:10";
    std::uint64_t min_errors = 100;
    std::uint64_t max_frames = 10'000'000;
    std::uint64_t seed = 1;
    std::string alpha = "matched";
    int workers = 0;
    std::string out_dir = "out";
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

std::string config_text(const SimulateOptions& o) {
    std::ostringstream out;
    out << "code=" << o.code << "\n"
        << "decoders=" << o.decoders << "\n"
        << "ebn0=" << o.ebn0 << "\n"
        << "min-errors=" << o.min_errors << "\n"
        << "max-frames=" << o.max_frames << "\n"
        << "seed=" << o.seed << "\n"
        << "alpha=" << o.alpha << "\n"
        << "workers=" << o.workers << "\n";
    return out.str();
}

int cmd_simulate(const SimulateOptions& opt) {
    SimConfig cfg;
    cfg.code_id = opt.code;
    cfg.decoders = parse_decoder_list(opt.decoders);
    const Ebn0Grid grid = parse_ebn0(opt.ebn0);
    cfg.ebn0_start = grid.start;
    cfg.ebn0_step = grid.step;
    cfg.ebn0_stop = grid.stop;
    cfg.stop.min_frame_errors = opt.min_errors;
    cfg.stop.max_frames = opt.max_frames;
    cfg.master_seed = opt.seed;
    cfg.alpha = parse_alpha(opt.alpha);
    cfg.workers = opt.workers;
    cfg.validate();
    const GeneratorMatrix code = make_code(cfg.code_id);  // fail early on bad ids

    namespace fs = std::filesystem;
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    // One .dat per (code, decoder): ebn0_db fer ber frames frame_errors bit_errors
    std::map<std::string, std::ofstream> dat_files;
    std::vector<std::string> output_names;
    for (DecoderKind d : cfg.decoders) {
        const std::string name = cfg.code_id + "_" + decoder_name(d) + ".dat";
        auto [it, inserted] = dat_files.try_emplace(decoder_name(d), dir / name);
        if (inserted) output_names.push_back(name);
        if (!it->second) throw std::runtime_error("cannot create " + (dir / name).string());
    }

    const auto on_point = [&](const std::vector<SimRecord>& records) {
        for (const SimRecord& rec : records) {
            auto it = dat_files.find(rec.decoder);
            if (it == dat_files.end()) continue;
            char line[256];
            std::snprintf(line, sizeof(line), "%g %.6g %.6g %llu %llu %llu\n", rec.ebn0_db,
                          rec.fer, rec.ber, static_cast<unsigned long long>(rec.frames),
                          static_cast<unsigned long long>(rec.frame_errors),
                          static_cast<unsigned long long>(rec.bit_errors));
            it->second << line;
            it->second.flush();
            if (!it->second)
                std::cerr << "warning: write failed for decoder " << rec.decoder << " at "
                          << rec.ebn0_db << " dB; continuing\n";
            std::fprintf(stderr, "%s %s %.4g dB: fer=%.6g ber=%.6g frames=%llu (%.1fs)\n",
                         rec.code.c_str(), rec.decoder.c_str(), rec.ebn0_db, rec.fer, rec.ber,
                         static_cast<unsigned long long>(rec.frames), rec.elapsed_seconds);
        }
    };

    run_sweep(cfg, on_point);

    {
        std::ofstream cfg_out(dir / "config.txt");
        cfg_out << config_text(opt);
    }
    json manifest{{"command", "simulate"},
                  {"tool_version", kToolVersion},
                  {"timestamp", iso_timestamp()},
                  {"master_seed", cfg.master_seed},
                  {"config",
                   {{"code", opt.code},
                    {"decoders", opt.decoders},
                    {"ebn0", opt.ebn0},
                    {"min_errors", opt.min_errors},
                    {"max_frames", opt.max_frames},
                    {"seed", opt.seed},
                    {"alpha", opt.alpha},
                    {"workers", opt.workers}}},
                  {"code", code_metadata(code)},
                  {"outputs", output_names},
                  {"config_file", "config.txt"}};
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    if (!mf) throw std::runtime_error("cannot write manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------
// verify: construction regressions, decoder equivalences, invariants
// ---------------------------------------------------------------------------

struct VerifyState {
    int failures = 0;

    void check(bool ok, const std::string& what) {
        std::printf("%s: %s\n", ok ? "ok" : "FAIL", what.c_str());
        if (!ok) ++failures;
    }
};

void verify_code(VerifyState& v, GeneratorMatrix g, std::uint64_t trials) {
    const std::string& id = g.name;
    const CodeStats stats = code_stats(g);

    if (id == "hamming74") {
        const std::vector<std::uint64_t> expected_enum = {1, 0, 0, 7, 7, 0, 0, 1};
        v.check(stats.weight_enumerator && *stats.weight_enumerator == expected_enum,
                id + " weight enumerator 1 + 7x^3 + 7x^4 + x^7");
        v.check(stats.min_distance == 3, id + " dmin 3");
        v.check(stats.weight_sum == 56, id + " weight sum 56");
    } else if (id == "polar168") {
        v.check(g.frozen_bits == std::vector<int>({0, 1, 2, 3, 4, 5, 6, 8}),
                id + " frozen set {0,1,2,3,4,5,6,8}");
        v.check(stats.weight_sum == 2048, id + " weight sum 2048");
        v.check(stats.min_distance == 4, id + " dmin 4");
    } else if (id == "bch3121") {
        const word gpoly = bch_31_21_generator_poly();
        v.check(detail::poly_degree(gpoly) == 10, id + " generator polynomial degree 10");
        bool divisible = true;
        rng::Stream st(99);
        for (int t = 0; t < 200; ++t) {
            const word c = g.encode_value(st.next_bits(g.k));
            if (detail::poly_mod_gf2(c, gpoly) != 0) divisible = false;
        }
        v.check(divisible, id + " codewords divisible by g(x)");
        v.check(stats.min_distance == 5, id + " dmin 5");
        v.check(stats.weight_sum == 32505856, id + " weight sum 31*2^20");
    }

    // Coordinate coverage -> weight sum n * 2^(k-1)
    word cover = 0;
    for (word row : g.rows) cover |= row;
    if (cover == low_mask(g.n))
        v.check(stats.weight_sum ==
                    static_cast<std::uint64_t>(g.n) * (std::uint64_t{1} << (g.k - 1)),
                id + " weight sum equals n*2^(k-1)");

    // Round trip and linearity
    const MessageRecovery rec = make_recovery(g);
    bool round_trip = true;
    if (g.k <= 16) {
        for (word m = 0; m < (word{1} << g.k); ++m)
            if (rec.recover(g.encode_value(m)) != m) round_trip = false;
    } else {
        rng::Stream st(3);
        for (int t = 0; t < 100000; ++t) {
            const word m = st.next_bits(g.k);
            if (rec.recover(g.encode_value(m)) != m) round_trip = false;
        }
    }
    v.check(round_trip, id + " recover(encode(m)) == m");

    bool linear = true;
    rng::Stream st(4);
    for (int t = 0; t < 10000; ++t) {
        const word m1 = st.next_bits(g.k), m2 = st.next_bits(g.k);
        if (g.encode_value(m1 ^ m2) != (g.encode_value(m1) ^ g.encode_value(m2))) linear = false;
    }
    v.check(linear, id + " encode is linear");

    // Decoder equivalences on channel-realistic received vectors.
    const CodewordStream stream(g);
    LayeredNet slnn = build_slnn(CodewordStream(g));
    LayeredNet mlnn = build_mlnn(CodewordStream(g), AlphaMode::Matched);
    const std::uint64_t n_trials = g.k > 16 ? std::max<std::uint64_t>(trials / 100, 5) : trials;
    SlnnForward fwd;
    bool thm1 = true, thm2 = true, thm1_oracle = true, thm2_oracle = true;
    for (double sigma : {0.5, 1.0}) {
        rng::Stream gen(rng::derive(7, static_cast<std::uint64_t>(sigma * 1000)));
        std::vector<double> r(static_cast<size_t>(g.n));
        for (std::uint64_t t = 0; t < n_trials; ++t) {
            const word m = gen.next_bits(g.k);
            bpsk_map(g.encode_value(m), g.n, r.data());
            for (int i = 0; i < g.n; ++i) r[static_cast<size_t>(i)] += sigma * gen.next_gaussian();

            const DecodeOutcome ml = ml_decode(stream, r);
            forward_slnn(slnn, r, fwd);
            if (fwd.argmax_index - 1 != ml.message) thm1 = false;

            const DecodeOutcome map = map_decode(stream, r, sigma);
            const MlnnForward mf = forward_mlnn(mlnn, r, sigma);
            if (map.message != mf.bits && map.metric > 1e-9) thm2 = false;

            if (g.k <= 12) {
                if (oracle_ml(stream, r, sigma).message != ml.message &&
                    fwd.best - fwd.second > 1e-9)
                    thm1_oracle = false;
                if (oracle_map(stream, r, sigma) != map.message && map.metric > 1e-9)
                    thm2_oracle = false;
            }
        }
    }
    v.check(thm1, id + " single-label argmax == codeword-wise ML decode");
    v.check(thm2, id + " multi-label bits == bit-wise MAP decode");
    if (g.k <= 12) {
        v.check(thm1_oracle, id + " codeword-wise ML == brute-force likelihood argmax");
        v.check(thm2_oracle, id + " bit-wise MAP == brute-force likelihood comparison");
    }
}

int cmd_verify(const std::string& code_filter, std::uint64_t trials, bool corrupt) {
    VerifyState v;
    for (const char* id : {"hamming74", "polar168", "bch3121"}) {
        if (!code_filter.empty() && code_filter != id) continue;
        GeneratorMatrix g = make_code(id);
        if (corrupt) g.rows[0] ^= word{1} << (g.n - 1);  // test fixture
        verify_code(v, std::move(g), trials);
    }
    if (v.failures > 0) {
        std::fprintf(stderr, "verify: %d check(s) failed\n", v.failures);
        return kExitVerificationFailure;
    }
    std::printf("verify: all checks passed\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Codebook-defined maximum likelihood decoding workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // codebook
    auto* codebook = app.add_subcommand("codebook", "Dump or summarize a codebook");
    codebook->require_subcommand(1);
    std::string cb_code = "hamming74";
    auto* cb_dump = codebook->add_subcommand("dump", "Print all codewords in canonical order");
    cb_dump->add_option("--code", cb_code, "Code id (hamming74, polar168, bch3121)");
    auto* cb_stats = codebook->add_subcommand("stats", "Print code statistics as JSON");
    cb_stats->add_option("--code", cb_code, "Code id (hamming74, polar168, bch3121)");

    // net
    auto* net = app.add_subcommand("net", "Describe decoder networks");
    net->require_subcommand(1);
    std::string net_code = "hamming74", net_arch = "slnn", net_alpha = "matched";
    auto* net_desc = net->add_subcommand("describe", "Layer sizes and edge counts as JSON");
    net_desc->add_option("--code", net_code, "Code id");
    net_desc->add_option("--arch", net_arch, "Architecture: slnn or mlnn");
    net_desc->add_option("--alpha", net_alpha, "mlnn softmax scale: matched or fixed@<dB>");

    // table1
    auto* table1 = app.add_subcommand(
        "table1", "Edge counts of both architectures for all built-in codes, with checks");

    // simulate
    SimulateOptions sim;
    std::string sim_config_file;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo FER/BER sweep");
    auto* o_code = simulate->add_option("--code", sim.code, "Code id");
    auto* o_dec = simulate->add_option("--decoders", sim.decoders, "Comma list: ml,map,bdd");
    auto* o_ebn0 = simulate->add_option("--ebn0", sim.ebn0, "Grid start:step:stop in dB");
    auto* o_minerr =
        simulate->add_option("--min-errors", sim.min_errors, "Frame errors per decoder to stop");
    auto* o_maxf = simulate->add_option("--max-frames", sim.max_frames, "Frame cap per point");
    auto* o_seed = simulate->add_option("--seed", sim.seed, "Master seed");
    auto* o_alpha =
        simulate->add_option("--alpha", sim.alpha, "MAP softmax scale: matched or fixed@<dB>");
    auto* o_workers = simulate->add_option("--workers", sim.workers,
                                           "Worker threads (0 = all cores); results "
                                           "are identical for any value");
    auto* o_out = simulate->add_option("--out", sim.out_dir, "Output directory");
    simulate->add_option("--config", sim_config_file,
                         "key=value config file; command-line flags override");

    // decode
    std::string dec_code = "hamming74", dec_decoder = "ml", dec_in;
    std::optional<double> dec_ebn0, dec_sigma;
    auto* decode = app.add_subcommand("decode", "Decode received vectors (one frame per line)");
    decode->add_option("--code", dec_code, "Code id");
    decode->add_option("--decoder", dec_decoder, "ml, map or bdd");
    decode->add_option("--ebn0", dec_ebn0, "Channel Eb/N0 in dB (sets sigma)");
    decode->add_option("--sigma", dec_sigma, "Channel noise sigma");
    decode->add_option("--in", dec_in, "Input file (default: stdin)");

    // verify
    std::string ver_code;
    std::uint64_t ver_trials = 2000;
    bool ver_corrupt = false;
    auto* verify = app.add_subcommand("verify", "Run equivalence and invariant checks");
    verify->add_option("--code", ver_code, "Restrict to one code id");
    verify->add_option("--trials", ver_trials, "Trials per (code, sigma); scaled down for k=21");
    verify->add_flag("--corrupt-generator", ver_corrupt,
                     "Test fixture: flip a generator bit before checking");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsageError;
    }

    try {
        if (cb_dump->parsed()) return cmd_codebook_dump(cb_code);
        if (cb_stats->parsed()) return cmd_codebook_stats(cb_code);
        if (net_desc->parsed()) return cmd_net_describe(net_code, net_arch, net_alpha);
        if (table1->parsed()) return cmd_table1();
        if (simulate->parsed()) {
            if (!sim_config_file.empty()) {
                const auto kv = read_config_file(sim_config_file);
                const auto take = [&](CLI::Option* opt, const std::string& key, auto apply) {
                    const auto it = kv.find(key);
                    if (opt->count() == 0 && it != kv.end()) apply(it->second);
                };
                take(o_code, "code", [&](const std::string& s) { sim.code = s; });
                take(o_dec, "decoders", [&](const std::string& s) { sim.decoders = s; });
                take(o_ebn0, "ebn0", [&](const std::string& s) { sim.ebn0 = s; });
                take(o_minerr, "min-errors",
                  [&](const std::string& s) { sim.min_errors = std::stoull(s); });
                take(o_maxf, "max-frames",
                  [&](const std::string& s) { sim.max_frames = std::stoull(s); });
                take(o_seed, "seed", [&](const std::string& s) { sim.seed = std::stoull(s); });
                take(o_alpha, "alpha", [&](const std::string& s) { sim.alpha = s; });
                take(o_workers, "workers", [&](const std::string& s) { sim.workers = std::stoi(s); });
                take(o_out, "out", [&](const std::string& s) { sim.out_dir = s; });
            }
            return cmd_simulate(sim);
        }
        if (decode->parsed()) return cmd_decode(dec_code, dec_decoder, dec_ebn0, dec_sigma, dec_in);
        if (verify->parsed()) return cmd_verify(ver_code, ver_trials, ver_corrupt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
    return 0;
}
