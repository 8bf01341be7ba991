// vsb: source-bias analysis for text-to-video retrieval over embedding
// corpora. Subcommands cover the full pipeline: synthetic corpus
// generation, ranking + bias metrics, frame-order ablations, debias
// training, p-vector extraction/application, significance tests and
// flow-entropy summaries.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsb/embedding_store.hpp"
#include "vsb/error.hpp"
#include "vsb/metrics.hpp"
#include "vsb/pvector.hpp"
#include "vsb/ranking.hpp"
#include "vsb/report.hpp"
#include "vsb/rng.hpp"
#include "vsb/stats.hpp"
#include "vsb/synth.hpp"
#include "vsb/trainer.hpp"
#include "vsb/vecmath.hpp"
#include "vsb/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CorpusArgs {
    std::string real_path;
    std::string ai_path;
    std::string queries_path;
    std::string rel_path;
};

struct LoadedData {
    vsb::Corpus real;
    vsb::Corpus ai;
    std::vector<vsb::QueryRecord> queries;
    vsb::RelevanceMap rel;
};

LoadedData load_all(const CorpusArgs& args) {
    LoadedData d;
    d.real = vsb::load_corpus(args.real_path);
    d.ai = vsb::load_corpus(args.ai_path);
    d.queries = vsb::load_queries(args.queries_path);
    d.rel = vsb::load_relevance(args.rel_path);
    vsb::validate_relevance(d.queries, d.real, d.rel);
    vsb::validate_relevance(d.queries, d.ai, d.rel);
    return d;
}

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
    cmd->add_option("--real", args.real_path, "real corpus JSONL")->required();
    cmd->add_option("--ai", args.ai_path, "AI corpus JSONL")->required();
    cmd->add_option("--queries", args.queries_path, "query JSONL")->required();
    cmd->add_option("--rel", args.rel_path, "relevance JSONL")->required();
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw vsb::Error("cannot create output directory " + out + ": " + ec.message());
    }
    return dir;
}

vsb::PoolSpec make_pool_spec(const std::string& pool, int frame_index) {
    vsb::PoolSpec spec;
    spec.mode = vsb::pool_mode_from_string(pool);
    spec.frame_index = frame_index;
    return spec;
}

std::string dtos(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

/// Standalone + mixed rank tables for one pooling of a corpus pair.
struct RankedPair {
    vsb::RankTable real_ranks;
    vsb::RankTable ai_ranks;
    vsb::RankTable mixed_real;
    vsb::RankTable mixed_ai;
};

RankedPair rank_all(std::span<const vsb::PooledEmbedding> real,
                    std::span<const vsb::PooledEmbedding> ai,
                    const std::vector<vsb::QueryRecord>& queries,
                    const vsb::RelevanceMap& rel) {
    RankedPair r;
    r.real_ranks = vsb::rank_relevant(real, queries, rel);
    r.ai_ranks = vsb::rank_relevant(ai, queries, rel);
    auto mixed = vsb::rank_mixed(real, ai, queries, rel);
    r.mixed_real = std::move(mixed.first);
    r.mixed_ai = std::move(mixed.second);
    return r;
}

void write_metric_outputs(const RankedPair& ranked,
                          const vsb::DeltaReport& report,
                          const fs::path& dir) {
    vsb::write_bundles_csv(
        {
            {"REAL", vsb::metric_bundle(ranked.real_ranks)},
            {"AI", vsb::metric_bundle(ranked.ai_ranks)},
            {"mixed-REAL", vsb::metric_bundle(ranked.mixed_real)},
            {"mixed-AI", vsb::metric_bundle(ranked.mixed_ai)},
        },
        (dir / "bundles.csv").string());
    vsb::write_delta_csv(report, (dir / "deltas.csv").string());
    vsb::write_delta_json(report, (dir / "deltas.json").string());
    vsb::write_delta_svg(report, (dir / "deltas.svg").string());
    vsb::save_rank_table_csv(ranked.real_ranks, (dir / "ranks_real.csv").string());
    vsb::save_rank_table_csv(ranked.ai_ranks, (dir / "ranks_ai.csv").string());
    vsb::save_rank_table_csv(ranked.mixed_real, (dir / "ranks_mixed_real.csv").string());
    vsb::save_rank_table_csv(ranked.mixed_ai, (dir / "ranks_mixed_ai.csv").string());
}

// ---------------------------------------------------------------------------
// metrics / ablate
// ---------------------------------------------------------------------------

struct MetricsArgs {
    CorpusArgs corpus;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    size_t frames = 10;
    uint64_t seed = 42;
    size_t n_seeds = 1;
    std::string params_path;
    std::string out = "out";
};

void run_metrics_like(const MetricsArgs& args,
                      const std::string& command,
                      const std::string& ablate_mode) {
    const auto dir = ensure_out_dir(args.out);
    const uint64_t cmd_seed = vsb::derive_seed(args.seed, command);
    auto data = load_all(args.corpus);

    std::string pool = args.pool;
    if (command == "ablate" && ablate_mode == "single-frame") {
        pool = "single-frame";
    }
    const auto spec = make_pool_spec(pool, args.frame_index);

    if (command == "ablate" && ablate_mode != "single-frame" &&
        spec.mode == vsb::PoolMode::uniform_mean) {
        std::cerr << "warning: frame-order ablation under uniform-mean pooling is a no-op "
                     "(mean pooling is permutation invariant)\n";
    }

    if (command == "ablate" && ablate_mode != "single-frame") {
        vsb::Rng shuffle_rng(vsb::derive_seed(cmd_seed, "shuffle"));
        const auto mode = ablate_mode == "reverse" ? vsb::ShuffleMode::reverse
                                                   : vsb::ShuffleMode::random;
        if (ablate_mode == "shuffle-all" || ablate_mode == "reverse") {
            for (auto& v : data.real.videos) {
                v = vsb::shuffle_frames(v, mode, shuffle_rng);
            }
        }
        for (auto& v : data.ai.videos) {
            v = vsb::shuffle_frames(v, mode, shuffle_rng);
        }
    }

    auto pooled_real = vsb::pool_corpus(data.real, spec, args.frames);
    auto pooled_ai = vsb::pool_corpus(data.ai, spec, args.frames);
    if (!args.params_path.empty()) {
        const auto params = vsb::load_params_json(args.params_path);
        pooled_real = vsb::transform_embeddings(params, pooled_real);
        pooled_ai = vsb::transform_embeddings(params, pooled_ai);
    }

    const auto ranked = rank_all(pooled_real, pooled_ai, data.queries, data.rel);
    const auto report = vsb::delta_report(ranked.real_ranks, ranked.ai_ranks,
                                          ranked.mixed_real, ranked.mixed_ai, cmd_seed,
                                          args.n_seeds);
    write_metric_outputs(ranked, report, dir);

    std::map<std::string, std::string> manifest = {
        {"real", args.corpus.real_path},   {"ai", args.corpus.ai_path},
        {"queries", args.corpus.queries_path}, {"rel", args.corpus.rel_path},
        {"pool", pool},                    {"frames", std::to_string(args.frames)},
        {"frame_index", std::to_string(args.frame_index)},
        {"seeds", std::to_string(args.n_seeds)},
        {"out", args.out},
    };
    if (command == "ablate") {
        manifest["mode"] = ablate_mode;
    }
    if (!args.params_path.empty()) {
        manifest["params"] = args.params_path;
    }
    vsb::write_manifest(command, manifest, args.seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// interleave
// ---------------------------------------------------------------------------

void run_interleave(const std::string& real_csv, const std::string& ai_csv, uint64_t seed,
                    size_t n_seeds, const std::string& out) {
    const auto dir = ensure_out_dir(out);
    const uint64_t cmd_seed = vsb::derive_seed(seed, "interleave");
    const auto real_ranks = vsb::load_rank_table_csv(real_csv);
    const auto ai_ranks = vsb::load_rank_table_csv(ai_csv);

    const auto [mixed_real, mixed_ai] = vsb::simulate_interleaved(real_ranks, ai_ranks, cmd_seed);
    vsb::save_rank_table_csv(mixed_real, (dir / "interleaved_real.csv").string());
    vsb::save_rank_table_csv(mixed_ai, (dir / "interleaved_ai.csv").string());

    const auto location =
        vsb::location_delta_averaged(real_ranks, ai_ranks, cmd_seed, n_seeds);
    json j;
    j["location"] = {{"r1", location.r1},     {"r5", location.r5},
                     {"r10", location.r10},   {"medr", location.med_r},
                     {"meanr", location.mean_r}, {"mixr", vsb::mixr(location)}};
    std::ofstream jf(dir / "location_delta.json");
    jf << j.dump(2) << '\n';
    std::ofstream cf(dir / "location_delta.csv");
    cf << "metric,location\n";
    char buf[96];
    const std::pair<const char*, double> rows[] = {
        {"r1", location.r1},       {"r5", location.r5},   {"r10", location.r10},
        {"medr", location.med_r},  {"meanr", location.mean_r},
        {"mixr", vsb::mixr(location)},
    };
    for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f\n", name, value);
        cf << buf;
    }

    vsb::write_manifest("interleave",
                        {{"real_ranks", real_csv},
                         {"ai_ranks", ai_csv},
                         {"seeds", std::to_string(n_seeds)},
                         {"out", out}},
                        seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// train-debias
// ---------------------------------------------------------------------------

struct TrainArgs {
    CorpusArgs corpus;
    vsb::TrainConfig config;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    uint64_t seed = 42;
    std::string out = "out";
};

void run_train(const TrainArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    const auto data = load_all(args.corpus);

    vsb::TrainConfig config = args.config;
    config.seed = vsb::derive_seed(args.seed, "train-debias");
    config.pooling = make_pool_spec(args.pool, args.frame_index);

    const auto result = vsb::train(config, data.real, data.ai, data.queries, data.rel);
    vsb::save_params_json(result.params, (dir / "params.json").string());
    vsb::save_history_csv(result.history, (dir / "history.csv").string());

    const auto pooled_real = vsb::pool_corpus(data.real, config.pooling, config.frames);
    const auto pooled_ai = vsb::pool_corpus(data.ai, config.pooling, config.frames);
    const uint64_t eval_seed = vsb::derive_seed(config.seed, "eval-report");
    const auto identity = vsb::ScorerParams::identity(data.real.dim, config.tau);
    vsb::write_delta_json(vsb::evaluate_params(identity, pooled_real, pooled_ai, data.queries,
                                               data.rel, eval_seed),
                          (dir / "eval_before.json").string());
    vsb::write_delta_json(vsb::evaluate_params(result.params, pooled_real, pooled_ai,
                                               data.queries, data.rel, eval_seed),
                          (dir / "eval_after.json").string());

    vsb::write_manifest("train-debias",
                        {{"real", args.corpus.real_path},
                         {"ai", args.corpus.ai_path},
                         {"queries", args.corpus.queries_path},
                         {"rel", args.corpus.rel_path},
                         {"epochs", std::to_string(config.epochs)},
                         {"lr", dtos(config.learning_rate)},
                         {"batch_size", std::to_string(config.batch_size)},
                         {"rho", dtos(config.mix_ratio)},
                         {"lambda", dtos(config.debias_weight)},
                         {"tau", dtos(config.tau)},
                         {"pool", args.pool},
                         {"frames", std::to_string(config.frames)},
                         {"holdout", dtos(config.holdout_fraction)},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// pvector extract / apply / stats
// ---------------------------------------------------------------------------

struct PvExtractArgs {
    std::string original_path;
    std::string debiased_path;
    std::string corpus_path;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    size_t frames = 10;
    std::string space = "projected";
    bool shuffled = false;
    uint64_t seed = 42;
    std::string out = "out";
};

void run_pvector_extract(const PvExtractArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    auto corpus = vsb::load_corpus(args.corpus_path);
    const auto debiased = vsb::load_params_json(args.debiased_path);
    const auto original = args.original_path.empty()
                              ? vsb::ScorerParams::identity(debiased.dim, debiased.tau)
                              : vsb::load_params_json(args.original_path);

    if (args.shuffled) {
        vsb::Rng rng(vsb::derive_seed(vsb::derive_seed(args.seed, "pvector-extract"),
                                      "shuffle"));
        for (auto& v : corpus.videos) {
            v = vsb::shuffle_frames(v, vsb::ShuffleMode::random, rng);
        }
    }

    const auto spec = make_pool_spec(args.pool, args.frame_index);
    const auto space = args.space == "raw" ? vsb::PSpace::raw : vsb::PSpace::projected;
    const auto variant = args.shuffled ? vsb::PVariant::random : vsb::PVariant::standard;
    const auto set =
        vsb::extract_p(original, debiased, corpus, spec, args.frames, space, variant);
    vsb::save_pvectors_jsonl(set, (dir / "pvectors.jsonl").string());

    vsb::write_manifest("pvector-extract",
                        {{"original", args.original_path.empty() ? "<identity>"
                                                                 : args.original_path},
                         {"debiased", args.debiased_path},
                         {"corpus", args.corpus_path},
                         {"pool", args.pool},
                         {"frames", std::to_string(args.frames)},
                         {"space", args.space},
                         {"shuffled", args.shuffled ? "true" : "false"},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

struct PvApplyArgs {
    CorpusArgs corpus;
    std::string pvectors_path;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    size_t frames = 10;
    uint64_t seed = 42;
    std::string out = "out";
};

void run_pvector_apply(const PvApplyArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    const auto data = load_all(args.corpus);
    const auto set = vsb::load_pvectors_jsonl(args.pvectors_path);
    const auto spec = make_pool_spec(args.pool, args.frame_index);
    const uint64_t cmd_seed = vsb::derive_seed(args.seed, "pvector-apply");

    const auto pooled_real = vsb::pool_corpus(data.real, spec, args.frames);
    const auto pooled_ai = vsb::pool_corpus(data.ai, spec, args.frames);
    const auto shifted_real = vsb::apply_shift(pooled_real, set.p_avg);

    const auto identity = vsb::ScorerParams::identity(data.real.dim);
    const auto before = vsb::evaluate_params(identity, pooled_real, pooled_ai, data.queries,
                                             data.rel, cmd_seed);
    const auto after = vsb::evaluate_params(identity, shifted_real, pooled_ai, data.queries,
                                            data.rel, cmd_seed);
    const auto delta = vsb::shift_delta_report(before, after);

    vsb::write_delta_json(before, (dir / "before.json").string());
    vsb::write_delta_json(after, (dir / "after.json").string());
    json j;
    j["delta_normalized"] = {{"r1", delta.per_metric.r1},
                             {"r5", delta.per_metric.r5},
                             {"r10", delta.per_metric.r10},
                             {"medr", delta.per_metric.med_r},
                             {"meanr", delta.per_metric.mean_r},
                             {"mixr", delta.mixr}};
    std::ofstream jf(dir / "shift_delta.json");
    jf << j.dump(2) << '\n';
    std::ofstream cf(dir / "shift_delta.csv");
    cf << "metric,delta_normalized\n";
    char buf[96];
    const std::pair<const char*, double> rows[] = {
        {"r1", delta.per_metric.r1},     {"r5", delta.per_metric.r5},
        {"r10", delta.per_metric.r10},   {"medr", delta.per_metric.med_r},
        {"meanr", delta.per_metric.mean_r}, {"mixr", delta.mixr},
    };
    for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f\n", name, value);
        cf << buf;
    }

    vsb::write_manifest("pvector-apply",
                        {{"real", args.corpus.real_path},
                         {"ai", args.corpus.ai_path},
                         {"queries", args.corpus.queries_path},
                         {"rel", args.corpus.rel_path},
                         {"pvectors", args.pvectors_path},
                         {"pool", args.pool},
                         {"frames", std::to_string(args.frames)},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

struct PvStatsArgs {
    std::string pvectors_path;
    std::string corpus_path;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    size_t frames = 10;
    uint64_t seed = 42;
    std::string out = "out";
};

void run_pvector_stats(const PvStatsArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    const auto set = vsb::load_pvectors_jsonl(args.pvectors_path);
    const auto corpus = vsb::load_corpus(args.corpus_path);
    const auto spec = make_pool_spec(args.pool, args.frame_index);
    const auto pooled = vsb::pool_corpus(corpus, spec, args.frames);

    const auto stats = vsb::cluster_stats(set, pooled);
    json j;
    j["mean_pairwise_cos_p"] = stats.mean_pairwise_cos_p;
    j["mean_pairwise_cos_h"] = stats.mean_pairwise_cos_h;
    j["silhouette"] = stats.silhouette;
    std::ofstream jf(dir / "cluster_stats.json");
    jf << j.dump(2) << '\n';

    std::vector<std::vector<double>> vectors;
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    for (size_t i = 0; i < set.p.size(); ++i) {
        vectors.push_back(set.p[i]);
        ids.push_back(set.ids[i]);
        labels.push_back("p");
    }
    for (const auto& e : pooled) {
        vectors.push_back(e.vec);
        ids.push_back(e.video_id);
        labels.push_back("h");
    }
    const auto projection = vsb::pca_project_2d(vectors, ids, labels);
    vsb::save_projection_csv(projection, (dir / "projection.csv").string());
    vsb::write_scatter_svg(projection, (dir / "projection.svg").string());

    vsb::write_manifest("pvector-stats",
                        {{"pvectors", args.pvectors_path},
                         {"corpus", args.corpus_path},
                         {"pool", args.pool},
                         {"frames", std::to_string(args.frames)},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// synth gen
// ---------------------------------------------------------------------------

void run_synth_gen(const vsb::SynthConfig& cfg, uint64_t seed, const std::string& out) {
    const auto dir = ensure_out_dir(out);
    vsb::SynthConfig config = cfg;
    config.seed = vsb::derive_seed(seed, "synth-gen");
    const auto data = vsb::generate_synthetic(config);

    vsb::save_corpus(data.real, (dir / "real.jsonl").string());
    vsb::save_corpus(data.ai, (dir / "ai.jsonl").string());
    vsb::save_queries(data.queries, (dir / "queries.jsonl").string());
    vsb::save_relevance(data.rel, (dir / "relevance.jsonl").string());
    json j;
    j["bias_direction"] = data.bias_direction;
    std::ofstream bf(dir / "bias_direction.json");
    bf << j.dump(2) << '\n';

    vsb::write_manifest("synth-gen",
                        {{"n", std::to_string(config.n_items)},
                         {"dim", std::to_string(config.dim)},
                         {"frames", std::to_string(config.frames)},
                         {"alpha", dtos(config.alpha)},
                         {"beta", dtos(config.beta)},
                         {"gamma", dtos(config.gamma)},
                         {"sigma", dtos(config.noise_sigma)},
                         {"drift", dtos(config.drift)},
                         {"out", out}},
                        seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// ttest
// ---------------------------------------------------------------------------

struct TTestArgs {
    CorpusArgs corpus;
    std::string pool = "uniform-mean";
    int frame_index = -1;
    size_t frames = 10;
    uint64_t seed = 42;
    std::string out = "out";
};

void run_ttest(const TTestArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    const auto data = load_all(args.corpus);
    const auto spec = make_pool_spec(args.pool, args.frame_index);
    const auto pooled_real = vsb::pool_corpus(data.real, spec, args.frames);
    const auto pooled_ai = vsb::pool_corpus(data.ai, spec, args.frames);
    const auto triplets = vsb::join_triplets(data.real, data.ai, data.queries, data.rel);

    // Group A: text-real similarity; group B: text-AI similarity, paired
    // by query.
    std::vector<double> sims_real;
    std::vector<double> sims_ai;
    for (const auto& t : triplets) {
        const auto& q = data.queries[t.query_index];
        const auto unit = vsb::normalized(q.embedding, "query \"" + q.id + "\"");
        sims_real.push_back(vsb::dot(pooled_real[t.real_index].vec, unit));
        sims_ai.push_back(vsb::dot(pooled_ai[t.ai_index].vec, unit));
    }
    const auto result = vsb::paired_t_test(sims_real, sims_ai);
    vsb::write_ttest_json(result, (dir / "ttest.json").string());

    vsb::write_manifest("ttest",
                        {{"real", args.corpus.real_path},
                         {"ai", args.corpus.ai_path},
                         {"queries", args.corpus.queries_path},
                         {"rel", args.corpus.rel_path},
                         {"pool", args.pool},
                         {"frames", std::to_string(args.frames)},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

struct FlowArgs {
    std::string real_dir;
    std::string ai_dir;
    size_t synth_pairs = 0;
    size_t rows = 24;
    size_t cols = 24;
    size_t bins = 16;
    uint64_t seed = 42;
    std::string out = "out";
};

std::vector<std::vector<std::vector<double>>> load_flow_dir(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw vsb::InputError("no .csv flow grids in directory: " + dir);
    }
    std::vector<std::vector<std::vector<double>>> grids;
    grids.reserve(files.size());
    for (const auto& f : files) {
        grids.push_back(vsb::load_flow_grid_csv(f));
    }
    return grids;
}

void run_flow(const FlowArgs& args) {
    const auto dir = ensure_out_dir(args.out);
    vsb::FlowEntropySummary summary;
    if (args.synth_pairs > 0) {
        const auto pairs = vsb::synth_flow_pairs(
            args.synth_pairs, args.rows, args.cols,
            vsb::derive_seed(args.seed, "flow"));
        std::vector<std::vector<std::vector<double>>> real_flows, ai_flows;
        for (const auto& p : pairs) {
            real_flows.push_back(p.real);
            ai_flows.push_back(p.ai);
        }
        summary = vsb::flow_summary(real_flows, ai_flows, args.bins);
    } else {
        if (args.real_dir.empty() || args.ai_dir.empty()) {
            throw vsb::InputError("flow: provide --real-dir and --ai-dir, or --synth-pairs");
        }
        const auto real_flows = load_flow_dir(args.real_dir);
        const auto ai_flows = load_flow_dir(args.ai_dir);
        summary = vsb::flow_summary(real_flows, ai_flows, args.bins);
    }
    vsb::write_flow_summary_json(summary, (dir / "flow.json").string());
    vsb::write_flow_summary_csv(summary, (dir / "flow.csv").string());

    vsb::write_manifest("flow",
                        {{"real_dir", args.real_dir},
                         {"ai_dir", args.ai_dir},
                         {"synth_pairs", std::to_string(args.synth_pairs)},
                         {"bins", std::to_string(args.bins)},
                         {"out", args.out}},
                        args.seed, (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

void run_report(const std::string& deltas_path, const std::string& scatter_path,
                const std::string& out) {
    if (deltas_path.empty() == scatter_path.empty()) {
        throw vsb::InputError("report: provide exactly one of --deltas or --scatter");
    }
    if (!deltas_path.empty()) {
        const auto report = vsb::load_delta_json(deltas_path);
        vsb::write_delta_svg(report, out);
        return;
    }
    std::ifstream in(scatter_path);
    if (!in) {
        throw vsb::InputError("cannot open file: " + scatter_path);
    }
    vsb::Projection2D projection;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line_no == 1 && line.rfind("id,", 0) == 0)) continue;
        std::stringstream ss(line);
        vsb::Projection2D::Point p;
        std::string x_str, y_str;
        if (!std::getline(ss, p.id, ',') || !std::getline(ss, p.label, ',') ||
            !std::getline(ss, x_str, ',') || !std::getline(ss, y_str)) {
            throw vsb::InputError("parse error at " + scatter_path + ":" +
                                  std::to_string(line_no));
        }
        p.x = std::stod(x_str);
        p.y = std::stod(y_str);
        projection.points.push_back(std::move(p));
    }
    if (projection.points.empty()) {
        throw vsb::InputError(scatter_path + ": no points");
    }
    vsb::write_scatter_svg(projection, out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"source-bias analysis for text-to-video retrieval embeddings"};
    app.set_version_flag("--version", vsb::kVersion);
    app.set_config("--config", "", "flat key=value config file; flags override");
    app.require_subcommand(1);

    // metrics
    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "rank corpora and compute bias deltas");
    add_corpus_options(metrics, metrics_args.corpus);
    metrics->add_option("--pool", metrics_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    metrics->add_option("--frames", metrics_args.frames, "frames sampled per video");
    metrics->add_option("--frame-index", metrics_args.frame_index,
                        "single-frame index (-1 = middle)");
    metrics->add_option("--seed", metrics_args.seed, "seed");
    metrics->add_option("--seeds", metrics_args.n_seeds, "interleaving draws to average");
    metrics->add_option("--params", metrics_args.params_path, "scorer params JSON");
    metrics->add_option("--out", metrics_args.out, "output directory");
    metrics->callback([&]() { run_metrics_like(metrics_args, "metrics", ""); });

    // ablate
    MetricsArgs ablate_args;
    ablate_args.pool = "positional-ramp";
    std::string ablate_mode = "shuffle-all";
    auto* ablate = app.add_subcommand("ablate", "frame-order and single-frame ablations");
    add_corpus_options(ablate, ablate_args.corpus);
    ablate->add_option("--mode", ablate_mode, "ablation mode")
        ->check(CLI::IsMember({"shuffle-all", "shuffle-ai", "reverse", "single-frame"}))
        ->required();
    ablate->add_option("--pool", ablate_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    ablate->add_option("--frames", ablate_args.frames, "frames sampled per video");
    ablate->add_option("--frame-index", ablate_args.frame_index,
                       "single-frame index (-1 = middle)");
    ablate->add_option("--seed", ablate_args.seed, "seed");
    ablate->add_option("--seeds", ablate_args.n_seeds, "interleaving draws to average");
    ablate->add_option("--out", ablate_args.out, "output directory");
    ablate->callback([&]() { run_metrics_like(ablate_args, "ablate", ablate_mode); });

    // interleave
    std::string il_real, il_ai, il_out = "out";
    uint64_t il_seed = 42;
    size_t il_seeds = 1;
    auto* interleave =
        app.add_subcommand("interleave", "simulate mixed retrieval from rank tables");
    interleave->add_option("--real-ranks", il_real, "real rank CSV")->required();
    interleave->add_option("--ai-ranks", il_ai, "AI rank CSV")->required();
    interleave->add_option("--seed", il_seed, "seed");
    interleave->add_option("--seeds", il_seeds, "interleaving draws to average");
    interleave->add_option("--out", il_out, "output directory");
    interleave->callback([&]() { run_interleave(il_real, il_ai, il_seed, il_seeds, il_out); });

    // train-debias
    TrainArgs train_args;
    auto* train = app.add_subcommand("train-debias", "train the debiased toy scorer");
    add_corpus_options(train, train_args.corpus);
    train->add_option("--epochs", train_args.config.epochs, "training epochs");
    train->add_option("--lr", train_args.config.learning_rate, "Adam learning rate");
    train->add_option("--batch-size", train_args.config.batch_size, "batch size");
    train->add_option("--rho", train_args.config.mix_ratio, "AI share of training positives");
    train->add_option("--lambda", train_args.config.debias_weight, "debias term weight");
    train->add_option("--tau", train_args.config.tau, "scorer temperature");
    train->add_option("--holdout", train_args.config.holdout_fraction,
                      "held-out query fraction for the history trace");
    train->add_option("--pool", train_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    train->add_option("--frames", train_args.config.frames, "frames sampled per video");
    train->add_option("--frame-index", train_args.frame_index,
                      "single-frame index (-1 = middle)");
    train->add_option("--seed", train_args.seed, "seed");
    train->add_option("--out", train_args.out, "output directory");
    train->callback([&]() { run_train(train_args); });

    // pvector
    auto* pvector = app.add_subcommand("pvector", "p-vector extraction and analysis");
    pvector->require_subcommand(1);

    PvExtractArgs pv_extract_args;
    auto* pv_extract = pvector->add_subcommand("extract", "extract p = h^d - h per video");
    pv_extract->add_option("--original", pv_extract_args.original_path,
                           "original scorer params JSON (default: identity)");
    pv_extract->add_option("--debiased", pv_extract_args.debiased_path,
                           "debiased scorer params JSON")
        ->required();
    pv_extract->add_option("--corpus", pv_extract_args.corpus_path, "corpus JSONL")->required();
    pv_extract->add_option("--pool", pv_extract_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    pv_extract->add_option("--frames", pv_extract_args.frames, "frames sampled per video");
    pv_extract->add_option("--frame-index", pv_extract_args.frame_index,
                           "single-frame index (-1 = middle)");
    pv_extract->add_option("--space", pv_extract_args.space, "embedding space for h")
        ->check(CLI::IsMember({"raw", "projected"}));
    pv_extract->add_flag("--shuffled", pv_extract_args.shuffled,
                         "shuffle frame order first (p_random variant)");
    pv_extract->add_option("--seed", pv_extract_args.seed, "seed");
    pv_extract->add_option("--out", pv_extract_args.out, "output directory");
    pv_extract->callback([&]() { run_pvector_extract(pv_extract_args); });

    PvApplyArgs pv_apply_args;
    auto* pv_apply =
        pvector->add_subcommand("apply", "shift real embeddings by p_avg and re-evaluate");
    add_corpus_options(pv_apply, pv_apply_args.corpus);
    pv_apply->add_option("--pvectors", pv_apply_args.pvectors_path, "pvectors JSONL")
        ->required();
    pv_apply->add_option("--pool", pv_apply_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    pv_apply->add_option("--frames", pv_apply_args.frames, "frames sampled per video");
    pv_apply->add_option("--frame-index", pv_apply_args.frame_index,
                         "single-frame index (-1 = middle)");
    pv_apply->add_option("--seed", pv_apply_args.seed, "seed");
    pv_apply->add_option("--out", pv_apply_args.out, "output directory");
    pv_apply->callback([&]() { run_pvector_apply(pv_apply_args); });

    PvStatsArgs pv_stats_args;
    auto* pv_stats =
        pvector->add_subcommand("stats", "cluster statistics and 2-D projection");
    pv_stats->add_option("--pvectors", pv_stats_args.pvectors_path, "pvectors JSONL")
        ->required();
    pv_stats->add_option("--corpus", pv_stats_args.corpus_path, "corpus JSONL for raw side")
        ->required();
    pv_stats->add_option("--pool", pv_stats_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    pv_stats->add_option("--frames", pv_stats_args.frames, "frames sampled per video");
    pv_stats->add_option("--frame-index", pv_stats_args.frame_index,
                         "single-frame index (-1 = middle)");
    pv_stats->add_option("--seed", pv_stats_args.seed, "seed");
    pv_stats->add_option("--out", pv_stats_args.out, "output directory");
    pv_stats->callback([&]() { run_pvector_stats(pv_stats_args); });

    // synth gen
    auto* synth = app.add_subcommand("synth", "synthetic corpus tools");
    synth->require_subcommand(1);
    vsb::SynthConfig synth_cfg;
    uint64_t synth_seed = 42;
    std::string synth_out = "out";
    auto* synth_gen = synth->add_subcommand("gen", "generate a biased corpus pair");
    synth_gen->add_option("--n", synth_cfg.n_items, "items per corpus");
    synth_gen->add_option("--dim", synth_cfg.dim, "embedding dimension");
    synth_gen->add_option("--frames", synth_cfg.frames, "frames per video");
    synth_gen->add_option("--alpha", synth_cfg.alpha, "query-signal share");
    synth_gen->add_option("--beta", synth_cfg.beta, "AI bias magnitude");
    synth_gen->add_option("--gamma", synth_cfg.gamma, "query bias leak");
    synth_gen->add_option("--sigma", synth_cfg.noise_sigma, "frame noise sigma");
    synth_gen->add_option("--drift", synth_cfg.drift, "temporal drift magnitude");
    synth_gen->add_option("--seed", synth_seed, "seed");
    synth_gen->add_option("--out", synth_out, "output directory");
    synth_gen->callback([&]() { run_synth_gen(synth_cfg, synth_seed, synth_out); });

    // ttest
    TTestArgs ttest_args;
    auto* ttest = app.add_subcommand("ttest", "paired t-test of text-real vs text-AI scores");
    add_corpus_options(ttest, ttest_args.corpus);
    ttest->add_option("--pool", ttest_args.pool, "pooling mode")
        ->check(CLI::IsMember({"uniform-mean", "positional-ramp", "single-frame"}));
    ttest->add_option("--frames", ttest_args.frames, "frames sampled per video");
    ttest->add_option("--frame-index", ttest_args.frame_index,
                      "single-frame index (-1 = middle)");
    ttest->add_option("--seed", ttest_args.seed, "seed");
    ttest->add_option("--out", ttest_args.out, "output directory");
    ttest->callback([&]() { run_ttest(ttest_args); });

    // flow
    FlowArgs flow_args;
    auto* flow = app.add_subcommand("flow", "optical-flow entropy summary");
    flow->add_option("--real-dir", flow_args.real_dir, "directory of real flow CSVs");
    flow->add_option("--ai-dir", flow_args.ai_dir, "directory of AI flow CSVs");
    flow->add_option("--synth-pairs", flow_args.synth_pairs,
                     "generate this many synthetic pairs instead");
    flow->add_option("--rows", flow_args.rows, "synthetic grid rows");
    flow->add_option("--cols", flow_args.cols, "synthetic grid cols");
    flow->add_option("--bins", flow_args.bins, "histogram bins");
    flow->add_option("--seed", flow_args.seed, "seed");
    flow->add_option("--out", flow_args.out, "output directory");
    flow->callback([&]() { run_flow(flow_args); });

    // report
    std::string report_deltas, report_scatter, report_out = "chart.svg";
    auto* report = app.add_subcommand("report", "render SVG charts from report files");
    report->add_option("--deltas", report_deltas, "deltas.json to chart");
    report->add_option("--scatter", report_scatter, "projection.csv to chart");
    report->add_option("--out", report_out, "output SVG path");
    report->callback([&]() { run_report(report_deltas, report_scatter, report_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    } catch (const vsb::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
