#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "test_util.hpp"
#include "vsb/error.hpp"
#include "vsb/ranking.hpp"
#include "vsb/rng.hpp"
#include "vsb/synth.hpp"
#include "vsb/vecmath.hpp"

using namespace vsb;
using vsb_test::make_embedding;
using vsb_test::make_video;

namespace {

std::vector<std::vector<double>> indexed_frames(size_t n) {
    std::vector<std::vector<double>> frames;
    for (size_t i = 0; i < n; ++i) {
        frames.push_back({static_cast<double>(i), 1.0});
    }
    return frames;
}

/// Independent O(N log N) oracle: full sort of the candidate pool by
/// (similarity desc, id asc, source asc), rank = position of the
/// relevant item.
uint32_t oracle_rank(const std::vector<PooledEmbedding>& pool,
                     const std::vector<int>& source_ranks,
                     std::span<const double> query_unit,
                     const std::string& relevant_id,
                     int relevant_source) {
    std::vector<std::tuple<double, std::string, int>> keyed;
    for (size_t i = 0; i < pool.size(); ++i) {
        keyed.emplace_back(-dot(pool[i].vec, query_unit), pool[i].video_id, source_ranks[i]);
    }
    std::sort(keyed.begin(), keyed.end());
    for (size_t i = 0; i < keyed.size(); ++i) {
        if (std::get<1>(keyed[i]) == relevant_id && std::get<2>(keyed[i]) == relevant_source) {
            return static_cast<uint32_t>(i + 1);
        }
    }
    FAIL("relevant item missing from oracle pool");
    return 0;
}

} // namespace

TEST_CASE("sample_frames keeps all frames when f equals n") {
    const auto v = make_video("v", Source::real, indexed_frames(10));
    const auto sampled = sample_frames(v, 10);
    CHECK(sampled.frames == v.frames);
}

TEST_CASE("sample_frames picks round(j*(n-1)/(f-1)) indices") {
    const auto v = make_video("v", Source::real, indexed_frames(9));
    const auto sampled = sample_frames(v, 3);
    REQUIRE(sampled.frames.size() == 3);
    CHECK(sampled.frames[0][0] == 0.0);
    CHECK(sampled.frames[1][0] == 4.0);
    CHECK(sampled.frames[2][0] == 8.0);
}

TEST_CASE("sample_frames repeats frames when n < f") {
    const auto one = make_video("v", Source::real, indexed_frames(1));
    const auto sampled = sample_frames(one, 3);
    REQUIRE(sampled.frames.size() == 3);
    for (const auto& f : sampled.frames) {
        CHECK(f[0] == 0.0);
    }

    // n=3, f=5: positions round(j*2/4) -> 0, 1, 1, 2, 2
    const auto three = make_video("v", Source::real, indexed_frames(3));
    const auto five = sample_frames(three, 5);
    REQUIRE(five.frames.size() == 5);
    CHECK(five.frames[0][0] == 0.0);
    CHECK(five.frames[1][0] == 1.0);
    CHECK(five.frames[2][0] == 1.0);
    CHECK(five.frames[3][0] == 2.0);
    CHECK(five.frames[4][0] == 2.0);
}

TEST_CASE("sample_frames with f=1 picks the middle frame") {
    const auto v = make_video("v", Source::real, indexed_frames(4));
    const auto sampled = sample_frames(v, 1);
    REQUIRE(sampled.frames.size() == 1);
    CHECK(sampled.frames[0][0] == 2.0); // floor(4/2)
}

TEST_CASE("uniform-mean pooling averages then normalizes") {
    const auto v = make_video("v", Source::real, {{1, 0}, {0, 1}});
    const auto pooled = pool(v, PoolSpec::uniform());
    CHECK(pooled.vec[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pooled.vec[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("positional-ramp pooling weights later frames more") {
    const auto v = make_video("v", Source::real, {{1, 0}, {0, 1}});
    const auto pooled = pool(v, PoolSpec::ramp());
    // weights 1/3 and 2/3, then normalize: (1, 2)/sqrt(5)
    CHECK(pooled.vec[0] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(pooled.vec[1] == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(pooled.vec[0] == doctest::Approx(0.4472).epsilon(1e-4));
    CHECK(pooled.vec[1] == doctest::Approx(0.8944).epsilon(1e-4));
}

TEST_CASE("single-frame pooling reads exactly one frame") {
    const auto v = make_video("v", Source::real, {{2, 0}, {0, 3}, {5, 5}});
    const auto first = pool(v, PoolSpec::single(0));
    CHECK(first.vec[0] == 1.0);
    CHECK(first.vec[1] == 0.0);

    // default index is the middle frame
    const auto mid = pool(v, PoolSpec::single());
    CHECK(mid.vec[1] == 1.0);

    CHECK_THROWS_AS(pool(v, PoolSpec::single(3)), InputError);
}

TEST_CASE("pooling a zero mean raises a degenerate-embedding error naming the video") {
    const auto v = make_video("vz", Source::real, {{1, 0}, {-1, 0}});
    CHECK_THROWS_WITH_AS(pool(v, PoolSpec::uniform()), doctest::Contains("vz"), InputError);
}

TEST_CASE("shuffle_frames reverse flips the order") {
    const auto v = make_video("v", Source::real, indexed_frames(3));
    Rng rng(1);
    const auto rev = shuffle_frames(v, ShuffleMode::reverse, rng);
    CHECK(rev.frames[0][0] == 2.0);
    CHECK(rev.frames[1][0] == 1.0);
    CHECK(rev.frames[2][0] == 0.0);
}

TEST_CASE("random shuffle is deterministic for a fixed seed") {
    const auto v = make_video("v", Source::real, indexed_frames(12));
    Rng rng_a(99);
    Rng rng_b(99);
    const auto a = shuffle_frames(v, ShuffleMode::random, rng_a);
    const auto b = shuffle_frames(v, ShuffleMode::random, rng_b);
    CHECK(a.frames == b.frames);
}

TEST_CASE("uniform-mean pooling is invariant under any frame permutation") {
    Rng gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        VideoRecord v;
        v.id = "v";
        for (int f = 0; f < 8; ++f) {
            std::vector<double> frame(6);
            for (auto& x : frame) x = gen.next_gaussian();
            v.frames.push_back(frame);
        }
        Rng shuffle_rng(trial);
        const auto shuffled = shuffle_frames(v, ShuffleMode::random, shuffle_rng);
        const auto a = pool(v, PoolSpec::uniform());
        const auto b = pool(shuffled, PoolSpec::uniform());
        for (size_t k = 0; k < a.vec.size(); ++k) {
            CHECK(std::abs(a.vec[k] - b.vec[k]) <= 1e-12);
        }
    }
}

TEST_CASE("positional-ramp pooling is order sensitive") {
    Rng gen(17);
    for (int trial = 0; trial < 20; ++trial) {
        VideoRecord v;
        v.id = "v";
        for (int f = 0; f < 6; ++f) {
            std::vector<double> frame(4);
            for (auto& x : frame) x = gen.next_gaussian();
            v.frames.push_back(frame);
        }
        Rng unused(0);
        const auto reversed = shuffle_frames(v, ShuffleMode::reverse, unused);
        const auto a = pool(v, PoolSpec::ramp());
        const auto b = pool(reversed, PoolSpec::ramp());
        double diff = 0.0;
        for (size_t k = 0; k < a.vec.size(); ++k) {
            diff = std::max(diff, std::abs(a.vec[k] - b.vec[k]));
        }
        CHECK(diff > 1e-9);
    }
}

TEST_CASE("single-frame pooling depends only on the chosen frame") {
    auto v = make_video("v", Source::real, {{1, 2}, {3, 4}, {5, 6}});
    const auto before = pool(v, PoolSpec::single(1));
    v.frames[0] = {9, 9};
    v.frames[2] = {-7, 2};
    const auto after = pool(v, PoolSpec::single(1));
    CHECK(before.vec == after.vec);
}

TEST_CASE("rank_relevant on trivial corpora") {
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "v1";

    std::vector<PooledEmbedding> one = {make_embedding("v1", Source::real, {1, 0})};
    CHECK(rank_relevant(one, queries, rel).ranks.at("q1") == 1);

    std::vector<PooledEmbedding> two = {make_embedding("v1", Source::real, {1, 0}),
                                        make_embedding("v2", Source::real, {0, 1})};
    CHECK(rank_relevant(two, queries, rel).ranks.at("q1") == 1);

    rel.pairs["q1"] = "v9";
    CHECK_THROWS_WITH_AS(rank_relevant(two, queries, rel), doctest::Contains("q1"),
                         InputError);
}

TEST_CASE("equal similarities break ties by lexicographic id") {
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "vb";
    std::vector<PooledEmbedding> pool_ = {make_embedding("vb", Source::real, {1, 0}),
                                          make_embedding("va", Source::real, {1, 0}),
                                          make_embedding("vc", Source::real, {1, 0})};
    // va < vb < vc, all with similarity 1
    CHECK(rank_relevant(pool_, queries, rel).ranks.at("q1") == 2);
}

TEST_CASE("rank_relevant matches the sort-based oracle on a 50-video corpus") {
    SynthConfig cfg;
    cfg.n_items = 50;
    cfg.dim = 16;
    cfg.frames = 4;
    cfg.seed = 11;
    const auto data = generate_synthetic(cfg);
    const auto pooled = pool_corpus(data.real, PoolSpec::uniform(), 4);

    const auto table = rank_relevant(pooled, data.queries, data.rel);
    std::vector<int> zeros(pooled.size(), 0);
    std::vector<PooledEmbedding> pool_copy(pooled.begin(), pooled.end());
    for (const auto& q : data.queries) {
        const auto unit = normalized(q.embedding, "q");
        const auto expected =
            oracle_rank(pool_copy, zeros, unit, data.rel.pairs.at(q.id), 0);
        CHECK(table.ranks.at(q.id) == expected);
        CHECK(table.ranks.at(q.id) >= 1);
        CHECK(table.ranks.at(q.id) <= pooled.size());
    }
}

TEST_CASE("rank_mixed on a single pair puts the more similar item first") {
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "v1";
    std::vector<PooledEmbedding> real = {make_embedding("v1", Source::real, {1, 0})};
    std::vector<PooledEmbedding> ai = {
        make_embedding("v1", Source::ai, {std::sqrt(0.5), std::sqrt(0.5)})};

    const auto [mixed_real, mixed_ai] = rank_mixed(real, ai, queries, rel);
    CHECK(mixed_real.ranks.at("q1") == 1);
    CHECK(mixed_ai.ranks.at("q1") == 2);
    CHECK(mixed_real.corpus_size == 2);
}

TEST_CASE("identical embeddings rank real before ai") {
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "v1";
    std::vector<PooledEmbedding> real = {make_embedding("v1", Source::real, {1, 0})};
    std::vector<PooledEmbedding> ai = {make_embedding("v1", Source::ai, {1, 0})};

    const auto [mixed_real, mixed_ai] = rank_mixed(real, ai, queries, rel);
    CHECK(mixed_real.ranks.at("q1") == 1);
    CHECK(mixed_ai.ranks.at("q1") == 2);
}

TEST_CASE("rank_mixed matches the sort-based oracle over the 100-item pool") {
    SynthConfig cfg;
    cfg.n_items = 50;
    cfg.dim = 16;
    cfg.frames = 4;
    cfg.seed = 13;
    const auto data = generate_synthetic(cfg);
    const auto pooled_real = pool_corpus(data.real, PoolSpec::uniform(), 4);
    const auto pooled_ai = pool_corpus(data.ai, PoolSpec::uniform(), 4);

    const auto [mixed_real, mixed_ai] = rank_mixed(pooled_real, pooled_ai, data.queries, data.rel);

    std::vector<PooledEmbedding> union_pool;
    std::vector<int> source_ranks;
    for (const auto& e : pooled_real) {
        union_pool.push_back(e);
        source_ranks.push_back(0);
    }
    for (const auto& e : pooled_ai) {
        union_pool.push_back(e);
        source_ranks.push_back(1);
    }
    for (const auto& q : data.queries) {
        const auto unit = normalized(q.embedding, "q");
        const auto& vid = data.rel.pairs.at(q.id);
        CHECK(mixed_real.ranks.at(q.id) == oracle_rank(union_pool, source_ranks, unit, vid, 0));
        CHECK(mixed_ai.ranks.at(q.id) == oracle_rank(union_pool, source_ranks, unit, vid, 1));
        CHECK(mixed_real.ranks.at(q.id) != mixed_ai.ranks.at(q.id));
        CHECK(mixed_real.ranks.at(q.id) >= 1);
        CHECK(mixed_real.ranks.at(q.id) <= 100);
        CHECK(mixed_ai.ranks.at(q.id) <= 100);
    }
}

TEST_CASE("rank tables round-trip through CSV") {
    RankTable table;
    table.corpus_size = 40;
    table.ranks = {{"q1", 3}, {"q2", 40}, {"q3", 1}};
    vsb_test::TempDir dir("ranks");
    save_rank_table_csv(table, dir.file("r.csv"));
    const auto loaded = load_rank_table_csv(dir.file("r.csv"));
    CHECK(loaded.ranks == table.ranks);
    CHECK(loaded.corpus_size == 40); // inferred from the max rank
}
