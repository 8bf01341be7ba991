#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "vsb/embedding_store.hpp"
#include "vsb/error.hpp"
#include "vsb/synth.hpp"

using namespace vsb;
using vsb_test::TempDir;
using vsb_test::write_file;

TEST_CASE("load_corpus reads a small valid file") {
    TempDir dir("store");
    write_file(dir.file("c.jsonl"),
               R"({"id": "v1", "source": "real", "frames": [[1,0,0,0],[0,1,0,0],[0,0,1,0]]})"
               "\n"
               R"({"id": "v2", "source": "real", "frames": [[1,1,0,0],[0,1,1,0],[1,0,0,1]]})"
               "\n");
    const auto corpus = load_corpus(dir.file("c.jsonl"));
    CHECK(corpus.videos.size() == 2);
    CHECK(corpus.dim == 4);
    CHECK(corpus.fixed_frames == 3);
    CHECK(corpus.videos[0].id == "v1");
    CHECK(corpus.videos[1].id == "v2");
    CHECK(corpus.videos[1].frames[2][3] == 1.0);
}

TEST_CASE("load_corpus rejects a dimension mismatch and names the video") {
    TempDir dir("store");
    write_file(dir.file("c.jsonl"),
               R"({"id": "v1", "source": "real", "frames": [[1,0,0,0]]})"
               "\n"
               R"({"id": "v2", "source": "ai", "frames": [[1,0,0]]})"
               "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir.file("c.jsonl")),
                         doctest::Contains("v2"), InputError);
}

TEST_CASE("load_corpus rejects duplicates, bad JSON, and empty input") {
    TempDir dir("store");

    write_file(dir.file("dup.jsonl"),
               R"({"id": "v1", "source": "real", "frames": [[1,0]]})"
               "\n"
               R"({"id": "v1", "source": "ai", "frames": [[0,1]]})"
               "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir.file("dup.jsonl")),
                         doctest::Contains("duplicate"), InputError);

    write_file(dir.file("bad.jsonl"),
               R"({"id": "v1", "source": "real", "frames": [[1,0]]})"
               "\n"
               "{not json\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir.file("bad.jsonl")), doctest::Contains(":2"),
                         InputError);

    write_file(dir.file("empty.jsonl"), "");
    CHECK_THROWS_AS(load_corpus(dir.file("empty.jsonl")), InputError);
    CHECK_THROWS_AS(load_corpus(dir.file("does_not_exist.jsonl")), InputError);

    write_file(dir.file("src.jsonl"),
               R"({"id": "v1", "source": "fake", "frames": [[1,0]]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("src.jsonl")), InputError);

    write_file(dir.file("noframes.jsonl"), R"({"id": "v1", "source": "real", "frames": []})"
                                           "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("noframes.jsonl")), InputError);
}

TEST_CASE("variable frame counts load with an unset fixed policy") {
    TempDir dir("store");
    write_file(dir.file("c.jsonl"),
               R"({"id": "v1", "source": "real", "frames": [[1,0],[0,1]]})"
               "\n"
               R"({"id": "v2", "source": "real", "frames": [[1,1]]})"
               "\n");
    const auto corpus = load_corpus(dir.file("c.jsonl"));
    CHECK_FALSE(corpus.fixed_frames.has_value());
}

TEST_CASE("save then load round-trips a generated corpus bit-exactly") {
    SynthConfig cfg;
    cfg.n_items = 1000;
    cfg.dim = 8;
    cfg.frames = 3;
    cfg.seed = 7;
    const auto data = generate_synthetic(cfg);

    TempDir dir("roundtrip");
    save_corpus(data.ai, dir.file("ai.jsonl"));
    const auto loaded = load_corpus(dir.file("ai.jsonl"));

    REQUIRE(loaded.videos.size() == data.ai.videos.size());
    CHECK(loaded.dim == data.ai.dim);
    for (size_t i = 0; i < loaded.videos.size(); ++i) {
        CHECK(loaded.videos[i].id == data.ai.videos[i].id);
        CHECK(loaded.videos[i].source == data.ai.videos[i].source);
        REQUIRE(loaded.videos[i].frames.size() == data.ai.videos[i].frames.size());
        for (size_t f = 0; f < loaded.videos[i].frames.size(); ++f) {
            for (size_t k = 0; k < loaded.videos[i].frames[f].size(); ++k) {
                // bit-exact: JSONL stores round-trippable decimal text
                CHECK(loaded.videos[i].frames[f][k] == data.ai.videos[i].frames[f][k]);
            }
        }
    }

    save_queries(data.queries, dir.file("q.jsonl"));
    const auto queries = load_queries(dir.file("q.jsonl"));
    REQUIRE(queries.size() == data.queries.size());
    for (size_t i = 0; i < queries.size(); ++i) {
        CHECK(queries[i].id == data.queries[i].id);
        CHECK(queries[i].embedding == data.queries[i].embedding);
    }

    save_relevance(data.rel, dir.file("rel.jsonl"));
    const auto rel = load_relevance(dir.file("rel.jsonl"));
    CHECK(rel.pairs == data.rel.pairs);
}

TEST_CASE("load_queries validates shape") {
    TempDir dir("queries");
    write_file(dir.file("q.jsonl"), R"({"id": "q1", "embedding": [1,0]})"
                                    "\n"
                                    R"({"id": "q2", "embedding": [1,0,0]})"
                                    "\n");
    CHECK_THROWS_WITH_AS(load_queries(dir.file("q.jsonl")), doctest::Contains("q2"),
                         InputError);

    write_file(dir.file("empty.jsonl"), "");
    CHECK_THROWS_WITH_AS(load_queries(dir.file("empty.jsonl")),
                         doctest::Contains("empty"), InputError);
}

TEST_CASE("join_triplets pairs by shared id in query order") {
    Corpus real;
    real.dim = 2;
    real.videos.push_back(vsb_test::make_video("v1", Source::real, {{1, 0}}));
    Corpus ai;
    ai.dim = 2;
    ai.videos.push_back(vsb_test::make_video("v1", Source::ai, {{0, 1}}));
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "v1";

    const auto triplets = join_triplets(real, ai, queries, rel);
    REQUIRE(triplets.size() == 1);
    CHECK(triplets[0].real_index == 0);
    CHECK(triplets[0].ai_index == 0);
    CHECK(triplets[0].query_index == 0);
}

TEST_CASE("join_triplets reports missing counterparts") {
    Corpus real;
    real.dim = 2;
    real.videos.push_back(vsb_test::make_video("v9", Source::real, {{1, 0}}));
    Corpus ai;
    ai.dim = 2;
    ai.videos.push_back(vsb_test::make_video("v1", Source::ai, {{0, 1}}));
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}};
    RelevanceMap rel;
    rel.pairs["q1"] = "v9";

    CHECK_THROWS_WITH_AS(join_triplets(real, ai, queries, rel), doctest::Contains("v9"),
                         InputError);
}

TEST_CASE("join_triplets matches a set-intersection oracle on 100 ids") {
    SynthConfig cfg;
    cfg.n_items = 100;
    cfg.dim = 4;
    cfg.frames = 2;
    cfg.seed = 3;
    const auto data = generate_synthetic(cfg);

    const auto triplets = join_triplets(data.real, data.ai, data.queries, data.rel);
    CHECK(triplets.size() == data.queries.size());

    // Oracle: brute-force id intersection of the two corpora.
    std::set<std::string> real_ids, ai_ids, joined;
    for (const auto& v : data.real.videos) real_ids.insert(v.id);
    for (const auto& v : data.ai.videos) ai_ids.insert(v.id);
    std::set<std::string> expected;
    for (const auto& id : real_ids) {
        if (ai_ids.contains(id)) expected.insert(id);
    }
    for (const auto& t : triplets) {
        joined.insert(data.real.videos[t.real_index].id);
        CHECK(data.real.videos[t.real_index].id == data.ai.videos[t.ai_index].id);
    }
    CHECK(joined == expected);
}

TEST_CASE("validate_relevance demands totality and known ids") {
    Corpus corpus;
    corpus.dim = 2;
    corpus.videos.push_back(vsb_test::make_video("v1", Source::real, {{1, 0}}));
    std::vector<QueryRecord> queries = {{"q1", {1, 0}}, {"q2", {0, 1}}};

    RelevanceMap rel;
    rel.pairs["q1"] = "v1";
    CHECK_THROWS_WITH_AS(validate_relevance(queries, corpus, rel),
                         doctest::Contains("q2"), InputError);

    rel.pairs["q2"] = "v7";
    CHECK_THROWS_WITH_AS(validate_relevance(queries, corpus, rel),
                         doctest::Contains("v7"), InputError);

    rel.pairs["q2"] = "v1";
    CHECK_NOTHROW(validate_relevance(queries, corpus, rel));
}
