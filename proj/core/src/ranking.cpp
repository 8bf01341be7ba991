#include "vsb/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vsb/error.hpp"
#include "vsb/vecmath.hpp"

namespace vsb {

const char* to_string(PoolMode m) {
    switch (m) {
        case PoolMode::uniform_mean: return "uniform-mean";
        case PoolMode::positional_ramp: return "positional-ramp";
        case PoolMode::single_frame: return "single-frame";
    }
    return "?";
}

PoolMode pool_mode_from_string(const std::string& s) {
    if (s == "uniform-mean") return PoolMode::uniform_mean;
    if (s == "positional-ramp") return PoolMode::positional_ramp;
    if (s == "single-frame") return PoolMode::single_frame;
    throw InputError("unknown pooling mode \"" + s + "\"");
}

VideoRecord sample_frames(const VideoRecord& video, size_t f) {
    if (f < 1) {
        throw InputError("sample_frames: f must be >= 1");
    }
    if (video.frames.empty()) {
        throw InputError("sample_frames: video \"" + video.id + "\" has no frames");
    }
    const size_t n = video.frames.size();
    VideoRecord out;
    out.id = video.id;
    out.source = video.source;
    out.frames.reserve(f);
    if (f == 1) {
        out.frames.push_back(video.frames[n / 2]);
        return out;
    }
    for (size_t j = 0; j < f; ++j) {
        const double pos = static_cast<double>(j) * static_cast<double>(n - 1) /
                           static_cast<double>(f - 1);
        const size_t idx = static_cast<size_t>(std::llround(pos));
        out.frames.push_back(video.frames[idx]);
    }
    return out;
}

PooledEmbedding pool(const VideoRecord& video, const PoolSpec& spec) {
    if (video.frames.empty()) {
        throw InputError("pool: video \"" + video.id + "\" has no frames");
    }
    const size_t f = video.frames.size();
    const size_t d = video.frames.front().size();
    std::vector<double> acc(d, 0.0);

    switch (spec.mode) {
        case PoolMode::uniform_mean: {
            for (const auto& frame : video.frames) {
                axpy(1.0 / static_cast<double>(f), frame, acc);
            }
            break;
        }
        case PoolMode::positional_ramp: {
            // w_j = 2j / (f(f+1)), j = 1..f; the weights sum to 1 and grow
            // linearly, so later frames dominate and frame order matters.
            const double denom = static_cast<double>(f) * static_cast<double>(f + 1);
            for (size_t j = 1; j <= f; ++j) {
                axpy(2.0 * static_cast<double>(j) / denom, video.frames[j - 1], acc);
            }
            break;
        }
        case PoolMode::single_frame: {
            size_t k = spec.frame_index < 0 ? f / 2 : static_cast<size_t>(spec.frame_index);
            if (k >= f) {
                throw InputError("pool: single-frame index " + std::to_string(k) +
                                 " out of range for video \"" + video.id + "\" (" +
                                 std::to_string(f) + " frames)");
            }
            acc = video.frames[k];
            break;
        }
    }

    PooledEmbedding out;
    out.video_id = video.id;
    out.source = video.source;
    out.vec = normalized(acc, "video \"" + video.id + "\"");
    return out;
}

VideoRecord shuffle_frames(const VideoRecord& video, ShuffleMode mode, Rng& rng) {
    VideoRecord out = video;
    switch (mode) {
        case ShuffleMode::identity:
            break;
        case ShuffleMode::reverse:
            std::reverse(out.frames.begin(), out.frames.end());
            break;
        case ShuffleMode::random:
            rng.shuffle(out.frames);
            break;
    }
    return out;
}

std::vector<PooledEmbedding> pool_corpus(const Corpus& corpus, const PoolSpec& spec, size_t f) {
    std::vector<PooledEmbedding> out;
    out.reserve(corpus.videos.size());
    for (const auto& video : corpus.videos) {
        out.push_back(pool(sample_frames(video, f), spec));
    }
    return out;
}

namespace {

struct Candidate {
    const PooledEmbedding* emb;
    // real sorts before ai on full ties.
    int source_rank;
};

uint32_t rank_of(const std::vector<Candidate>& pool,
                 std::span<const double> query_unit,
                 const std::string& relevant_id,
                 int relevant_source_rank,
                 const std::string& query_id) {
    double rel_sim = 0.0;
    bool found = false;
    std::vector<double> sims(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
        sims[i] = dot(pool[i].emb->vec, query_unit);
        if (pool[i].emb->video_id == relevant_id && pool[i].source_rank == relevant_source_rank) {
            rel_sim = sims[i];
            found = true;
        }
    }
    if (!found) {
        throw InputError("relevant video \"" + relevant_id + "\" not found for query \"" +
                         query_id + "\"");
    }
    uint32_t rank = 1;
    for (size_t i = 0; i < pool.size(); ++i) {
        const auto& c = pool[i];
        if (c.emb->video_id == relevant_id && c.source_rank == relevant_source_rank) {
            continue;
        }
        if (sims[i] > rel_sim) {
            ++rank;
        } else if (sims[i] == rel_sim) {
            const auto key = std::make_pair(c.emb->video_id, c.source_rank);
            const auto rel_key = std::make_pair(relevant_id, relevant_source_rank);
            if (key < rel_key) {
                ++rank;
            }
        }
    }
    return rank;
}

std::vector<double> unit_query(const QueryRecord& q, size_t dim) {
    if (q.embedding.size() != dim) {
        throw InputError("query \"" + q.id + "\" has dimension " +
                         std::to_string(q.embedding.size()) + ", corpus has " +
                         std::to_string(dim));
    }
    return normalized(q.embedding, "query \"" + q.id + "\"");
}

} // namespace

RankTable rank_relevant(std::span<const PooledEmbedding> corpus,
                        const std::vector<QueryRecord>& queries,
                        const RelevanceMap& rel) {
    if (corpus.empty()) {
        throw InputError("rank_relevant: empty corpus");
    }
    const size_t dim = corpus.front().vec.size();
    std::vector<Candidate> pool;
    pool.reserve(corpus.size());
    for (const auto& e : corpus) {
        pool.push_back(Candidate{&e, 0});
    }

    RankTable table;
    table.corpus_size = corpus.size();
    for (const auto& q : queries) {
        auto it = rel.pairs.find(q.id);
        if (it == rel.pairs.end()) {
            throw InputError("relevance map is missing query \"" + q.id + "\"");
        }
        const auto unit = unit_query(q, dim);
        table.ranks[q.id] = rank_of(pool, unit, it->second, 0, q.id);
    }
    return table;
}

std::pair<RankTable, RankTable> rank_mixed(std::span<const PooledEmbedding> real,
                                           std::span<const PooledEmbedding> ai,
                                           const std::vector<QueryRecord>& queries,
                                           const RelevanceMap& rel) {
    if (real.empty() || ai.empty()) {
        throw InputError("rank_mixed: empty corpus");
    }
    const size_t dim = real.front().vec.size();
    if (ai.front().vec.size() != dim) {
        throw InputError("rank_mixed: corpora have different dimensions");
    }
    std::vector<Candidate> pool;
    pool.reserve(real.size() + ai.size());
    for (const auto& e : real) {
        pool.push_back(Candidate{&e, 0});
    }
    for (const auto& e : ai) {
        pool.push_back(Candidate{&e, 1});
    }

    RankTable mixed_real;
    RankTable mixed_ai;
    mixed_real.corpus_size = pool.size();
    mixed_ai.corpus_size = pool.size();
    for (const auto& q : queries) {
        auto it = rel.pairs.find(q.id);
        if (it == rel.pairs.end()) {
            throw InputError("relevance map is missing query \"" + q.id + "\"");
        }
        const auto unit = unit_query(q, dim);
        mixed_real.ranks[q.id] = rank_of(pool, unit, it->second, 0, q.id);
        mixed_ai.ranks[q.id] = rank_of(pool, unit, it->second, 1, q.id);
    }
    return {std::move(mixed_real), std::move(mixed_ai)};
}

void save_rank_table_csv(const RankTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "query_id,rank\n";
    for (const auto& [qid, rank] : table.ranks) {
        out << qid << ',' << rank << '\n';
    }
}

RankTable load_rank_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    RankTable table;
    std::string line;
    size_t line_no = 0;
    uint32_t max_rank = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("query_id", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": expected \"query_id,rank\"");
        }
        const std::string qid = line.substr(0, comma);
        uint32_t rank = 0;
        try {
            rank = static_cast<uint32_t>(std::stoul(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": bad rank value");
        }
        if (rank < 1) {
            throw InputError(path + ": rank must be >= 1 for query \"" + qid + "\"");
        }
        if (!table.ranks.emplace(qid, rank).second) {
            throw InputError(path + ": duplicate query \"" + qid + "\"");
        }
        max_rank = std::max(max_rank, rank);
    }
    if (table.ranks.empty()) {
        throw InputError(path + ": empty rank table");
    }
    table.corpus_size = max_rank;
    return table;
}

} // namespace vsb
