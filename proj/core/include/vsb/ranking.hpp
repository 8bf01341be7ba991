#ifndef VSB_RANKING_HPP
#define VSB_RANKING_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vsb/embedding_store.hpp"
#include "vsb/rng.hpp"

namespace vsb {

enum class PoolMode { uniform_mean, positional_ramp, single_frame };

const char* to_string(PoolMode m);
PoolMode pool_mode_from_string(const std::string& s);

/// Pooling recipe. frame_index is only read in single_frame mode; a
/// negative value means "middle frame of the sampled sequence".
struct PoolSpec {
    PoolMode mode = PoolMode::uniform_mean;
    int frame_index = -1;

    static PoolSpec uniform() { return {PoolMode::uniform_mean, -1}; }
    static PoolSpec ramp() { return {PoolMode::positional_ramp, -1}; }
    static PoolSpec single(int k = -1) { return {PoolMode::single_frame, k}; }
};

/// L2-normalized video-level embedding.
struct PooledEmbedding {
    std::string video_id;
    Source source = Source::real;
    std::vector<double> vec;
};

/// 1-based rank of the relevant item per query over a candidate pool of
/// `corpus_size` videos.
struct RankTable {
    std::map<std::string, uint32_t> ranks;
    size_t corpus_size = 0;
};

/// Uniformly resample a frame sequence to exactly f frames: index
/// round(j*(n-1)/(f-1)) for j = 0..f-1; the middle frame floor(n/2) when
/// f == 1. Frames repeat when n < f.
VideoRecord sample_frames(const VideoRecord& video, size_t f);

/// Pool a frame sequence into a unit vector.
///   uniform_mean:    mean of frames, then normalize
///   positional_ramp: weights w_j = 2j / (f(f+1)), j = 1..f, then normalize
///   single_frame(k): normalize(frames[k])
PooledEmbedding pool(const VideoRecord& video, const PoolSpec& spec);

enum class ShuffleMode { identity, reverse, random };

/// Reorder frames. `random` consumes the supplied generator (Fisher-Yates),
/// so the same seed reproduces the same order.
VideoRecord shuffle_frames(const VideoRecord& video, ShuffleMode mode, Rng& rng);

/// sample_frames(f) then pool, for the whole corpus, preserving order.
std::vector<PooledEmbedding> pool_corpus(const Corpus& corpus, const PoolSpec& spec, size_t f);

/// Rank of each query's relevant item within one corpus. Similarity is
/// the dot product of unit vectors; ties break by lexicographic video id
/// so results are deterministic.
RankTable rank_relevant(std::span<const PooledEmbedding> corpus,
                        const std::vector<QueryRecord>& queries,
                        const RelevanceMap& rel);

/// Rank the real and the AI relevant item inside the union pool of both
/// corpora (size 2N). Full ties break by id, then real before ai.
std::pair<RankTable, RankTable> rank_mixed(std::span<const PooledEmbedding> real,
                                           std::span<const PooledEmbedding> ai,
                                           const std::vector<QueryRecord>& queries,
                                           const RelevanceMap& rel);

/// Rank tables are written as CSV "query_id,rank".
void save_rank_table_csv(const RankTable& table, const std::string& path);
RankTable load_rank_table_csv(const std::string& path);

} // namespace vsb

#endif
