#ifndef VSB_EMBEDDING_STORE_HPP
#define VSB_EMBEDDING_STORE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vsb {

enum class Source { real, ai };

const char* to_string(Source s);
Source source_from_string(const std::string& s);

/// One video: identity, origin label, and an ordered frame-embedding
/// sequence. All frames share the corpus dimension.
struct VideoRecord {
    std::string id;
    Source source = Source::real;
    std::vector<std::vector<double>> frames;
};

struct QueryRecord {
    std::string id;
    std::vector<double> embedding;
};

/// Ground truth: exactly one relevant video per query (MSR-VTT style).
/// A real video and its AI counterpart share the same id across the two
/// corpora; that shared id is what expresses their correspondence.
struct RelevanceMap {
    std::map<std::string, std::string> pairs; // query_id -> video_id
};

struct Corpus {
    std::vector<VideoRecord> videos;
    size_t dim = 0;
    /// Set when every record has the same frame count, empty otherwise.
    std::optional<size_t> fixed_frames;

    const VideoRecord* find(const std::string& id) const;
};

/// Indexes into the (real corpus, ai corpus, query list) that were joined.
struct TripletRef {
    size_t real_index;
    size_t ai_index;
    size_t query_index;
};

/// Load a corpus from JSONL, one video per line:
///   {"id": "...", "source": "real"|"ai", "frames": [[...], ...]}
/// Rejects parse errors (with line number), duplicate ids, dimension
/// mismatches (naming the offending id), and empty frame lists. Record
/// order is preserved.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

/// Queries, one per line: {"id": "...", "embedding": [...]}
std::vector<QueryRecord> load_queries(const std::string& path);
void save_queries(const std::vector<QueryRecord>& queries, const std::string& path);

/// Relevance pairs, one per line: {"query_id": "...", "video_id": "..."}
RelevanceMap load_relevance(const std::string& path);
void save_relevance(const RelevanceMap& rel, const std::string& path);

/// Check that rel is total over `queries` and every referenced video id
/// exists in `corpus`. Throws InputError otherwise.
void validate_relevance(const std::vector<QueryRecord>& queries,
                        const Corpus& corpus,
                        const RelevanceMap& rel);

/// One (real video, AI video, query) triplet per query, in query order.
/// Every query's relevant id must exist in both corpora; otherwise the
/// error lists all unmatched ids.
std::vector<TripletRef> join_triplets(const Corpus& real,
                                      const Corpus& ai,
                                      const std::vector<QueryRecord>& queries,
                                      const RelevanceMap& rel);

} // namespace vsb

#endif
