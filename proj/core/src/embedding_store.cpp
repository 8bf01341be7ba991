#include "vsb/embedding_store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vsb/error.hpp"

namespace vsb {

using nlohmann::json;

const char* to_string(Source s) {
    return s == Source::real ? "real" : "ai";
}

Source source_from_string(const std::string& s) {
    if (s == "real") return Source::real;
    if (s == "ai") return Source::ai;
    throw InputError("unknown source label \"" + s + "\" (expected \"real\" or \"ai\")");
}

const VideoRecord* Corpus::find(const std::string& id) const {
    for (const auto& v : videos) {
        if (v.id == id) return &v;
    }
    return nullptr;
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    return out;
}

json parse_line(const std::string& line, const std::string& path, size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                         ": " + e.what());
    }
}

std::vector<double> read_vector(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) {
        throw InputError(where + ": expected a non-empty numeric array");
    }
    std::vector<double> v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) {
            throw InputError(where + ": non-numeric embedding value");
        }
        v.push_back(x.get<double>());
    }
    return v;
}

} // namespace

Corpus load_corpus(const std::string& path) {
    auto in = open_input(path);
    Corpus corpus;
    std::set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    bool uniform_frames = true;
    size_t first_frame_count = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, path, line_no);

        VideoRecord rec;
        if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": missing or empty \"id\"");
        }
        rec.id = j["id"].get<std::string>();
        if (!seen.insert(rec.id).second) {
            throw InputError(path + ": duplicate video id \"" + rec.id + "\"");
        }
        if (!j.contains("source") || !j["source"].is_string()) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": missing \"source\" for id \"" + rec.id + "\"");
        }
        rec.source = source_from_string(j["source"].get<std::string>());
        if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
            throw InputError(path + ": video \"" + rec.id + "\" has no frames");
        }
        for (const auto& frame : j["frames"]) {
            rec.frames.push_back(read_vector(frame, path + ": video \"" + rec.id + "\""));
        }

        for (const auto& frame : rec.frames) {
            if (frame.size() != rec.frames.front().size()) {
                throw InputError(path + ": dimension mismatch within video \"" + rec.id + "\"");
            }
        }
        if (corpus.videos.empty()) {
            corpus.dim = rec.frames.front().size();
            first_frame_count = rec.frames.size();
        } else {
            if (rec.frames.front().size() != corpus.dim) {
                throw InputError(path + ": dimension mismatch for video \"" + rec.id +
                                 "\" (got " + std::to_string(rec.frames.front().size()) +
                                 ", corpus dimension is " + std::to_string(corpus.dim) + ")");
            }
            if (rec.frames.size() != first_frame_count) {
                uniform_frames = false;
            }
        }
        corpus.videos.push_back(std::move(rec));
    }

    if (corpus.videos.empty()) {
        throw InputError(path + ": empty corpus");
    }
    if (uniform_frames) {
        corpus.fixed_frames = first_frame_count;
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    auto out = open_output(path);
    for (const auto& rec : corpus.videos) {
        json j;
        j["id"] = rec.id;
        j["source"] = to_string(rec.source);
        j["frames"] = rec.frames;
        out << j.dump() << '\n';
    }
}

std::vector<QueryRecord> load_queries(const std::string& path) {
    auto in = open_input(path);
    std::vector<QueryRecord> queries;
    std::set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    size_t dim = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, path, line_no);
        QueryRecord q;
        if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": missing or empty \"id\"");
        }
        q.id = j["id"].get<std::string>();
        if (!seen.insert(q.id).second) {
            throw InputError(path + ": duplicate query id \"" + q.id + "\"");
        }
        if (!j.contains("embedding")) {
            throw InputError(path + ": query \"" + q.id + "\" has no embedding");
        }
        q.embedding = read_vector(j["embedding"], path + ": query \"" + q.id + "\"");
        if (dim == 0) {
            dim = q.embedding.size();
        } else if (q.embedding.size() != dim) {
            throw InputError(path + ": dimension mismatch for query \"" + q.id + "\"");
        }
        queries.push_back(std::move(q));
    }
    if (queries.empty()) {
        throw InputError(path + ": empty query file");
    }
    return queries;
}

void save_queries(const std::vector<QueryRecord>& queries, const std::string& path) {
    auto out = open_output(path);
    for (const auto& q : queries) {
        json j;
        j["id"] = q.id;
        j["embedding"] = q.embedding;
        out << j.dump() << '\n';
    }
}

RelevanceMap load_relevance(const std::string& path) {
    auto in = open_input(path);
    RelevanceMap rel;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, path, line_no);
        if (!j.contains("query_id") || !j.contains("video_id")) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": expected {\"query_id\", \"video_id\"}");
        }
        const auto qid = j["query_id"].get<std::string>();
        const auto vid = j["video_id"].get<std::string>();
        if (!rel.pairs.emplace(qid, vid).second) {
            throw InputError(path + ": duplicate relevance entry for query \"" + qid + "\"");
        }
    }
    if (rel.pairs.empty()) {
        throw InputError(path + ": empty relevance file");
    }
    return rel;
}

void save_relevance(const RelevanceMap& rel, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [qid, vid] : rel.pairs) {
        json j;
        j["query_id"] = qid;
        j["video_id"] = vid;
        out << j.dump() << '\n';
    }
}

void validate_relevance(const std::vector<QueryRecord>& queries,
                        const Corpus& corpus,
                        const RelevanceMap& rel) {
    std::set<std::string> ids;
    for (const auto& v : corpus.videos) {
        ids.insert(v.id);
    }
    for (const auto& q : queries) {
        auto it = rel.pairs.find(q.id);
        if (it == rel.pairs.end()) {
            throw InputError("relevance map is missing query \"" + q.id + "\"");
        }
        if (!ids.contains(it->second)) {
            throw InputError("relevance for query \"" + q.id + "\" names video \"" +
                             it->second + "\" which is not in the corpus");
        }
    }
}

std::vector<TripletRef> join_triplets(const Corpus& real,
                                      const Corpus& ai,
                                      const std::vector<QueryRecord>& queries,
                                      const RelevanceMap& rel) {
    std::map<std::string, size_t> real_index;
    std::map<std::string, size_t> ai_index;
    for (size_t i = 0; i < real.videos.size(); ++i) {
        real_index[real.videos[i].id] = i;
    }
    for (size_t i = 0; i < ai.videos.size(); ++i) {
        ai_index[ai.videos[i].id] = i;
    }

    std::vector<TripletRef> triplets;
    std::vector<std::string> unmatched;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        auto it = rel.pairs.find(queries[qi].id);
        if (it == rel.pairs.end()) {
            throw InputError("relevance map is missing query \"" + queries[qi].id + "\"");
        }
        const auto& vid = it->second;
        auto r = real_index.find(vid);
        auto a = ai_index.find(vid);
        if (r == real_index.end() || a == ai_index.end()) {
            unmatched.push_back(vid);
            continue;
        }
        triplets.push_back(TripletRef{r->second, a->second, qi});
    }
    if (!unmatched.empty()) {
        std::ostringstream msg;
        msg << "missing counterpart for " << unmatched.size() << " video id(s):";
        for (const auto& id : unmatched) {
            msg << " \"" << id << "\"";
        }
        throw InputError(msg.str());
    }
    return triplets;
}

} // namespace vsb
