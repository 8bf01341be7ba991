#include "vsb/pvector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vsb/error.hpp"
#include "vsb/vecmath.hpp"

namespace vsb {

using nlohmann::json;

PVectorSet extract_p(const ScorerParams& original,
                     const ScorerParams& debiased,
                     const Corpus& corpus,
                     const PoolSpec& spec,
                     size_t frames,
                     PSpace space,
                     PVariant variant) {
    if (original.dim != debiased.dim) {
        throw InputError("extract_p: scorer dimensions differ (" +
                         std::to_string(original.dim) + " vs " +
                         std::to_string(debiased.dim) + ")");
    }
    if (corpus.dim != original.dim) {
        throw InputError("extract_p: corpus dimension " + std::to_string(corpus.dim) +
                         " does not match scorer dimension " + std::to_string(original.dim));
    }

    const auto pooled = pool_corpus(corpus, spec, frames);
    const auto h_deb = transform_embeddings(debiased, pooled);
    const std::vector<PooledEmbedding> h_orig =
        space == PSpace::projected
            ? transform_embeddings(original, pooled)
            : std::vector<PooledEmbedding>(pooled.begin(), pooled.end());

    PVectorSet set;
    set.variant = variant;
    set.ids.reserve(pooled.size());
    set.p.reserve(pooled.size());
    set.p_avg.assign(corpus.dim, 0.0);
    for (size_t i = 0; i < pooled.size(); ++i) {
        std::vector<double> p(corpus.dim);
        for (size_t k = 0; k < corpus.dim; ++k) {
            p[k] = h_deb[i].vec[k] - h_orig[i].vec[k];
        }
        axpy(1.0 / static_cast<double>(pooled.size()), p, set.p_avg);
        set.ids.push_back(pooled[i].video_id);
        set.p.push_back(std::move(p));
    }
    return set;
}

std::vector<PooledEmbedding> apply_shift(std::span<const PooledEmbedding> embeddings,
                                         std::span<const double> p_avg) {
    std::vector<PooledEmbedding> out;
    out.reserve(embeddings.size());
    for (const auto& e : embeddings) {
        if (e.vec.size() != p_avg.size()) {
            throw InputError("apply_shift: dimension mismatch for video \"" + e.video_id + "\"");
        }
        std::vector<double> shifted = e.vec;
        axpy(1.0, p_avg, shifted);
        out.push_back(PooledEmbedding{
            e.video_id, e.source, normalized(shifted, "video \"" + e.video_id + "\"")});
    }
    return out;
}

ShiftDelta shift_delta_report(const DeltaReport& before, const DeltaReport& after) {
    ShiftDelta d;
    d.per_metric = normalized_delta(after.normalized, before.normalized);
    d.mixr = after.mixr_normalized - before.mixr_normalized;
    return d;
}

namespace {

double mean_pairwise_cosine(std::span<const std::vector<double>> vs) {
    if (vs.size() < 2) {
        throw InputError("cluster_stats: need at least 2 vectors per group");
    }
    double sum = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < vs.size(); ++i) {
        for (size_t j = i + 1; j < vs.size(); ++j) {
            sum += cosine(vs[i], vs[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

} // namespace

ClusterStats cluster_stats(const PVectorSet& p_set, std::span<const PooledEmbedding> raw) {
    std::vector<std::vector<double>> h;
    h.reserve(raw.size());
    for (const auto& e : raw) {
        h.push_back(e.vec);
    }

    ClusterStats stats;
    stats.mean_pairwise_cos_p = mean_pairwise_cosine(p_set.p);
    stats.mean_pairwise_cos_h = mean_pairwise_cosine(h);

    // Two-cluster silhouette with cosine distance, clusters = {p} and {h}.
    const size_t np = p_set.p.size();
    const size_t nh = h.size();
    auto cos_dist = [](std::span<const double> a, std::span<const double> b) {
        return 1.0 - cosine(a, b);
    };
    double total = 0.0;
    auto silhouette_of = [&](std::span<const double> x, bool in_p, size_t self_index) {
        double own = 0.0;
        double other = 0.0;
        const size_t own_n = in_p ? np : nh;
        for (size_t j = 0; j < np; ++j) {
            if (in_p && j == self_index) continue;
            own += in_p ? cos_dist(x, p_set.p[j]) : 0.0;
            if (!in_p) other += cos_dist(x, p_set.p[j]);
        }
        for (size_t j = 0; j < nh; ++j) {
            if (!in_p && j == self_index) continue;
            own += !in_p ? cos_dist(x, h[j]) : 0.0;
            if (in_p) other += cos_dist(x, h[j]);
        }
        const double a = own / static_cast<double>(own_n - 1);
        const double b = other / static_cast<double>(in_p ? nh : np);
        const double m = std::max(a, b);
        return m > 0.0 ? (b - a) / m : 0.0;
    };
    for (size_t i = 0; i < np; ++i) {
        total += silhouette_of(p_set.p[i], true, i);
    }
    for (size_t i = 0; i < nh; ++i) {
        total += silhouette_of(h[i], false, i);
    }
    stats.silhouette = total / static_cast<double>(np + nh);
    return stats;
}

namespace {

// Leading eigenvector of the (implicit) covariance X^T X by power
// iteration. Returns the eigenvalue; v is normalized in place.
double power_iterate(const std::vector<std::vector<double>>& centered,
                     std::vector<double>& v,
                     const std::vector<double>* deflate,
                     double deflate_value) {
    const double tol = 1e-10;
    const size_t max_iter = 1000;
    const size_t d = v.size();

    double eigen = 0.0;
    for (size_t iter = 0; iter < max_iter; ++iter) {
        std::vector<double> next(d, 0.0);
        for (const auto& row : centered) {
            const double c = dot(row, v);
            axpy(c, row, next);
        }
        if (deflate) {
            const double c = dot(*deflate, v) * deflate_value;
            axpy(-c, *deflate, next);
        }
        const double n = norm(next);
        if (!(n > 1e-300)) {
            v.assign(d, 0.0);
            return 0.0;
        }
        for (auto& x : next) {
            x /= n;
        }
        // Sign-align so convergence is measured on direction, not sign.
        if (dot(next, v) < 0.0) {
            for (auto& x : next) {
                x = -x;
            }
        }
        double diff = 0.0;
        for (size_t k = 0; k < d; ++k) {
            diff = std::max(diff, std::abs(next[k] - v[k]));
        }
        v = std::move(next);
        eigen = n;
        if (diff < tol) {
            break;
        }
    }
    return eigen;
}

} // namespace

Projection2D pca_project_2d(std::span<const std::vector<double>> vectors,
                            std::span<const std::string> ids,
                            std::span<const std::string> labels) {
    if (vectors.size() < 3) {
        throw InputError("pca_project_2d: need at least 3 vectors");
    }
    if (ids.size() != vectors.size() || labels.size() != vectors.size()) {
        throw InputError("pca_project_2d: ids/labels length mismatch");
    }
    const size_t d = vectors.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != d) {
            throw InputError("pca_project_2d: inconsistent vector dimensions");
        }
        axpy(1.0 / static_cast<double>(vectors.size()), v, mean);
    }
    std::vector<std::vector<double>> centered;
    centered.reserve(vectors.size());
    for (const auto& v : vectors) {
        std::vector<double> c(d);
        for (size_t k = 0; k < d; ++k) {
            c[k] = v[k] - mean[k];
        }
        centered.push_back(std::move(c));
    }

    // Deterministic start direction for the iteration.
    Rng rng(0x9E3779B97F4A7C15ULL);
    auto start_vector = [&]() {
        std::vector<double> v(d);
        for (auto& x : v) {
            x = rng.next_gaussian();
        }
        const double n = norm(v);
        for (auto& x : v) {
            x /= n;
        }
        return v;
    };

    // Rank decisions are made relative to the input scale so that the
    // rounding residue of mean-centering never counts as variance.
    double input_energy = 0.0;
    for (const auto& v : vectors) {
        input_energy += dot(v, v);
    }
    const double floor_energy = std::max(input_energy, 1.0) * 1e-12;

    Projection2D out;
    std::vector<double> pc1 = start_vector();
    double lambda1 = power_iterate(centered, pc1, nullptr, 0.0);
    if (lambda1 <= floor_energy) {
        // isotropic duplicates: no variance left after centering
        lambda1 = 0.0;
        pc1.assign(d, 0.0);
    }
    std::vector<double> pc2 = start_vector();
    double lambda2 = 0.0;
    if (lambda1 > 0.0) {
        lambda2 = power_iterate(centered, pc2, &pc1, lambda1);
    } else {
        pc2.assign(d, 0.0);
    }

    const double n_rows = static_cast<double>(vectors.size());
    out.variance_x = lambda1 / n_rows;
    out.variance_y = lambda2 / n_rows;
    if (lambda2 <= std::max(lambda1 * 1e-12, floor_energy) || lambda2 == 0.0) {
        out.rank_deficient = true;
        pc2.assign(d, 0.0);
        out.variance_y = 0.0;
    }

    out.points.reserve(vectors.size());
    for (size_t i = 0; i < vectors.size(); ++i) {
        Projection2D::Point p;
        p.id = ids[i];
        p.label = labels[i];
        p.x = dot(centered[i], pc1);
        p.y = dot(centered[i], pc2);
        out.points.push_back(std::move(p));
    }
    return out;
}

void save_pvectors_jsonl(const PVectorSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    for (size_t i = 0; i < set.p.size(); ++i) {
        json j;
        j["id"] = set.ids[i];
        j["p"] = set.p[i];
        out << j.dump() << '\n';
    }
    json avg;
    avg["p_avg"] = set.p_avg;
    avg["variant"] = set.variant == PVariant::standard ? "standard" : "random";
    out << avg.dump() << '\n';
}

PVectorSet load_pvectors_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    PVectorSet set;
    bool have_avg = false;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                             ": " + e.what());
        }
        if (j.contains("p_avg")) {
            set.p_avg = j["p_avg"].get<std::vector<double>>();
            if (j.contains("variant") && j["variant"] == "random") {
                set.variant = PVariant::random;
            }
            have_avg = true;
        } else {
            set.ids.push_back(j.at("id").get<std::string>());
            set.p.push_back(j.at("p").get<std::vector<double>>());
        }
    }
    if (!have_avg || set.p.empty()) {
        throw InputError(path + ": incomplete p-vector file");
    }
    return set;
}

void save_projection_csv(const Projection2D& projection, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "id,label,x,y\n";
    char buf[256];
    for (const auto& p : projection.points) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g\n", p.id.c_str(), p.label.c_str(),
                      p.x, p.y);
        out << buf;
    }
}

} // namespace vsb
