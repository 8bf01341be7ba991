#include "vsb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "vsb/error.hpp"
#include "vsb/vecmath.hpp"

namespace vsb {

using nlohmann::json;

ScorerParams ScorerParams::identity(size_t dim, double tau) {
    ScorerParams p;
    p.dim = dim;
    p.tau = tau;
    p.w.assign(dim * dim, 0.0);
    for (size_t i = 0; i < dim; ++i) {
        p.w[i * dim + i] = 1.0;
    }
    return p;
}

bool ScorerParams::is_finite() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        return false;
    }
    return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
}

namespace {

struct Projected {
    std::vector<double> unit; // W v / ||W v||
    double norm = 0.0;
};

Projected project(const ScorerParams& p, std::span<const double> v, const std::string& what) {
    if (v.size() != p.dim) {
        throw InputError("scorer dimension " + std::to_string(p.dim) +
                         " does not match embedding dimension " + std::to_string(v.size()));
    }
    Projected out;
    auto z = mat_vec(p.w, v, p.dim);
    out.norm = norm(z);
    if (!(out.norm > 1e-300)) {
        throw InputError("degenerate projection for " + what);
    }
    for (auto& x : z) {
        x /= out.norm;
    }
    out.unit = std::move(z);
    return out;
}

double score_units(const ScorerParams& p,
                   std::span<const double> video,
                   std::span<const double> query_unit,
                   const std::string& what) {
    const auto proj = project(p, video, what);
    return dot(proj.unit, query_unit) / p.tau;
}

/// d score / d z for z = W v, written in terms of the unit projection:
/// (t_hat - cos * z_hat) / (tau * ||z||).
std::vector<double> score_grad_z(const Projected& proj,
                                 std::span<const double> query_unit,
                                 double tau) {
    const double c = dot(proj.unit, query_unit);
    std::vector<double> g(proj.unit.size());
    for (size_t i = 0; i < g.size(); ++i) {
        g[i] = (query_unit[i] - c * proj.unit[i]) / (tau * proj.norm);
    }
    return g;
}

void add_outer(std::span<double> grad, std::span<const double> a, std::span<const double> b,
               double scale) {
    const size_t d = a.size();
    for (size_t r = 0; r < d; ++r) {
        const double s = scale * a[r];
        double* row = grad.data() + r * d;
        for (size_t c = 0; c < d; ++c) {
            row[c] += s * b[c];
        }
    }
}

std::vector<double> query_unit_of(const QueryRecord& q) {
    return normalized(q.embedding, "query \"" + q.id + "\"");
}

} // namespace

double score(const ScorerParams& params, const PooledEmbedding& video, const QueryRecord& query) {
    const auto unit = query_unit_of(query);
    return score_units(params, video.vec, unit, "video \"" + video.video_id + "\"");
}

double delta_r(const ScorerParams& params, const Triplet& triplet) {
    const auto unit = query_unit_of(*triplet.query);
    const double s_ai = score_units(params, triplet.ai_video->vec, unit,
                                    "video \"" + triplet.ai_video->video_id + "\"");
    const double s_real = score_units(params, triplet.real_video->vec, unit,
                                      "video \"" + triplet.real_video->video_id + "\"");
    return s_ai - s_real;
}

ObjectiveBreakdown objective_and_gradient(const ScorerParams& params,
                                          std::span<const BatchItem> batch,
                                          std::span<const Triplet> triplets,
                                          double lambda,
                                          std::vector<double>* grad_out) {
    const size_t b = batch.size();
    if (b < 2) {
        throw InputError("base_loss: batch size must be >= 2");
    }
    const size_t d = params.dim;
    if (grad_out) {
        grad_out->assign(d * d, 0.0);
    }

    std::vector<Projected> proj(b);
    std::vector<std::vector<double>> q_units(b);
    for (size_t j = 0; j < b; ++j) {
        proj[j] = project(params, batch[j].video->vec,
                          "video \"" + batch[j].video->video_id + "\"");
        q_units[j] = query_unit_of(*batch[j].query);
    }

    // S[i][j] = score of video j against query i.
    std::vector<double> scores(b * b);
    for (size_t i = 0; i < b; ++i) {
        for (size_t j = 0; j < b; ++j) {
            scores[i * b + j] = dot(proj[j].unit, q_units[i]) / params.tau;
        }
    }

    auto logsumexp = [&](auto value_at) {
        double mx = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < b; ++k) {
            mx = std::max(mx, value_at(k));
        }
        double s = 0.0;
        for (size_t k = 0; k < b; ++k) {
            s += std::exp(value_at(k) - mx);
        }
        return mx + std::log(s);
    };

    double loss_t2v = 0.0;
    double loss_v2t = 0.0;
    std::vector<double> lse_row(b), lse_col(b);
    for (size_t i = 0; i < b; ++i) {
        lse_row[i] = logsumexp([&](size_t j) { return scores[i * b + j]; });
        loss_t2v += lse_row[i] - scores[i * b + i];
    }
    for (size_t j = 0; j < b; ++j) {
        lse_col[j] = logsumexp([&](size_t i) { return scores[i * b + j]; });
        loss_v2t += lse_col[j] - scores[j * b + j];
    }
    const double base = 0.5 * (loss_t2v + loss_v2t) / static_cast<double>(b);

    if (grad_out) {
        const double inv_b = 1.0 / static_cast<double>(b);
        for (size_t j = 0; j < b; ++j) {
            std::vector<double> gz(d, 0.0);
            for (size_t i = 0; i < b; ++i) {
                const double p_row = std::exp(scores[i * b + j] - lse_row[i]);
                const double p_col = std::exp(scores[i * b + j] - lse_col[j]);
                const double dldS =
                    0.5 * inv_b * ((p_row - (i == j ? 1.0 : 0.0)) + (p_col - (i == j ? 1.0 : 0.0)));
                if (dldS == 0.0) {
                    continue;
                }
                const auto gs = score_grad_z(proj[j], q_units[i], params.tau);
                axpy(dldS, gs, gz);
            }
            add_outer(*grad_out, gz, batch[j].video->vec, 1.0);
        }
    }

    // Hinged contrastive debias term: active only when the AI video
    // outscores its real counterpart.
    double hinge_sum = 0.0;
    if (lambda != 0.0 && !triplets.empty()) {
        const double scale = lambda / static_cast<double>(triplets.size());
        for (const auto& t : triplets) {
            const auto unit = query_unit_of(*t.query);
            const auto proj_ai = project(params, t.ai_video->vec,
                                         "video \"" + t.ai_video->video_id + "\"");
            const auto proj_real = project(params, t.real_video->vec,
                                           "video \"" + t.real_video->video_id + "\"");
            const double dr = (dot(proj_ai.unit, unit) - dot(proj_real.unit, unit)) / params.tau;
            if (dr > 0.0) {
                hinge_sum += dr;
                if (grad_out) {
                    const auto g_ai = score_grad_z(proj_ai, unit, params.tau);
                    const auto g_real = score_grad_z(proj_real, unit, params.tau);
                    add_outer(*grad_out, g_ai, t.ai_video->vec, scale);
                    add_outer(*grad_out, g_real, t.real_video->vec, -scale);
                }
            }
        }
    }

    ObjectiveBreakdown out;
    out.base = base;
    out.hinge = triplets.empty() ? 0.0
                                 : lambda * hinge_sum / static_cast<double>(triplets.size());
    out.total = out.base + out.hinge;
    return out;
}

double base_loss(const ScorerParams& params, std::span<const BatchItem> batch) {
    return objective_and_gradient(params, batch, {}, 0.0, nullptr).base;
}

double debias_objective(const ScorerParams& params,
                        std::span<const BatchItem> batch,
                        std::span<const Triplet> triplets,
                        double lambda) {
    return objective_and_gradient(params, batch, triplets, lambda, nullptr).total;
}

Corpus mix_training_set(const Corpus& real, const Corpus& ai, double rho, uint64_t seed) {
    if (rho < 0.0 || rho > 1.0) {
        throw InputError("mix_training_set: rho must lie in [0, 1]");
    }
    std::map<std::string, const VideoRecord*> ai_by_id;
    for (const auto& v : ai.videos) {
        ai_by_id[v.id] = &v;
    }
    std::vector<std::string> missing;
    for (const auto& v : real.videos) {
        if (!ai_by_id.contains(v.id)) {
            missing.push_back(v.id);
        }
    }
    if (!missing.empty()) {
        throw InputError("mix_training_set: " + std::to_string(missing.size()) +
                         " real video id(s) have no AI counterpart, e.g. \"" +
                         missing.front() + "\"");
    }

    const size_t n = real.videos.size();
    const size_t k = static_cast<size_t>(std::floor(rho * static_cast<double>(n)));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<bool> take_ai(n, false);
    for (size_t i = 0; i < k; ++i) {
        take_ai[order[i]] = true;
    }

    Corpus mixed;
    mixed.dim = real.dim;
    mixed.fixed_frames = real.fixed_frames;
    mixed.videos.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (take_ai[i]) {
            mixed.videos.push_back(*ai_by_id.at(real.videos[i].id));
            if (mixed.fixed_frames &&
                mixed.videos.back().frames.size() != *mixed.fixed_frames) {
                mixed.fixed_frames.reset();
            }
        } else {
            mixed.videos.push_back(real.videos[i]);
        }
    }
    return mixed;
}

std::vector<PooledEmbedding> transform_embeddings(const ScorerParams& params,
                                                  std::span<const PooledEmbedding> embeddings) {
    std::vector<PooledEmbedding> out;
    out.reserve(embeddings.size());
    for (const auto& e : embeddings) {
        const auto proj = project(params, e.vec, "video \"" + e.video_id + "\"");
        out.push_back(PooledEmbedding{e.video_id, e.source, proj.unit});
    }
    return out;
}

DeltaReport evaluate_params(const ScorerParams& params,
                            std::span<const PooledEmbedding> pooled_real,
                            std::span<const PooledEmbedding> pooled_ai,
                            const std::vector<QueryRecord>& queries,
                            const RelevanceMap& rel,
                            uint64_t seed,
                            size_t n_seeds) {
    const auto t_real = transform_embeddings(params, pooled_real);
    const auto t_ai = transform_embeddings(params, pooled_ai);
    const auto real_ranks = rank_relevant(t_real, queries, rel);
    const auto ai_ranks = rank_relevant(t_ai, queries, rel);
    const auto [mixed_real, mixed_ai] = rank_mixed(t_real, t_ai, queries, rel);
    return delta_report(real_ranks, ai_ranks, mixed_real, mixed_ai, seed, n_seeds);
}

TrainResult train(const TrainConfig& config,
                  const Corpus& real,
                  const Corpus& ai,
                  const std::vector<QueryRecord>& queries,
                  const RelevanceMap& rel) {
    if (config.mix_ratio < 0.0 || config.mix_ratio > 1.0) {
        throw InputError("train: mix_ratio must lie in [0, 1]");
    }
    if (config.batch_size < 2) {
        throw InputError("train: batch_size must be >= 2");
    }
    if (config.learning_rate < 0.0) {
        throw InputError("train: learning_rate must be >= 0");
    }
    if (!(config.tau > 0.0)) {
        throw InputError("train: tau must be positive");
    }

    const auto mixed =
        mix_training_set(real, ai, config.mix_ratio, derive_seed(config.seed, "mix"));
    const auto pooled_mixed = pool_corpus(mixed, config.pooling, config.frames);
    const auto pooled_real = pool_corpus(real, config.pooling, config.frames);
    const auto pooled_ai = pool_corpus(ai, config.pooling, config.frames);

    std::map<std::string, size_t> by_id;
    for (size_t i = 0; i < pooled_mixed.size(); ++i) {
        by_id[pooled_mixed[i].video_id] = i;
    }
    const auto triplet_refs = join_triplets(real, ai, queries, rel);

    // Per-query views: base-loss positive from the mixed corpus, hinge
    // triplet from the standalone corpora.
    std::vector<BatchItem> items(queries.size());
    std::vector<Triplet> trips(queries.size());
    for (const auto& tr : triplet_refs) {
        const auto& q = queries[tr.query_index];
        const auto vid = rel.pairs.at(q.id);
        items[tr.query_index] = BatchItem{&pooled_mixed[by_id.at(vid)], &q};
        trips[tr.query_index] =
            Triplet{&pooled_real[tr.real_index], &pooled_ai[tr.ai_index], &q};
    }

    // Held-out split for the per-epoch bias trace.
    std::vector<size_t> query_order(queries.size());
    std::iota(query_order.begin(), query_order.end(), 0);
    {
        Rng rng(derive_seed(config.seed, "holdout"));
        rng.shuffle(query_order);
    }
    size_t holdout_n = static_cast<size_t>(
        std::floor(config.holdout_fraction * static_cast<double>(queries.size())));
    holdout_n = std::min(holdout_n, queries.size() > 1 ? queries.size() - 1 : 0);
    std::vector<QueryRecord> holdout_queries;
    std::vector<size_t> train_indices;
    for (size_t i = 0; i < query_order.size(); ++i) {
        if (i < holdout_n) {
            holdout_queries.push_back(queries[query_order[i]]);
        } else {
            train_indices.push_back(query_order[i]);
        }
    }
    const uint64_t eval_seed = derive_seed(config.seed, "eval");

    ScorerParams params = ScorerParams::identity(real.dim, config.tau);
    const size_t n_w = params.w.size();
    std::vector<double> grad(n_w, 0.0);
    std::vector<double> adam_m(n_w, 0.0);
    std::vector<double> adam_v(n_w, 0.0);
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    size_t adam_t = 0;

    TrainHistory history;
    Rng order_rng(derive_seed(config.seed, "batch-order"));

    auto eval_r1 = [&](const ScorerParams& p) {
        const auto& eval_queries = holdout_queries.empty() ? queries : holdout_queries;
        const auto report =
            evaluate_params(p, pooled_real, pooled_ai, eval_queries, rel, eval_seed);
        return report.normalized.r1;
    };

    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        order_rng.shuffle(train_indices);
        double epoch_base = 0.0;
        double epoch_hinge = 0.0;
        size_t n_batches = 0;

        for (size_t start = 0; start < train_indices.size(); start += config.batch_size) {
            const size_t end = std::min(start + config.batch_size, train_indices.size());
            if (end - start < 2) {
                continue; // InfoNCE needs at least two in-batch items
            }
            std::vector<BatchItem> batch;
            std::vector<Triplet> batch_trips;
            batch.reserve(end - start);
            batch_trips.reserve(end - start);
            for (size_t k = start; k < end; ++k) {
                batch.push_back(items[train_indices[k]]);
                batch_trips.push_back(trips[train_indices[k]]);
            }

            const auto breakdown = objective_and_gradient(
                params, batch, batch_trips, config.debias_weight, &grad);
            if (!std::isfinite(breakdown.total)) {
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(n_batches));
            }
            epoch_base += breakdown.base;
            epoch_hinge += breakdown.hinge;
            ++n_batches;

            ++adam_t;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
            for (size_t i = 0; i < n_w; ++i) {
                adam_m[i] = kBeta1 * adam_m[i] + (1.0 - kBeta1) * grad[i];
                adam_v[i] = kBeta2 * adam_v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                const double m_hat = adam_m[i] / bc1;
                const double v_hat = adam_v[i] / bc2;
                params.w[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + kEps);
            }
        }

        if (!params.is_finite()) {
            throw Error("train: non-finite parameters after epoch " + std::to_string(epoch));
        }
        const double denom = n_batches > 0 ? static_cast<double>(n_batches) : 1.0;
        history.base_loss.push_back(epoch_base / denom);
        history.debias_loss.push_back(epoch_hinge / denom);
        history.normalized_r1.push_back(eval_r1(params));
    }

    return TrainResult{std::move(params), std::move(history)};
}

void save_params_json(const ScorerParams& params, const std::string& path) {
    json j;
    j["dim"] = params.dim;
    j["tau"] = params.tau;
    j["w"] = params.w;
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << j.dump(2) << '\n';
}

ScorerParams load_params_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("parse error in " + path + ": " + e.what());
    }
    ScorerParams p;
    p.dim = j.at("dim").get<size_t>();
    p.tau = j.at("tau").get<double>();
    p.w = j.at("w").get<std::vector<double>>();
    if (p.w.size() != p.dim * p.dim) {
        throw InputError(path + ": w has " + std::to_string(p.w.size()) +
                         " entries, expected dim*dim");
    }
    if (!p.is_finite()) {
        throw InputError(path + ": non-finite scorer parameters");
    }
    return p;
}

void save_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "epoch,base_loss,debias_loss,normalized_delta_r1\n";
    char buf[160];
    for (size_t e = 0; e < history.base_loss.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", e, history.base_loss[e],
                      history.debias_loss[e], history.normalized_r1[e]);
        out << buf;
    }
}

} // namespace vsb
