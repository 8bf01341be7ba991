#ifndef VSB_TRAINER_HPP
#define VSB_TRAINER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "vsb/embedding_store.hpp"
#include "vsb/metrics.hpp"
#include "vsb/ranking.hpp"

namespace vsb {

/// Toy trainable retrieval scorer: a d x d projection applied to pooled
/// video embeddings plus a temperature. score = cos(W v, t_hat) / tau.
struct ScorerParams {
    size_t dim = 0;
    std::vector<double> w; // row-major d x d
    double tau = 0.1;

    static ScorerParams identity(size_t dim, double tau = 0.1);
    bool is_finite() const;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    size_t epochs = 50;
    size_t batch_size = 32;
    uint64_t seed = 42;
    double mix_ratio = 0.0;     // share of training positives replaced by AI versions
    double debias_weight = 1.0; // lambda
    PoolSpec pooling = PoolSpec::uniform();
    size_t frames = 10;
    double tau = 0.1;
    double holdout_fraction = 0.2;
};

/// Per-epoch trace: mean base loss, mean (lambda-weighted) debias term,
/// and Normalized-delta R@1 on the held-out query split.
struct TrainHistory {
    std::vector<double> base_loss;
    std::vector<double> debias_loss;
    std::vector<double> normalized_r1;
};

struct BatchItem {
    const PooledEmbedding* video;
    const QueryRecord* query;
};

struct Triplet {
    const PooledEmbedding* real_video;
    const PooledEmbedding* ai_video;
    const QueryRecord* query;
};

/// cos(W v, t_hat) / tau. Throws on a zero projection.
double score(const ScorerParams& params, const PooledEmbedding& video, const QueryRecord& query);

/// Symmetric in-batch InfoNCE over positives: mean of the video-to-text
/// and text-to-video cross entropies. Batch size must be >= 2.
double base_loss(const ScorerParams& params, std::span<const BatchItem> batch);

/// delta_r = score(AI video, query) - score(real video, query).
double delta_r(const ScorerParams& params, const Triplet& triplet);

/// J = base_loss + lambda * mean over triplets of max(0, delta_r).
double debias_objective(const ScorerParams& params,
                        std::span<const BatchItem> batch,
                        std::span<const Triplet> triplets,
                        double lambda);

struct ObjectiveBreakdown {
    double base = 0.0;
    double hinge = 0.0; // lambda-weighted mean hinge term
    double total = 0.0;
};

/// Objective value and (optionally) its analytic gradient with respect
/// to every entry of W. `grad_out`, when non-null, must have dim*dim
/// entries; it is overwritten.
ObjectiveBreakdown objective_and_gradient(const ScorerParams& params,
                                          std::span<const BatchItem> batch,
                                          std::span<const Triplet> triplets,
                                          double lambda,
                                          std::vector<double>* grad_out);

/// Replace floor(rho * N) seeded-sampled ids of `real` with their AI
/// counterparts, keeping corpus size and record order.
Corpus mix_training_set(const Corpus& real, const Corpus& ai, double rho, uint64_t seed);

/// normalize(W v) for every embedding; ids and sources preserved.
std::vector<PooledEmbedding> transform_embeddings(const ScorerParams& params,
                                                  std::span<const PooledEmbedding> embeddings);

/// Full bias evaluation of a scorer: rank the transformed corpora
/// standalone and mixed, then assemble the delta report.
DeltaReport evaluate_params(const ScorerParams& params,
                            std::span<const PooledEmbedding> pooled_real,
                            std::span<const PooledEmbedding> pooled_ai,
                            const std::vector<QueryRecord>& queries,
                            const RelevanceMap& rel,
                            uint64_t seed,
                            size_t n_seeds = 1);

struct TrainResult {
    ScorerParams params;
    TrainHistory history;
};

/// Adam descent (beta1 0.9, beta2 0.999, eps 1e-8) on the debias
/// objective. W starts at identity; the run is deterministic given the
/// config seed. Aborts with epoch/batch diagnostics on a non-finite loss.
TrainResult train(const TrainConfig& config,
                  const Corpus& real,
                  const Corpus& ai,
                  const std::vector<QueryRecord>& queries,
                  const RelevanceMap& rel);

void save_params_json(const ScorerParams& params, const std::string& path);
ScorerParams load_params_json(const std::string& path);
void save_history_csv(const TrainHistory& history, const std::string& path);

} // namespace vsb

#endif
