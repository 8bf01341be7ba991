#ifndef VSB_PVECTOR_HPP
#define VSB_PVECTOR_HPP

#include <span>
#include <string>
#include <vector>

#include "vsb/metrics.hpp"
#include "vsb/ranking.hpp"
#include "vsb/trainer.hpp"

namespace vsb {

enum class PVariant { standard, random };
enum class PSpace { projected, raw };

/// Per-video shift p_i between the debiased and the original embedding,
/// plus their exact arithmetic mean p_avg.
struct PVectorSet {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> p;
    std::vector<double> p_avg;
    PVariant variant = PVariant::standard;
};

/// p_i = h_i^d - h_i over the corpus, pooled with `spec` at f frames.
///   projected: h_i = normalize(W_orig v_i), h_i^d = normalize(W_deb v_i)
///   raw:       h_i = v_i,                   h_i^d = normalize(W_deb v_i)
PVectorSet extract_p(const ScorerParams& original,
                     const ScorerParams& debiased,
                     const Corpus& corpus,
                     const PoolSpec& spec,
                     size_t frames,
                     PSpace space = PSpace::projected,
                     PVariant variant = PVariant::standard);

/// normalize(h + p_avg) for every embedding; ids and sources preserved.
std::vector<PooledEmbedding> apply_shift(std::span<const PooledEmbedding> embeddings,
                                         std::span<const double> p_avg);

/// Per-metric change of the normalized delta between two reports
/// (after - before), plus the MixR change.
struct ShiftDelta {
    MetricVector per_metric;
    double mixr = 0.0;
};

ShiftDelta shift_delta_report(const DeltaReport& before, const DeltaReport& after);

/// Quantifies the clustering claim: the p vectors of a debiased run
/// share a direction much more than raw embeddings do.
struct ClusterStats {
    double mean_pairwise_cos_p = 0.0;
    double mean_pairwise_cos_h = 0.0;
    double silhouette = 0.0; // 2-cluster cosine silhouette, p vs raw
};

ClusterStats cluster_stats(const PVectorSet& p_set, std::span<const PooledEmbedding> raw);

/// 2-D PCA projection (power iteration with deflation, |Av - lv| style
/// convergence at 1e-10, at most 1000 iterations per component).
struct Projection2D {
    struct Point {
        std::string id;
        std::string label;
        double x = 0.0;
        double y = 0.0;
    };
    std::vector<Point> points;
    double variance_x = 0.0;
    double variance_y = 0.0;
    bool rank_deficient = false; // second component zeroed
};

Projection2D pca_project_2d(std::span<const std::vector<double>> vectors,
                            std::span<const std::string> ids,
                            std::span<const std::string> labels);

/// JSONL: one {"id", "p"} line per video, then one {"p_avg"} line.
void save_pvectors_jsonl(const PVectorSet& set, const std::string& path);
PVectorSet load_pvectors_jsonl(const std::string& path);

void save_projection_csv(const Projection2D& projection, const std::string& path);

} // namespace vsb

#endif
